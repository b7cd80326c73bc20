"""Minimal graphs in R^4: fundamental forms, Jacobians, Weierstrass data and
special Lagrangian checks."""

__version__ = "0.1.0"
