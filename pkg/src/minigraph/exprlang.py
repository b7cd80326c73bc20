"""Small expression language for real maps f(x, y) and complex seeds h(w).

Two modes are supported:

* ``real2``    -- variables ``x`` and ``y``; constants ``pi`` and ``e``.
* ``complex1`` -- variable ``w``; constants ``pi``, ``e`` and the imaginary unit ``i``.

Expressions are evaluated with exact derivatives by forward-mode jet
arithmetic (second order in real mode, first order in complex mode) and can be
differentiated symbolically, which is how third derivatives of potentials are
obtained without nesting numerical differentiation.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

REAL2 = "real2"
COMPLEX1 = "complex1"
MODES = (REAL2, COMPLEX1)

VARIABLES = {REAL2: ("x", "y"), COMPLEX1: ("w",)}
CONSTANTS = {REAL2: ("pi", "e"), COMPLEX1: ("pi", "e", "i")}
FUNCTIONS = {
    REAL2: ("exp", "log", "sin", "cos", "tan", "sinh", "cosh", "sqrt", "abs"),
    COMPLEX1: ("exp", "log", "sin", "cos", "tan", "sinh", "cosh", "sqrt"),
}

# Parser nesting and total tree depth; both keep recursion well under Python's limit.
MAX_DEPTH = 100
MAX_TREE_DEPTH = 300


class ExprError(Exception):
    """Base class for expression errors."""


class ParseError(ExprError):
    """Syntax error at a byte offset of the source."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        text = f"{message} at offset {offset}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)


class UndeclaredVariableError(ParseError):
    pass


class ModeError(ExprError):
    pass


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the domain of an operation (log of 0, division by 0, ...)."""

    def __init__(self, message: str, point=None):
        self.point = point
        if point is not None:
            message = f"{message} at {_fmt_point(point)}"
        super().__init__(message)


def _fmt_point(point) -> str:
    if isinstance(point, dict):
        return "(" + ", ".join(f"{k}={v!r}" for k, v in point.items()) + ")"
    return repr(point)


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Const, Neg, BinOp, Call]


@dataclass(frozen=True)
class Expr:
    """A parsed expression: AST root plus the mode it was parsed in."""

    root: Node
    mode: str = REAL2

    def __str__(self) -> str:
        return to_source(self.root)

    def variables(self) -> set[str]:
        return _free_vars(self.root)


def _free_vars(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Neg, Call)):
        return _free_vars(node.arg)
    if isinstance(node, BinOp):
        return _free_vars(node.left) | _free_vars(node.right)
    return set()


# --------------------------------------------------------------------------
# Lexer / parser
# --------------------------------------------------------------------------

_NUMBER = re.compile(rb"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(rb"[A-Za-z_][A-Za-z_0-9]*")
_SPACE = re.compile(rb"[ \t\r\n]*")
_OPS = b"+-*/^()"

_ATOM_START = ("number", "identifier", "'('", "'-'")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "ident", "op", "eof"
    text: str
    offset: int


def _tokenize(data: bytes) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(data)
    while True:
        pos = _SPACE.match(data, pos).end()
        if pos >= n:
            toks.append(_Tok("eof", "", n))
            return toks
        m = _NUMBER.match(data, pos)
        if m:
            toks.append(_Tok("num", m.group().decode("ascii"), pos))
            pos = m.end()
            continue
        m = _IDENT.match(data, pos)
        if m:
            toks.append(_Tok("ident", m.group().decode("ascii"), pos))
            pos = m.end()
            continue
        if data[pos] in _OPS:
            toks.append(_Tok("op", chr(data[pos]), pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {data[pos:pos + 1]!r}", pos, ("operator", *_ATOM_START))


class _Parser:
    # expr  := term (("+"|"-") term)*
    # term  := unary (("*"|"/") unary)*
    # unary := "-" unary | power
    # power := atom ("^" unary)?
    # atom  := number | ident | ident "(" expr ")" | "(" expr ")"

    def __init__(self, toks: list[_Tok], mode: str):
        self.toks = toks
        self.pos = 0
        self.mode = mode
        self.depth = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.pos]

    def _advance(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def _is_op(self, chars: str) -> bool:
        return self.cur.kind == "op" and self.cur.text in chars

    def _expect_op(self, char: str) -> None:
        if not self._is_op(char):
            raise ParseError(f"unexpected {self._describe(self.cur)}", self.cur.offset, (f"'{char}'",))
        self._advance()

    @staticmethod
    def _describe(tok: _Tok) -> str:
        return "end of input" if tok.kind == "eof" else f"token {tok.text!r}"

    def _enter(self) -> None:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ParseError("expression nested too deeply", self.cur.offset)

    def parse(self) -> Node:
        node = self.expr()
        if self.cur.kind != "eof":
            raise ParseError(f"unexpected {self._describe(self.cur)}", self.cur.offset,
                             ("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self._is_op("+-"):
            op = self._advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self._is_op("*/"):
            op = self._advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        self._enter()
        try:
            if self._is_op("-"):
                self._advance()
                return Neg(self.unary())
            return self.power()
        finally:
            self.depth -= 1

    def power(self) -> Node:
        base = self.atom()
        if self._is_op("^"):
            self._advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.cur
        if tok.kind == "num":
            self._advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError("numeric literal out of range", tok.offset)
            return Num(value)
        if tok.kind == "ident":
            self._advance()
            name = tok.text
            if name in FUNCTIONS[self.mode]:
                self._expect_op("(")
                arg = self.expr()
                self._expect_op(")")
                return Call(name, arg)
            if self._is_op("("):
                raise ParseError(f"unknown function {name!r} in {self.mode} mode", tok.offset)
            if name in CONSTANTS[self.mode]:
                return Const(name)
            if name in VARIABLES[self.mode]:
                return Var(name)
            raise UndeclaredVariableError(
                f"undeclared variable {name!r} (declared: {', '.join(VARIABLES[self.mode])})", tok.offset)
        if self._is_op("("):
            self._advance()
            node = self.expr()
            self._expect_op(")")
            return node
        raise ParseError(f"unexpected {self._describe(tok)}", tok.offset, _ATOM_START)


def parse(source: str | bytes, mode: str = REAL2) -> Expr:
    """Parse ``source`` into an :class:`Expr`.

    Raises :class:`ParseError` (with a byte offset) on malformed input and
    :class:`UndeclaredVariableError` for variables not declared by ``mode``.
    """
    if mode not in MODES:
        raise ModeError(f"unknown mode {mode!r}")
    data = source.encode("utf-8") if isinstance(source, str) else bytes(source)
    root = _Parser(_tokenize(data), mode).parse()
    if _tree_depth(root) > MAX_TREE_DEPTH:
        raise ParseError("expression too large", 0)
    return Expr(root, mode)


def _tree_depth(root: Node) -> int:
    deepest = 0
    stack = [(root, 1)]
    while stack:
        node, depth = stack.pop()
        deepest = max(deepest, depth)
        if isinstance(node, (Neg, Call)):
            stack.append((node.arg, depth + 1))
        elif isinstance(node, BinOp):
            stack.append((node.left, depth + 1))
            stack.append((node.right, depth + 1))
    return deepest


# --------------------------------------------------------------------------
# Printer
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return 4 if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return 0
    return 5


def _wrap(node: Node, min_prec: int) -> str:
    text = to_source(node)
    return f"({text})" if _prec(node) < min_prec else text


def to_source(node: Node | Expr) -> str:
    """Render an AST as source text that parses back to the same tree."""
    if isinstance(node, Expr):
        node = node.root
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, 3)
    if node.op == "^":
        return f"{_wrap(node.left, 5)}^{_wrap(node.right, 3)}"
    p = _PREC[node.op]
    return f"{_wrap(node.left, p)} {node.op} {_wrap(node.right, p + 1)}"


# --------------------------------------------------------------------------
# Jets
# --------------------------------------------------------------------------


class Jet2:
    """Second-order jet of a real function of (x, y).

    The mixed partial is stored once, so symmetry holds by construction.
    """

    __slots__ = ("v", "x", "y", "xx", "xy", "yy")

    def __init__(self, v, x=0.0, y=0.0, xx=0.0, xy=0.0, yy=0.0):
        self.v = v
        self.x = x
        self.y = y
        self.xx = xx
        self.xy = xy
        self.yy = yy

    # long-form names
    value = property(lambda s: s.v)
    d_x = property(lambda s: s.x)
    d_y = property(lambda s: s.y)
    d_xx = property(lambda s: s.xx)
    d_xy = property(lambda s: s.xy)
    d_yy = property(lambda s: s.yy)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.v, self.x, self.y, self.xx, self.xy, self.yy)

    def is_constant(self) -> bool:
        return self.x == 0.0 and self.y == 0.0 and self.xx == 0.0 and self.xy == 0.0 and self.yy == 0.0

    def __repr__(self) -> str:
        return "Jet2(v={!r}, x={!r}, y={!r}, xx={!r}, xy={!r}, yy={!r})".format(*self.as_tuple())

    def __neg__(self):
        return Jet2(-self.v, -self.x, -self.y, -self.xx, -self.xy, -self.yy)

    def __add__(self, o):
        return Jet2(self.v + o.v, self.x + o.x, self.y + o.y, self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)

    def __sub__(self, o):
        return Jet2(self.v - o.v, self.x - o.x, self.y - o.y, self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)

    def __mul__(self, o):
        a, b = self, o
        return Jet2(
            a.v * b.v,
            a.x * b.v + a.v * b.x,
            a.y * b.v + a.v * b.y,
            a.xx * b.v + 2.0 * a.x * b.x + a.v * b.xx,
            a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
            a.yy * b.v + 2.0 * a.y * b.y + a.v * b.yy,
        )

    def chain(self, g0: float, g1: float, g2: float) -> "Jet2":
        """Compose a scalar function with value g0, g' = g1, g'' = g2 at self.v."""
        return Jet2(
            g0,
            g1 * self.x,
            g1 * self.y,
            g2 * self.x * self.x + g1 * self.xx,
            g2 * self.x * self.y + g1 * self.xy,
            g2 * self.y * self.y + g1 * self.yy,
        )


class CJet1:
    """First-order jet of a holomorphic function of w: value and dh/dw."""

    __slots__ = ("value", "deriv")

    def __init__(self, value: complex, deriv: complex = 0j):
        self.value = complex(value)
        self.deriv = complex(deriv)

    def __repr__(self) -> str:
        return f"CJet1(value={self.value!r}, deriv={self.deriv!r})"

    def is_constant(self) -> bool:
        return self.deriv == 0

    def __neg__(self):
        return CJet1(-self.value, -self.deriv)

    def __add__(self, o):
        return CJet1(self.value + o.value, self.deriv + o.deriv)

    def __sub__(self, o):
        return CJet1(self.value - o.value, self.deriv - o.deriv)

    def __mul__(self, o):
        return CJet1(self.value * o.value, self.deriv * o.value + self.value * o.deriv)

    def chain(self, g0: complex, g1: complex) -> "CJet1":
        return CJet1(g0, g1 * self.deriv)


def _int_power(base, n: int, one):
    result = one
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _is_integer(value: float) -> bool:
    return math.isfinite(value) and value == math.floor(value)


class _RealJetEvaluator:
    def __init__(self, x: float, y: float):
        self.point = {"x": x, "y": y}
        self.vars = {"x": Jet2(x, 1.0, 0.0), "y": Jet2(y, 0.0, 1.0)}

    def fail(self, message: str):
        raise DomainError(message, self.point)

    def recip(self, a: Jet2) -> Jet2:
        if a.v == 0.0:
            self.fail("division by zero")
        r = 1.0 / a.v
        return a.chain(r, -r * r, 2.0 * r * r * r)

    def log(self, a: Jet2) -> Jet2:
        if not a.v > 0.0:
            self.fail("log of non-positive value")
        r = 1.0 / a.v
        return a.chain(math.log(a.v), r, -r * r)

    def exp(self, a: Jet2) -> Jet2:
        ev = math.exp(a.v)
        return a.chain(ev, ev, ev)

    def ev(self, node: Node) -> Jet2:
        if isinstance(node, Num):
            return Jet2(node.value)
        if isinstance(node, Var):
            return self.vars[node.name]
        if isinstance(node, Const):
            return Jet2(math.pi if node.name == "pi" else math.e)
        if isinstance(node, Neg):
            return -self.ev(node.arg)
        if isinstance(node, Call):
            return self.call(node.func, self.ev(node.arg))
        a = self.ev(node.left)
        b = self.ev(node.right)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a * self.recip(b)
        return self.power(a, b)

    def power(self, a: Jet2, p: Jet2) -> Jet2:
        if p.is_constant() and _is_integer(p.v):
            n = int(p.v)
            if n >= 0:
                return _int_power(a, n, Jet2(1.0))
            return self.recip(_int_power(a, -n, Jet2(1.0)))
        if not a.v > 0.0:
            self.fail("non-integer power of non-positive base")
        return self.exp(p * self.log(a))

    def call(self, func: str, a: Jet2) -> Jet2:
        u = a.v
        if func == "exp":
            return self.exp(a)
        if func == "log":
            return self.log(a)
        if func == "sin":
            s, c = math.sin(u), math.cos(u)
            return a.chain(s, c, -s)
        if func == "cos":
            s, c = math.sin(u), math.cos(u)
            return a.chain(c, -s, -c)
        if func == "tan":
            c = math.cos(u)
            if c == 0.0:
                self.fail("tan at a pole")
            t = math.tan(u)
            sec2 = 1.0 + t * t
            return a.chain(t, sec2, 2.0 * t * sec2)
        if func == "sinh":
            s, c = math.sinh(u), math.cosh(u)
            return a.chain(s, c, s)
        if func == "cosh":
            s, c = math.sinh(u), math.cosh(u)
            return a.chain(c, s, c)
        if func == "sqrt":
            if not u > 0.0:
                self.fail("sqrt of non-positive value")
            r = math.sqrt(u)
            return a.chain(r, 0.5 / r, -0.25 / (r * u))
        if func == "abs":
            if u == 0.0:
                self.fail("abs is not differentiable at 0")
            sgn = 1.0 if u > 0 else -1.0
            return a.chain(abs(u), sgn, 0.0)
        raise ModeError(f"unknown function {func!r}")


class _ComplexJetEvaluator:
    def __init__(self, w: complex):
        self.point = {"w": w}
        self.w = CJet1(w, 1.0)

    def fail(self, message: str):
        raise DomainError(message, self.point)

    def recip(self, a: CJet1) -> CJet1:
        if a.value == 0:
            self.fail("division by zero")
        r = 1.0 / a.value
        return a.chain(r, -r * r)

    def log(self, a: CJet1) -> CJet1:
        if a.value == 0:
            self.fail("log branch point at 0")
        return a.chain(cmath.log(a.value), 1.0 / a.value)

    def exp(self, a: CJet1) -> CJet1:
        ev = cmath.exp(a.value)
        return a.chain(ev, ev)

    def ev(self, node: Node) -> CJet1:
        if isinstance(node, Num):
            return CJet1(node.value)
        if isinstance(node, Var):
            return self.w
        if isinstance(node, Const):
            return CJet1({"pi": math.pi, "e": math.e, "i": 1j}[node.name])
        if isinstance(node, Neg):
            return -self.ev(node.arg)
        if isinstance(node, Call):
            return self.call(node.func, self.ev(node.arg))
        a = self.ev(node.left)
        b = self.ev(node.right)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a * self.recip(b)
        return self.power(a, b)

    def power(self, a: CJet1, p: CJet1) -> CJet1:
        if p.is_constant() and p.value.imag == 0 and _is_integer(p.value.real):
            n = int(p.value.real)
            if n >= 0:
                return _int_power(a, n, CJet1(1.0))
            return self.recip(_int_power(a, -n, CJet1(1.0)))
        if a.value == 0:
            self.fail("non-integer power of zero")
        return self.exp(p * self.log(a))

    def call(self, func: str, a: CJet1) -> CJet1:
        u = a.value
        if func == "exp":
            return self.exp(a)
        if func == "log":
            return self.log(a)
        if func == "sin":
            return a.chain(cmath.sin(u), cmath.cos(u))
        if func == "cos":
            return a.chain(cmath.cos(u), -cmath.sin(u))
        if func == "tan":
            c = cmath.cos(u)
            if c == 0:
                self.fail("tan at a pole")
            return a.chain(cmath.tan(u), 1.0 / (c * c))
        if func == "sinh":
            return a.chain(cmath.sinh(u), cmath.cosh(u))
        if func == "cosh":
            return a.chain(cmath.cosh(u), cmath.sinh(u))
        if func == "sqrt":
            if u == 0:
                self.fail("sqrt branch point at 0")
            r = cmath.sqrt(u)
            return a.chain(r, 0.5 / r)
        raise ModeError(f"function {func!r} is not available in complex mode")


def _require_mode(e: Expr, mode: str) -> None:
    if e.mode != mode:
        raise ModeError(f"expression is in {e.mode} mode, {mode} required")


def eval_jet2(e: Expr, x: float, y: float) -> Jet2:
    """Value and all partials through order 2 of a real2 expression at (x, y)."""
    _require_mode(e, REAL2)
    ev = _RealJetEvaluator(float(x), float(y))
    try:
        jet = ev.ev(e.root)
    except OverflowError:
        ev.fail("overflow")
    if not all(math.isfinite(c) for c in jet.as_tuple()):
        ev.fail("non-finite result")
    return jet


def eval_cjet(e: Expr, w: complex) -> CJet1:
    """Value and complex derivative of a complex1 expression at w."""
    _require_mode(e, COMPLEX1)
    ev = _ComplexJetEvaluator(complex(w))
    try:
        jet = ev.ev(e.root)
    except OverflowError:
        ev.fail("overflow")
    if not (cmath.isfinite(jet.value) and cmath.isfinite(jet.deriv)):
        ev.fail("non-finite result")
    return jet


# --------------------------------------------------------------------------
# Vectorised value evaluation (numpy)
# --------------------------------------------------------------------------

_NP_FUNCS = {
    "exp": np.exp, "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "sinh": np.sinh, "cosh": np.cosh, "abs": np.abs,
}


class _ArrayEvaluator:
    def __init__(self, mode: str, env: dict):
        self.mode = mode
        self.env = env
        self.complex = mode == COMPLEX1

    def fail(self, message: str, mask):
        mask = np.broadcast_to(mask, np.broadcast(*self.env.values()).shape)
        idx = np.flatnonzero(mask)
        point = None
        if idx.size:
            k = int(idx[0])
            point = {n: np.broadcast_to(v, mask.shape).flat[k].item() for n, v in self.env.items()}
        raise DomainError(message, point)

    def ev(self, node: Node):
        if isinstance(node, Num):
            return np.float64(node.value)
        if isinstance(node, Var):
            return self.env[node.name]
        if isinstance(node, Const):
            return {"pi": np.float64(math.pi), "e": np.float64(math.e), "i": np.complex128(1j)}[node.name]
        if isinstance(node, Neg):
            return -self.ev(node.arg)
        if isinstance(node, Call):
            a = self.ev(node.arg)
            if node.func == "log":
                bad = (a == 0) if self.complex else ~(a > 0)
                if np.any(bad):
                    self.fail("log outside its domain", bad)
                return np.log(a)
            if node.func == "sqrt":
                bad = (a == 0) if self.complex else ~(a > 0)
                if np.any(bad):
                    self.fail("sqrt outside its domain", bad)
                return np.sqrt(a)
            return _NP_FUNCS[node.func](a)
        a = self.ev(node.left)
        b = self.ev(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(b == 0):
                self.fail("division by zero", b == 0)
            return a / b
        # ^
        b_arr = np.asarray(b)
        if b_arr.ndim == 0 and np.isreal(b_arr) and _is_integer(float(np.real(b_arr))):
            n = int(np.real(b_arr))
            if n < 0 and np.any(a == 0):
                self.fail("division by zero", a == 0)
            return a ** n if n >= 0 else 1.0 / (a ** (-n))
        bad = (a == 0) if self.complex else ~(a > 0)
        if np.any(bad):
            self.fail("non-integer power outside its domain", bad)
        return np.exp(b * np.log(a))


def evaluate(e: Expr, **env):
    """Evaluate ``e`` (values only) on scalars or numpy arrays.

    Real mode takes ``x`` and ``y``; complex mode takes ``w``. Raises
    :class:`DomainError` with the first offending point.
    """
    names = VARIABLES[e.mode]
    missing = [n for n in names if n not in env]
    if missing:
        raise TypeError(f"missing variables: {missing}")
    dtype = np.complex128 if e.mode == COMPLEX1 else np.float64
    arrays = {n: np.asarray(env[n], dtype=dtype) for n in names}
    evaluator = _ArrayEvaluator(e.mode, arrays)
    with np.errstate(all="ignore"):
        out = evaluator.ev(e.root)
        out = np.broadcast_to(out, np.broadcast(*arrays.values()).shape).astype(dtype)
    finite = np.isfinite(out)
    if not np.all(finite):
        evaluator.fail("non-finite result", ~finite)
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Symbolic differentiation
# --------------------------------------------------------------------------

ZERO = Num(0.0)
ONE = Num(1.0)


def _num(value: float) -> Node:
    if value == 0:
        return ZERO
    return Num(value) if value > 0 else Neg(Num(-value))


def _const_value(node: Node):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg) and isinstance(node.arg, Num):
        return -node.arg.value
    return None


def _neg(a: Node) -> Node:
    if isinstance(a, Neg):
        return a.arg
    if a == ZERO:
        return ZERO
    return Neg(a)


def _add(a: Node, b: Node) -> Node:
    ca, cb = _const_value(a), _const_value(b)
    if ca is not None and cb is not None:
        return _num(ca + cb)
    if ca == 0:
        return b
    if cb == 0:
        return a
    if isinstance(b, Neg):
        return BinOp("-", a, b.arg)
    return BinOp("+", a, b)


def _sub(a: Node, b: Node) -> Node:
    ca, cb = _const_value(a), _const_value(b)
    if ca is not None and cb is not None:
        return _num(ca - cb)
    if cb == 0:
        return a
    if ca == 0:
        return _neg(b)
    if isinstance(b, Neg):
        return BinOp("+", a, b.arg)
    return BinOp("-", a, b)


def _mul(a: Node, b: Node) -> Node:
    ca, cb = _const_value(a), _const_value(b)
    if ca is not None and cb is not None:
        return _num(ca * cb)
    if ca == 0 or cb == 0:
        return ZERO
    if ca == 1:
        return b
    if cb == 1:
        return a
    if ca == -1:
        return _neg(b)
    if cb == -1:
        return _neg(a)
    if isinstance(a, Neg):
        return _neg(_mul(a.arg, b))
    if isinstance(b, Neg):
        return _neg(_mul(a, b.arg))
    return BinOp("*", a, b)


def _div(a: Node, b: Node) -> Node:
    ca, cb = _const_value(a), _const_value(b)
    if ca == 0:
        return ZERO
    if cb == 1:
        return a
    if isinstance(a, Neg):
        return _neg(_div(a.arg, b))
    return BinOp("/", a, b)


def _pow(a: Node, p: Node) -> Node:
    cp = _const_value(p)
    if cp == 0:
        return ONE
    if cp == 1:
        return a
    return BinOp("^", a, p)


def _depends(node: Node, var: str) -> bool:
    return var in _free_vars(node)


def _d(node: Node, var: str) -> Node:
    if isinstance(node, (Num, Const)):
        return ZERO
    if isinstance(node, Var):
        return ONE if node.name == var else ZERO
    if isinstance(node, Neg):
        return _neg(_d(node.arg, var))
    if isinstance(node, Call):
        u = node.arg
        du = _d(u, var)
        if du == ZERO:
            return ZERO
        f = node.func
        if f == "exp":
            outer = node
        elif f == "log":
            return _div(du, u)
        elif f == "sin":
            outer = Call("cos", u)
        elif f == "cos":
            outer = _neg(Call("sin", u))
        elif f == "tan":
            return _div(du, _pow(Call("cos", u), Num(2.0)))
        elif f == "sinh":
            outer = Call("cosh", u)
        elif f == "cosh":
            outer = Call("sinh", u)
        elif f == "sqrt":
            return _div(du, _mul(Num(2.0), node))
        elif f == "abs":
            return _div(_mul(u, du), node)
        else:
            raise ModeError(f"unknown function {f!r}")
        return _mul(outer, du)
    a, b = node.left, node.right
    op = node.op
    if op == "+":
        return _add(_d(a, var), _d(b, var))
    if op == "-":
        return _sub(_d(a, var), _d(b, var))
    if op == "*":
        return _add(_mul(_d(a, var), b), _mul(a, _d(b, var)))
    if op == "/":
        # (a'b - ab') / b^2
        return _div(_sub(_mul(_d(a, var), b), _mul(a, _d(b, var))), _pow(b, Num(2.0)))
    # a ^ b
    da = _d(a, var)
    if not _depends(b, var):
        cb = _const_value(b)
        lowered = _num(cb - 1.0) if cb is not None else _sub(b, ONE)
        return _mul(_mul(b, _pow(a, lowered)), da)
    # a^b * (b' log a + b a'/a)
    inner = _add(_mul(_d(b, var), Call("log", a)), _div(_mul(b, da), a))
    return _mul(node, inner)


def differentiate(e: Expr, var: str) -> Expr:
    """Symbolic partial derivative of ``e`` with respect to ``var``."""
    if var not in VARIABLES[e.mode]:
        raise ModeError(f"variable {var!r} is not declared in {e.mode} mode")
    return Expr(_d(e.root, var), e.mode)
