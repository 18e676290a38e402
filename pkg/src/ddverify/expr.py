"""Expression mini-language for corpus entries.

Grammar (EBNF)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = atom , [ "^" , exponent ] ;
    exponent= [ "-" ] , INT | "(" , [ "-" ] , INT , ")" ;
    atom    = INT | "i" | "q" | IDENT | unit | "(" , expr , ")" ;
    unit    = "e" , "(" , INT , "," , INT , ")" ;       (matrix context only)
    IDENT   = letter , { letter | digit | "_" } ;

``^`` binds tighter than unary minus, which binds tighter than ``*`` and ``/``.
All binary operators are left-associative.  Implicit multiplication is a syntax
error.  ``q`` is the deformation parameter, ``i`` the imaginary unit; every other
identifier is a case parameter looked up in a :data:`ParamEnv`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Tuple, Union

from .scalar import IMAG, Q, Scalar

GRAMMAR_VERSION = "1"

ParamEnv = Dict[str, Scalar]


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, text: str, offset: int, expected: Iterable[str] = ()):
        self.text = text
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset} in {text!r}{exp}")


class UnboundParameterError(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"unbound parameter {self.name!r}"


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class QSym:
    pass


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Unit:
    row: int
    col: int


Expr = Union[Num, Imag, QSym, Param, Neg, BinOp, Pow, Unit]

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
_INT = re.compile(r"[0-9]+")


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str, units: bool):
        self.text = text
        self.pos = 0
        self.units = units

    def skip(self) -> None:
        t = self.text
        while self.pos < len(t) and t[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, msg: str, expected: Iterable[str]) -> None:
        self.skip()
        raise ExprSyntaxError(msg, self.text, self.pos, expected)

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            self.fail(f"expected {ch!r}", [ch])
        self.pos += 1

    def integer(self) -> int:
        self.skip()
        m = _INT.match(self.text, self.pos)
        if not m:
            self.fail("expected integer", ["INT"])
        self.pos = m.end()
        return int(m.group())

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek():
            self.fail("unexpected input", ["+", "-", "*", "/", "^"])
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek() == "-":
            self.pos += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        if self.peek() == "(":
            self.pos += 1
            k = self.signed_int()
            self.expect(")")
            return k
        return self.signed_int()

    def signed_int(self) -> int:
        sign = 1
        if self.peek() == "-":
            self.pos += 1
            sign = -1
        return sign * self.integer()

    def atom(self) -> Expr:
        ch = self.peek()
        starts = ["INT", "IDENT", "q", "i", "("] + (["e(i,j)"] if self.units else [])
        if not ch:
            self.fail("unexpected end of input", starts)
        if ch.isdigit():
            return Num(self.integer())
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        m = _IDENT.match(self.text, self.pos)
        if not m:
            self.fail(f"unexpected character {ch!r}", starts)
        name = m.group()
        if name == "e" and self.units:
            self.pos = m.end()
            self.expect("(")
            i = self.integer()
            self.expect(",")
            j = self.integer()
            self.expect(")")
            return Unit(i, j)
        if name == "e":
            self.fail("matrix unit outside matrix context", ["INT", "IDENT", "q", "i", "("])
        self.pos = m.end()
        if name == "q":
            return QSym()
        if name == "i":
            return Imag()
        return Param(name)


def parse(text: str) -> Expr:
    """Parse a scalar expression."""
    return _Parser(text, units=False).parse()


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    if isinstance(node, Pow):
        return _POW_PREC
    return 5


def to_text(node: Expr) -> str:
    """Render with the minimal parentheses needed to reparse to the same tree."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, QSym):
        return "q"
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Unit):
        return f"e({node.row},{node.col})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if _prec(node.operand) < _NEG_PREC:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) <= _POW_PREC:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = to_text(node.left)
        if _prec(node.left) < p:
            left = f"({left})"
        right = to_text(node.right)
        if _prec(node.right) <= p:
            right = f"({right})"
        return f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# evaluation


def params_of(node: Expr) -> set:
    if isinstance(node, Param):
        return {node.name}
    if isinstance(node, Neg):
        return params_of(node.operand)
    if isinstance(node, Pow):
        return params_of(node.base)
    if isinstance(node, BinOp):
        return params_of(node.left) | params_of(node.right)
    return set()


def evaluate(node: Expr, env: Mapping[str, Scalar]) -> Scalar:
    if isinstance(node, Num):
        return Scalar.const(node.value)
    if isinstance(node, QSym):
        return Q
    if isinstance(node, Imag):
        return IMAG
    if isinstance(node, Param):
        try:
            return env[node.name]
        except KeyError:
            raise UnboundParameterError(node.name) from None
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Pow):
        return evaluate(node.base, env) ** node.exponent
    if isinstance(node, BinOp):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b.is_zero():
            raise ZeroDivisionError(f"division by zero in {to_text(node)!r}")
        return a / b
    if isinstance(node, Unit):
        raise TypeError("matrix unit in scalar context")
    raise TypeError(f"not an expression node: {node!r}")


def eval_text(text: str, env: Optional[Mapping[str, Scalar]] = None) -> Scalar:
    return evaluate(parse(text), env or {})


# ---------------------------------------------------------------------------
# matrix expressions


@dataclass(frozen=True)
class MatExpr:
    """Linear combination of matrix units ``sum coeff * e(row, col)``.

    ``terms`` is sorted by (row, col) with one entry per position.
    """

    terms: Tuple[Tuple[Expr, int, int], ...]
    n: int = 4

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for coeff, i, j in self.terms:
            c = coeff
            if c == Num(1):
                parts.append(f"e({i},{j})")
            elif isinstance(c, Neg):
                inner = c.operand
                if inner == Num(1):
                    parts.append(f"-e({i},{j})")
                else:
                    parts.append("-" + _factor_text(inner) + f"*e({i},{j})")
            else:
                parts.append(_factor_text(c) + f"*e({i},{j})")
        out = parts[0]
        for p in parts[1:]:
            out += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
        return out

    def params(self) -> set:
        out: set = set()
        for c, _, _ in self.terms:
            out |= params_of(c)
        return out


def _factor_text(c: Expr) -> str:
    s = to_text(c)
    if _prec(c) < 2 or (isinstance(c, BinOp) and c.op == "/"):
        s = f"({s})"
    return s


def linear_terms(node: Expr, key_of: Callable[[Expr], Optional[Hashable]], text: str = "") -> List[Tuple[Expr, Optional[Hashable]]]:
    """Expand ``node`` as ``sum coeff * atom`` over the atoms picked out by ``key_of``.

    Returns ``[(coeff, key)]``; ``key`` is None for terms free of atoms.  Products
    of two atoms, powers of atoms and division by atoms are rejected.
    """
    k = key_of(node)
    if k is not None:
        return [(Num(1), k)]
    if isinstance(node, (Num, Imag, QSym, Param, Unit)):
        return [(node, None)]
    if isinstance(node, Neg):
        return [(_neg(c), u) for c, u in linear_terms(node.operand, key_of, text)]
    if isinstance(node, Pow):
        if any(u is not None for _, u in linear_terms(node.base, key_of, text)):
            raise ExprSyntaxError("nonlinear power", text, 0)
        return [(node, None)]
    if isinstance(node, BinOp):
        if node.op in "+-":
            right = linear_terms(node.right, key_of, text)
            if node.op == "-":
                right = [(_neg(c), u) for c, u in right]
            return linear_terms(node.left, key_of, text) + right
        if node.op == "/":
            if any(u is not None for _, u in linear_terms(node.right, key_of, text)):
                raise ExprSyntaxError("division by a linear atom", text, 0)
            return [(BinOp("/", c, node.right), u) for c, u in linear_terms(node.left, key_of, text)]
        left = linear_terms(node.left, key_of, text)
        right = linear_terms(node.right, key_of, text)
        out = []
        for cl, ul in left:
            for cr, ur in right:
                if ul is not None and ur is not None:
                    raise ExprSyntaxError("product of two linear atoms", text, 0)
                out.append((_mul(cl, cr), ul if ul is not None else ur))
        return out
    raise TypeError(node)


def _unit_key(node: Expr) -> Optional[Tuple[int, int]]:
    return (node.row, node.col) if isinstance(node, Unit) else None


def _neg(c: Expr) -> Expr:
    return c.operand if isinstance(c, Neg) else Neg(c)


def _mul(a: Expr, b: Expr) -> Expr:
    if a == Num(1):
        return b
    if b == Num(1):
        return a
    return BinOp("*", a, b)


def parse_matrix(text: str, n: int = 4) -> MatExpr:
    """Parse a linear combination of matrix units ``e(i,j)``.

    ``0`` is the zero matrix.  Terms at the same position are merged by adding
    their coefficient expressions.
    """
    node = _Parser(text, units=True).parse()
    parts = linear_terms(node, _unit_key, text)
    merged: Dict[Tuple[int, int], Expr] = {}
    for coeff, unit in parts:
        if unit is None:
            if coeff == Num(0):
                continue
            raise ExprSyntaxError("scalar term without a matrix unit", text, 0, ["e(i,j)"])
        i, j = unit
        if not (1 <= i <= n and 1 <= j <= n):
            raise ExprSyntaxError(f"matrix unit index ({i},{j}) out of range 1..{n}", text, 0)
        if unit in merged:
            prev = merged[unit]
            merged[unit] = BinOp("-", prev, coeff.operand) if isinstance(coeff, Neg) else BinOp("+", prev, coeff)
        else:
            merged[unit] = coeff
    terms = tuple((merged[k], k[0], k[1]) for k in sorted(merged))
    return MatExpr(terms, n)


def eval_matrix(m: MatExpr, env: Mapping[str, Scalar]):
    """Evaluate a :class:`MatExpr` to an exact :class:`~ddverify.matd.Mat`."""
    from .matd import Mat
    from .scalar import ZERO

    rows = [[ZERO] * m.n for _ in range(m.n)]
    for coeff, i, j in m.terms:
        rows[i - 1][j - 1] = rows[i - 1][j - 1] + evaluate(coeff, env)
    return Mat._raw(tuple(tuple(r) for r in rows), m.n)
