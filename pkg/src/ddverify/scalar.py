"""Exact arithmetic in Q(i)(q).

Three layers:

* :class:`Coefficient` -- a Gaussian rational ``(a + b*i) / d`` kept in lowest
  terms with ``d > 0``.
* polynomials in ``q`` -- plain tuples of coefficients, index ``k`` holding the
  coefficient of ``q**k``; no trailing zeros, the zero polynomial is ``()``.
  :class:`QPoly` is a thin public wrapper around such a tuple.
* :class:`Scalar` -- a reduced fraction ``num/den`` of polynomials with a monic
  denominator.  The canonical form is unique, so ``==`` is field equality.

Everything is immutable.  The polynomial helpers work on raw tuples because they
sit in the inner loop of every rank computation.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence, Union


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a root of its denominator."""


class Coefficient:
    """Gaussian rational number ``(a + b i) / d``."""

    __slots__ = ("_a", "_b", "_d", "_hash")

    def __init__(self, real: Union[int, Fraction] = 0, imag: Union[int, Fraction] = 0):
        r = Fraction(real)
        i = Fraction(imag)
        d = r.denominator * i.denominator // gcd(r.denominator, i.denominator)
        self._a = r.numerator * (d // r.denominator)
        self._b = i.numerator * (d // i.denominator)
        self._d = d
        self._hash = None

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> "Coefficient":
        # d > 0 is the caller's job
        g = gcd(gcd(a, b), d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        c = object.__new__(cls)
        c._a = a
        c._b = b
        c._d = d
        c._hash = None
        return c

    @property
    def real(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_one(self) -> bool:
        return self._a == self._d and self._b == 0

    def __bool__(self) -> bool:
        return not (self._a == 0 and self._b == 0)

    def __add__(self, other: "Coefficient") -> "Coefficient":
        if self._d == other._d:
            return Coefficient._make(self._a + other._a, self._b + other._b, self._d)
        d1, d2 = self._d, other._d
        return Coefficient._make(self._a * d2 + other._a * d1, self._b * d2 + other._b * d1, d1 * d2)

    def __sub__(self, other: "Coefficient") -> "Coefficient":
        if self._d == other._d:
            return Coefficient._make(self._a - other._a, self._b - other._b, self._d)
        d1, d2 = self._d, other._d
        return Coefficient._make(self._a * d2 - other._a * d1, self._b * d2 - other._b * d1, d1 * d2)

    def __neg__(self) -> "Coefficient":
        c = object.__new__(Coefficient)
        c._a, c._b, c._d, c._hash = -self._a, -self._b, self._d, None
        return c

    def __mul__(self, other: "Coefficient") -> "Coefficient":
        a1, b1, a2, b2 = self._a, self._b, other._a, other._b
        if b1 == 0 and b2 == 0:
            return Coefficient._make(a1 * a2, 0, self._d * other._d)
        return Coefficient._make(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, self._d * other._d)

    def inverse(self) -> "Coefficient":
        a, b, d = self._a, self._b, self._d
        n = a * a + b * b
        if n == 0:
            raise ZeroDivisionError("inverse of zero coefficient")
        return Coefficient._make(d * a, -d * b, n)

    def __truediv__(self, other: "Coefficient") -> "Coefficient":
        return self * other.inverse()

    def conjugate(self) -> "Coefficient":
        return Coefficient._make(self._a, -self._b, self._d)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Coefficient):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Rational)):
            return self._b == 0 and Fraction(self._a, self._d) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._a, self._b, self._d))
        return self._hash

    def __repr__(self) -> str:
        return f"Coefficient({self})"

    def __str__(self) -> str:
        re, im = self.real, self.imag
        if im == 0:
            return str(re)
        if re == 0:
            return _imag_str(im)
        sign = "-" if im < 0 else "+"
        return f"({re}{sign}{_imag_str(abs(im))})"


def _imag_str(im: Fraction) -> str:
    if im == 1:
        return "i"
    if im == -1:
        return "-i"
    return f"{im}*i"


ZERO_C = Coefficient(0)
ONE_C = Coefficient(1)
I_C = Coefficient(0, 1)


def as_coefficient(x: Union[int, Fraction, complex, Coefficient]) -> Coefficient:
    if isinstance(x, Coefficient):
        return x
    if isinstance(x, complex):
        raise TypeError("floating complex values are not exact; build a Coefficient instead")
    return Coefficient(x)


# ---------------------------------------------------------------------------
# raw polynomial tuples

Poly = tuple  # tuple[Coefficient, ...]

P_ZERO: Poly = ()
P_ONE: Poly = (ONE_C,)


def _trim(c: list) -> Poly:
    while c and c[-1].is_zero():
        c.pop()
    return tuple(c)


def p_add(a: Poly, b: Poly) -> Poly:
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, c in enumerate(b):
        if c:
            out[k] = out[k] + c
    return _trim(out)


def p_neg(a: Poly) -> Poly:
    return tuple(-c for c in a)


def p_sub(a: Poly, b: Poly) -> Poly:
    return p_add(a, p_neg(b))


def p_scale(a: Poly, c: Coefficient) -> Poly:
    if c.is_zero():
        return P_ZERO
    if c.is_one():
        return a
    return tuple(x * c for x in a)


def p_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return P_ZERO
    if len(a) == 1:
        return p_scale(b, a[0])
    if len(b) == 1:
        return p_scale(a, b[0])
    out = [ZERO_C] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return _trim(out)


def p_ord(a: Poly) -> int:
    """Index of the lowest nonzero coefficient (valuation at q = 0)."""
    for k, c in enumerate(a):
        if c:
            return k
    raise ValueError("valuation of zero polynomial")


def p_is_monomial(a: Poly) -> bool:
    return bool(a) and p_ord(a) == len(a) - 1


def p_shift_down(a: Poly, k: int) -> Poly:
    """Divide by q**k; the caller guarantees divisibility."""
    return a[k:] if k else a


def p_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return P_ZERO, a
    inv_lc = b[-1].inverse()
    r = list(a)
    db = len(b) - 1
    quot = [ZERO_C] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = r[k]
        if c.is_zero():
            continue
        f = c * inv_lc
        quot[k - db] = f
        for j in range(db + 1):
            if b[j]:
                r[k - db + j] = r[k - db + j] - f * b[j]
    return _trim(quot), _trim(r[:db])


def p_monic(a: Poly) -> Poly:
    lc = a[-1]
    if lc.is_one():
        return a
    return p_scale(a, lc.inverse())


def p_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd, with shortcuts for the monomial-heavy inputs we actually see."""
    if not a:
        return p_monic(b) if b else P_ZERO
    if not b:
        return p_monic(a)
    if len(a) == 1 or len(b) == 1:
        return P_ONE
    if p_is_monomial(a):
        k = min(len(a) - 1, p_ord(b))
        return (ZERO_C,) * k + (ONE_C,)
    if p_is_monomial(b):
        k = min(len(b) - 1, p_ord(a))
        return (ZERO_C,) * k + (ONE_C,)
    k = min(p_ord(a), p_ord(b))
    a, b = a[k:], b[k:]
    while b:
        _, r = p_divmod(a, b)
        a, b = b, r
    g = p_monic(a)
    return (ZERO_C,) * k + g if k else g


def p_eval(a: Poly, x: Coefficient) -> Coefficient:
    acc = ZERO_C
    for c in reversed(a):
        acc = acc * x + c
    return acc


def p_deg(a: Poly) -> int:
    return len(a) - 1


class QPoly:
    """Public, immutable polynomial in ``q`` with Gaussian rational coefficients."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable = ()):
        self.coefficients: Poly = _trim([as_coefficient(c) for c in coefficients])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QPoly) and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"QPoly({_poly_str(self.coefficients)})"


# ---------------------------------------------------------------------------
# rational functions


def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return P_ZERO, P_ONE
    if len(den) > 1:
        g = p_gcd(num, den)
        if len(g) > 1:
            if p_is_monomial(g):
                k = len(g) - 1
                num, den = num[k:], den[k:]
            else:
                num, r1 = p_divmod(num, g)
                den, r2 = p_divmod(den, g)
                assert not r1 and not r2
    lc = den[-1]
    if not lc.is_one():
        inv = lc.inverse()
        num = p_scale(num, inv)
        den = p_scale(den, inv)
    return num, den


ScalarLike = Union["Scalar", int, Fraction, Coefficient]


class Scalar:
    """Element of Q(i)(q) in canonical form (gcd-reduced, monic denominator)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Union[Sequence, QPoly, int, Fraction, Coefficient] = (), den=None):
        num_t = _to_poly(num)
        den_t = P_ONE if den is None else _to_poly(den)
        self.num, self.den = _reduce(num_t, den_t)
        self._hash = None

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "Scalar":
        s = object.__new__(cls)
        s.num = num
        s.den = den
        s._hash = None
        return s

    @classmethod
    def _of(cls, num: Poly, den: Poly) -> "Scalar":
        n, d = _reduce(num, den)
        return cls._raw(n, d)

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c: Union[int, Fraction, Coefficient]) -> "Scalar":
        c = as_coefficient(c)
        return cls._raw((c,) if c else P_ZERO, P_ONE)

    @classmethod
    def q_power(cls, k: int, c: Union[int, Fraction, Coefficient] = 1) -> "Scalar":
        c = as_coefficient(c)
        if not c:
            return ZERO
        mono = (ZERO_C,) * abs(k) + (ONE_C,)
        if k >= 0:
            return cls._raw((ZERO_C,) * k + (c,), P_ONE)
        return cls._raw((c,), mono)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return len(self.num) == 1 and len(self.den) == 1 and self.num[0].is_one()

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def __bool__(self) -> bool:
        return bool(self.num)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: ScalarLike) -> "Scalar":
        other = _coerce(other)
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            if len(self.den) == 1:
                n = p_add(self.num, other.num)
                return Scalar._raw(n, P_ONE) if n else ZERO
            return Scalar._of(p_add(self.num, other.num), self.den)
        return Scalar._of(
            p_add(p_mul(self.num, other.den), p_mul(other.num, self.den)),
            p_mul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw(p_neg(self.num), self.den)

    def __sub__(self, other: ScalarLike) -> "Scalar":
        return self + (-_coerce(other))

    def __rsub__(self, other: ScalarLike) -> "Scalar":
        return _coerce(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "Scalar":
        other = _coerce(other)
        if not self.num or not other.num:
            return ZERO
        if len(self.den) == 1 and len(other.den) == 1:
            return Scalar._raw(p_mul(self.num, other.num), P_ONE)
        # cross-cancel before multiplying; both inputs are already reduced
        g1 = p_gcd(self.num, other.den)
        g2 = p_gcd(other.num, self.den)
        n1, d2 = _div_exact(self.num, g1), _div_exact(other.den, g1)
        n2, d1 = _div_exact(other.num, g2), _div_exact(self.den, g2)
        num = p_mul(n1, n2)
        den = p_mul(d1, d2)
        lc = den[-1]
        if not lc.is_one():
            inv = lc.inverse()
            num, den = p_scale(num, inv), p_scale(den, inv)
        return Scalar._raw(num, den)

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        if not self.num:
            raise ZeroDivisionError("inverse of zero scalar")
        num, den = self.den, self.num
        lc = den[-1]
        if not lc.is_one():
            inv = lc.inverse()
            num, den = p_scale(num, inv), p_scale(den, inv)
        return Scalar._raw(num, den)

    def __truediv__(self, other: ScalarLike) -> "Scalar":
        return self * _coerce(other).inv()

    def __rtruediv__(self, other: ScalarLike) -> "Scalar":
        return _coerce(other) * self.inv()

    def __pow__(self, k: int) -> "Scalar":
        if not isinstance(k, int):
            raise TypeError("only integer powers")
        if k < 0:
            return self.inv() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def eval_at(self, q0: Union[int, Fraction, Coefficient]) -> Coefficient:
        q0 = as_coefficient(q0)
        d = p_eval(self.den, q0)
        if d.is_zero():
            raise PoleError(f"denominator vanishes at q = {q0}")
        return p_eval(self.num, q0) / d

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Rational, Coefficient)):
            return self == Scalar.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        n = _poly_str(self.num)
        if len(self.den) == 1:
            return n
        return f"({n})/({_poly_str(self.den)})"


def _div_exact(a: Poly, g: Poly) -> Poly:
    if len(g) == 1:
        return a
    if p_is_monomial(g):
        return a[len(g) - 1:]
    q, r = p_divmod(a, g)
    assert not r
    return q


def _to_poly(x) -> Poly:
    if isinstance(x, QPoly):
        return x.coefficients
    if isinstance(x, (int, Fraction, Coefficient)):
        c = as_coefficient(x)
        return (c,) if c else P_ZERO
    return _trim([as_coefficient(c) for c in x])


def _coerce(x: ScalarLike) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return Scalar.const(x)


def _poly_str(p: Poly) -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c.is_zero():
            continue
        if k == 0:
            mono = ""
        elif k == 1:
            mono = "q"
        else:
            mono = f"q^{k}"
        cs = str(c)
        if not mono:
            parts.append(cs)
        elif c.is_one():
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{cs}*{mono}")
    out = parts[0]
    for s in parts[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


ZERO = Scalar._raw(P_ZERO, P_ONE)
ONE = Scalar._raw(P_ONE, P_ONE)
Q = Scalar._raw((ZERO_C, ONE_C), P_ONE)
IMAG = Scalar._raw((I_C,), P_ONE)


def normalize(x: Scalar) -> Scalar:
    """Return the canonical form of ``x`` (already canonical for any constructed Scalar)."""
    return Scalar._of(x.num, x.den)


def add(a: Scalar, b: Scalar) -> Scalar:
    return a + b


def mul(a: Scalar, b: Scalar) -> Scalar:
    return a * b


def inv(a: Scalar) -> Scalar:
    return a.inv()


def eval_at(a: Scalar, q0) -> Coefficient:
    return a.eval_at(q0)
