"""Dense exact matrices over Q(i)(q) and canonical subspace bases.

Matrices are vectorized row-major: entry (i, j) (1-based) goes to position
``(i-1)*n + (j-1)``.  A :class:`Basis` is the reduced row-echelon form of a list
of such vectors, which makes it the canonical representative of their span.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .scalar import ONE, ZERO, Scalar


class DimensionError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


Vec = Tuple[Scalar, ...]


class Mat:
    """Immutable n x n matrix of Scalars."""

    __slots__ = ("n", "rows", "_hash")

    def __init__(self, rows: Sequence[Sequence], n: Optional[int] = None):
        rows = tuple(tuple(_scalar(x) for x in r) for r in rows)
        size = len(rows) if n is None else n
        if len(rows) != size or any(len(r) != size for r in rows):
            raise DimensionError("matrix must be square")
        self.n = size
        self.rows = rows
        self._hash = None

    @classmethod
    def _raw(cls, rows: tuple, n: int) -> "Mat":
        m = object.__new__(cls)
        m.n = n
        m.rows = rows
        m._hash = None
        return m

    @classmethod
    def zero(cls, n: int = 4) -> "Mat":
        return cls._raw(tuple((ZERO,) * n for _ in range(n)), n)

    @classmethod
    def identity(cls, n: int = 4) -> "Mat":
        return cls.diag([ONE] * n)

    @classmethod
    def diag(cls, entries: Sequence) -> "Mat":
        n = len(entries)
        ent = [_scalar(x) for x in entries]
        return cls._raw(tuple(tuple(ent[i] if i == j else ZERO for j in range(n)) for i in range(n)), n)

    def __getitem__(self, ij: Tuple[int, int]) -> Scalar:
        """1-based entry access, matching e(i,j) notation."""
        i, j = ij
        return self.rows[i - 1][j - 1]

    def is_zero(self) -> bool:
        return all(not x.num for r in self.rows for x in r)

    def __add__(self, other: "Mat") -> "Mat":
        _same(self, other)
        return Mat._raw(tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)), self.n)

    def __sub__(self, other: "Mat") -> "Mat":
        _same(self, other)
        return Mat._raw(tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)), self.n)

    def __neg__(self) -> "Mat":
        return Mat._raw(tuple(tuple(-a for a in r) for r in self.rows), self.n)

    def scale(self, c) -> "Mat":
        c = _scalar(c)
        return Mat._raw(tuple(tuple(c * a for a in r) for r in self.rows), self.n)

    def __rmul__(self, c) -> "Mat":
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, Mat):
            return matmul(self, other)
        return self.scale(other)

    def __matmul__(self, other: "Mat") -> "Mat":
        return matmul(self, other)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Mat) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def nonzero_entries(self) -> List[Tuple[int, int, Scalar]]:
        return [(i + 1, j + 1, x) for i, r in enumerate(self.rows) for j, x in enumerate(r) if x.num]

    def to_text(self) -> str:
        """Sum-of-units rendering, e.g. ``q^2*e(1,1) - 5*e(2,3)``; ``0`` for zero."""
        parts = []
        for i, j, x in self.nonzero_entries():
            s = str(x)
            if x.is_one():
                parts.append(f"e({i},{j})")
            elif x == -1:
                parts.append(f"-e({i},{j})")
            else:
                if len(x.den) > 1 or len([c for c in x.num if c]) > 1:
                    s = f"({s})"
                parts.append(f"{s}*e({i},{j})")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
        return out

    def __repr__(self) -> str:
        return f"Mat[{self.n}]({self.to_text()})"


def _scalar(x) -> Scalar:
    return x if isinstance(x, Scalar) else Scalar.const(x)


def _same(a: Mat, b: Mat) -> None:
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")


def unit(i: int, j: int, n: int = 4) -> Mat:
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"matrix unit e({i},{j}) out of range for n={n}")
    rows = [[ZERO] * n for _ in range(n)]
    rows[i - 1][j - 1] = ONE
    return Mat._raw(tuple(tuple(r) for r in rows), n)


def matmul(a: Mat, b: Mat) -> Mat:
    _same(a, b)
    n = a.n
    bcols = b.rows
    out = []
    for ra in a.rows:
        acc = [ZERO] * n
        for k, x in enumerate(ra):
            if not x.num:
                continue
            rb = bcols[k]
            for j in range(n):
                y = rb[j]
                if y.num:
                    acc[j] = acc[j] + x * y
        out.append(tuple(acc))
    return Mat._raw(tuple(out), n)


mul = matmul


def commutator(a: Mat, b: Mat) -> Mat:
    return matmul(a, b) - matmul(b, a)


def kron(a: Mat, b: Mat) -> Mat:
    """Kronecker product; block (i, j) of the result is ``a[i,j] * b``."""
    if a.n != 2 or b.n != 2:
        raise DimensionError("kron is defined here for 2x2 factors")
    n = 4
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(2):
        for j in range(2):
            x = a.rows[i][j]
            if not x.num:
                continue
            for k in range(2):
                for l in range(2):
                    rows[2 * i + k][2 * j + l] = x * b.rows[k][l]
    return Mat._raw(tuple(tuple(r) for r in rows), n)


def inverse(a: Mat) -> Mat:
    """Exact inverse by Gauss-Jordan elimination."""
    n = a.n
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(a.rows)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c].num), None)
        if p is None:
            raise SingularMatrixError("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        if not piv.is_one():
            pinv = piv.inv()
            aug[c] = [x * pinv if x.num else x for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c].num:
                f = aug[r][c]
                aug[r] = [x - f * y if y.num else x for x, y in zip(aug[r], aug[c])]
    return Mat._raw(tuple(tuple(r[n:]) for r in aug), n)


def vectorize(a: Mat) -> Vec:
    return tuple(x for r in a.rows for x in r)


def unvectorize(v: Sequence[Scalar], n: Optional[int] = None) -> Mat:
    if n is None:
        n = int(round(len(v) ** 0.5))
    if len(v) != n * n:
        raise DimensionError(f"vector of length {len(v)} is not n^2 for n={n}")
    return Mat._raw(tuple(tuple(v[i * n:(i + 1) * n]) for i in range(n)), n)


# ---------------------------------------------------------------------------
# echelon forms


@dataclass(frozen=True)
class Basis:
    """RREF rows spanning a subspace of K^length."""

    rows: Tuple[Vec, ...]
    pivots: Tuple[int, ...]
    length: int

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def matrices(self, n: Optional[int] = None) -> List[Mat]:
        return [unvectorize(r, n) for r in self.rows]

    def contains(self, v: Sequence[Scalar]) -> bool:
        return not any(x.num for x in reduce_against(self.rows, self.pivots, tuple(v)))


def reduce_against(rows: Sequence[Vec], pivots: Sequence[int], v: Vec) -> Vec:
    """Reduce ``v`` by RREF-normalized ``rows`` (pivot entries equal to 1)."""
    out = list(v)
    for row, p in zip(rows, pivots):
        f = out[p]
        if not f.num:
            continue
        for j in range(p, len(out)):
            y = row[j]
            if y.num:
                out[j] = out[j] - f * y
    return tuple(out)


class Echelon:
    """Incrementally built row-echelon basis (pivots normalized to 1).

    Rows are only reduced downward as they are inserted; :meth:`basis` performs
    the final back-substitution to reach the canonical RREF.
    """

    def __init__(self, length: int):
        self.length = length
        self.rows: List[Vec] = []
        self.pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence[Scalar]) -> Vec:
        return reduce_against(self.rows, self.pivots, tuple(v))

    def add(self, v: Sequence[Scalar]) -> bool:
        """Insert ``v``; return True when it enlarged the span."""
        if len(v) != self.length:
            raise DimensionError(f"expected vector of length {self.length}, got {len(v)}")
        r = list(self.reduce(v))
        p = next((j for j, x in enumerate(r) if x.num), None)
        if p is None:
            return False
        lead = r[p]
        if not lead.is_one():
            li = lead.inv()
            r = [x * li if x.num else x for x in r]
        # keep rows sorted by pivot so reduce_against sees ascending pivots
        k = 0
        while k < len(self.pivots) and self.pivots[k] < p:
            k += 1
        self.rows.insert(k, tuple(r))
        self.pivots.insert(k, p)
        return True

    def basis(self) -> Basis:
        rows = [list(r) for r in self.rows]
        piv = list(self.pivots)
        for k in range(len(rows) - 1, -1, -1):
            p = piv[k]
            for r in range(k):
                f = rows[r][p]
                if f.num:
                    rows[r] = [x - f * y if y.num else x for x, y in zip(rows[r], rows[k])]
        return Basis(tuple(tuple(r) for r in rows), tuple(piv), self.length)


def rref(rows: Iterable[Sequence[Scalar]], length: Optional[int] = None) -> Basis:
    rows = [tuple(r) for r in rows]
    if length is None:
        if not rows:
            raise DimensionError("rref of an empty list needs an explicit length")
        length = len(rows[0])
    ech = Echelon(length)
    for r in rows:
        ech.add(r)
    return ech.basis()


def rank(rows: Iterable[Sequence[Scalar]], length: Optional[int] = None) -> int:
    return rref(rows, length).rank


def span_of(mats: Iterable[Mat], n: int = 4) -> Basis:
    return rref([vectorize(m) for m in mats], n * n)
