"""Operator algebra, centralizer and shape patterns as canonical bases."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import expr as ex
from .matd import Basis, DimensionError, Echelon, Mat, kron, rref, vectorize
from .scalar import ONE, ZERO, Scalar


def unital_closure(gens: Sequence[Mat]) -> Basis:
    """Basis of the smallest unital subalgebra containing ``gens``.

    Every newly adjoined element is multiplied on both sides by each generator;
    the loop stops once a round adds nothing, at which point the span is closed
    under multiplication by the generators and hence is the algebra.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("unital_closure needs at least one generator")
    n = gens[0].n
    if any(g.n != n for g in gens):
        raise DimensionError("generators of different sizes")
    ech = Echelon(n * n)
    frontier = []
    for m in [Mat.identity(n)] + gens:
        if ech.add(vectorize(m)):
            frontier.append(m)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                for y in (x @ g, g @ x):
                    if ech.add(vectorize(y)):
                        nxt.append(y)
        frontier = nxt
    return ech.basis()


def _commutator_equations(b: Mat) -> List[Tuple[Scalar, ...]]:
    """Rows of the linear map X -> vec(XB - BX) in the unknowns vec(X)."""
    n = b.n
    rows = []
    for i in range(n):
        for j in range(n):
            eq = [ZERO] * (n * n)
            # (XB)_ij = sum_k X_ik B_kj
            for k in range(n):
                c = b.rows[k][j]
                if c.num:
                    eq[i * n + k] = eq[i * n + k] + c
            # (BX)_ij = sum_k B_ik X_kj
            for k in range(n):
                c = b.rows[i][k]
                if c.num:
                    eq[k * n + j] = eq[k * n + j] - c
            if any(x.num for x in eq):
                rows.append(tuple(eq))
    return rows


def commutant_system(mats: Sequence[Mat], n: int) -> Basis:
    """RREF of the stacked commutator equations for ``mats``."""
    ech = Echelon(n * n)
    for m in mats:
        for row in _commutator_equations(m):
            ech.add(row)
    return ech.basis()


def nullspace(system: Basis) -> Basis:
    length = system.length
    pivset = set(system.pivots)
    vecs = []
    for f in range(length):
        if f in pivset:
            continue
        v = [ZERO] * length
        v[f] = ONE
        for row, p in zip(system.rows, system.pivots):
            if row[f].num:
                v[p] = -row[f]
        vecs.append(tuple(v))
    return rref(vecs, length)


def centralizer_of(mats: Sequence[Mat], n: int = 4) -> Basis:
    return nullspace(commutant_system(mats, n))


def centralizer(b: Basis, n: Optional[int] = None) -> Basis:
    """Basis of all matrices commuting with every element of span(b)."""
    if n is None:
        n = int(round(b.length ** 0.5))
    return centralizer_of(b.matrices(n), n)


def subspace_equal(a: Basis, b: Basis) -> bool:
    if a.length != b.length:
        raise DimensionError("ambient dimensions differ")
    return a.rows == b.rows and a.pivots == b.pivots


def contains(big: Basis, small: Basis) -> bool:
    return all(big.contains(r) for r in small.rows)


# ---------------------------------------------------------------------------
# patterns

Entry = Optional[ex.Expr]  # None = structural zero


@dataclass(frozen=True)
class Pattern:
    """Shape matrix whose entries are linear in named free symbols.

    ``symbols`` lists the named symbols; ``*`` entries were given fresh names
    ``_s1, _s2, ...`` in row-major order when the pattern was parsed.
    """

    n: int
    symbols: Tuple[str, ...]
    entries: Tuple[Tuple[Entry, ...], ...]
    source: Tuple[Tuple[str, ...], ...] = field(default=(), compare=False)

    @property
    def dimension_bound(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class KronPattern:
    """Span of ``kron(x, y)`` for x, y ranging over two 2x2 patterns.

    ``orientation`` is ``"ab"`` for kron(left, right) or ``"ba"`` for kron(right, left).
    """

    left: Pattern
    right: Pattern
    orientation: str = "ab"


@dataclass(frozen=True)
class ScalarsPattern:
    """The scalar matrices (tables write this as I = C)."""

    n: int = 4


AnyPattern = Union[Pattern, KronPattern, ScalarsPattern]


class PatternError(ValueError):
    pass


def parse_pattern(rows: Sequence[Sequence[str]], symbols: Sequence[str] = ()) -> Pattern:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise PatternError("pattern must be square")
    named = tuple(symbols)
    fresh: List[str] = []
    entries = []
    for r in rows:
        out_row: List[Entry] = []
        for text in r:
            t = text.strip()
            if t == "0":
                out_row.append(None)
            elif t == "*":
                name = f"_s{len(fresh) + 1}"
                fresh.append(name)
                out_row.append(ex.Param(name))
            else:
                out_row.append(ex.parse(t))
        entries.append(tuple(out_row))
    pat = Pattern(n, named + tuple(fresh), tuple(entries), tuple(tuple(r) for r in rows))
    used = set()
    for r in pat.entries:
        for e in r:
            if e is not None:
                used |= {k for _, k in _sym_terms(e, pat.symbols) if k is not None}
    unused = [s for s in named if s not in used]
    if unused:
        raise PatternError(f"declared pattern symbols never used: {unused}")
    return pat


def _sym_terms(node: ex.Expr, symbols: Sequence[str]):
    syms = set(symbols)
    return ex.linear_terms(node, lambda x: x.name if isinstance(x, ex.Param) and x.name in syms else None)


def pattern_matrices(p: Pattern, env: Mapping[str, Scalar]) -> List[Mat]:
    """One matrix per free symbol: that symbol set to 1, all others to 0."""
    per_sym: Dict[str, List[List[Scalar]]] = {s: [[ZERO] * p.n for _ in range(p.n)] for s in p.symbols}
    for i, r in enumerate(p.entries):
        for j, e in enumerate(r):
            if e is None:
                continue
            for coeff, key in _sym_terms(e, p.symbols):
                if key is None:
                    if ex.evaluate(coeff, env).is_zero():
                        continue
                    raise PatternError(f"entry ({i + 1},{j + 1}) has a term without a free symbol")
                grid = per_sym[key]
                grid[i][j] = grid[i][j] + ex.evaluate(coeff, env)
    return [Mat(per_sym[s]) for s in p.symbols]


def pattern_space(p: AnyPattern, env: Optional[Mapping[str, Scalar]] = None) -> Basis:
    env = env or {}
    if isinstance(p, ScalarsPattern):
        return rref([vectorize(Mat.identity(p.n))], p.n * p.n)
    if isinstance(p, KronPattern):
        xs = pattern_matrices(p.left, env)
        ys = pattern_matrices(p.right, env)
        if p.orientation == "ab":
            prods = [kron(x, y) for x in xs for y in ys]
        elif p.orientation == "ba":
            prods = [kron(y, x) for x in xs for y in ys]
        else:
            raise PatternError(f"unknown kron orientation {p.orientation!r}")
        return rref([vectorize(m) for m in prods], 16)
    return rref([vectorize(m) for m in pattern_matrices(p, env)], p.n * p.n)
