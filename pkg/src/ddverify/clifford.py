"""Dirac gamma matrices and the rank-16 certificate that C(1,3) spans M4."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Tuple

from .matd import Basis, Mat, SingularMatrixError, inverse, span_of, unit, vectorize
from .scalar import IMAG, ONE, ZERO, Scalar

METRIC = (1, -1, -1, -1)


class DegenerateSetError(ArithmeticError):
    """The 16 canonical products do not span M4."""


@dataclass(frozen=True)
class GammaSet:
    gammas: Tuple[Mat, Mat, Mat, Mat]
    metric: Tuple[int, int, int, int] = METRIC

    def __getitem__(self, mu: int) -> Mat:
        return self.gammas[mu]


def _block(top_right: List[List[Scalar]], bottom_left: List[List[Scalar]]) -> Mat:
    rows = [[ZERO] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            rows[i][j + 2] = top_right[i][j]
            rows[i + 2][j] = bottom_left[i][j]
    return Mat(rows)


def build_dirac() -> GammaSet:
    i = IMAG
    pauli = [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -i], [i, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
    g0 = Mat.diag([1, 1, -1, -1])
    gk = [_block(s, [[-x for x in r] for r in s]) for s in pauli]
    return GammaSet((g0, *gk))


def anticommutator(a: Mat, b: Mat) -> Mat:
    return a @ b + b @ a


def anticommutation_table(g: GammaSet) -> Dict[Tuple[int, int], bool]:
    """{γμ, γν} == 2 η_μν I for each of the 10 unordered pairs."""
    n = g[0].n
    out = {}
    for mu in range(4):
        for nu in range(mu, 4):
            eta = g.metric[mu] if mu == nu else 0
            out[(mu, nu)] = anticommutator(g[mu], g[nu]) == Mat.identity(n).scale(2 * eta)
    return out


def check_anticommutation(g: GammaSet) -> bool:
    return all(anticommutation_table(g).values())


def canonical_products(g: GammaSet) -> List[Tuple[str, Mat]]:
    """I, γμ, γμγν (μ<ν), γμγνγρ (μ<ν<ρ) and γ0γ1γ2γ3, labelled."""
    out = [("1", Mat.identity(g[0].n))]
    for k in range(1, 5):
        for idx in combinations(range(4), k):
            m = g[idx[0]]
            for j in idx[1:]:
                m = m @ g[j]
            out.append(("g" + "".join(map(str, idx)), m))
    return out


def clifford_basis(g: GammaSet) -> Basis:
    prods = [m for _, m in canonical_products(g)]
    b = span_of(prods, 4)
    if b.rank < 16:
        raise DegenerateSetError(f"the 16 gamma products span only {b.rank} dimensions")
    return b


def express_units(g: GammaSet) -> Dict[Tuple[int, int], List[Scalar]]:
    """Coordinates of every e(i,j) in the 16 canonical products, residual-checked."""
    prods = [m for _, m in canonical_products(g)]
    cols = [vectorize(m) for m in prods]
    a = Mat([[cols[k][r] for k in range(16)] for r in range(16)])
    try:
        a_inv = inverse(a)
    except SingularMatrixError as e:
        raise DegenerateSetError("the 16 gamma products are linearly dependent") from e
    out = {}
    for i in range(1, 5):
        for j in range(1, 5):
            target = vectorize(unit(i, j))
            coeffs = [sum((a_inv.rows[k][r] * target[r] for r in range(16) if target[r].num), ZERO)
                      for k in range(16)]
            recon = Mat.zero(4)
            for c, m in zip(coeffs, prods):
                if c.num:
                    recon = recon + m.scale(c)
            if recon != unit(i, j):
                raise DegenerateSetError(f"reconstruction of e({i},{j}) failed")
            out[(i, j)] = coeffs
    return out


def certificate(g: GammaSet) -> Dict[str, object]:
    """Summary used by the CLI: anticommutation table and product rank."""
    table = anticommutation_table(g)
    try:
        rank = clifford_basis(g).rank
    except DegenerateSetError:
        rank = span_of([m for _, m in canonical_products(g)], 4).rank
    ok = all(table.values()) and rank == 16
    return {
        "anticommutation": {f"{mu}{nu}": v for (mu, nu), v in sorted(table.items())},
        "rank": rank,
        "of": 16,
        "ok": ok,
    }
