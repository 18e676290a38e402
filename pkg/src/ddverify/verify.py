"""Per-case verification and whole-corpus table reproduction.

Every expected-vs-computed mismatch becomes a :class:`Discrepancy` record; nothing
here raises on a failed check.  A discrepancy is *explained* when the case
carries an erratum covering that check, and (in errata mode) re-running the case
with the erratum overlays applied comes back clean apart from checks the erratum
lists as unresolved.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import expr as ex
from .algebra import centralizer, centralizer_of, pattern_space, subspace_equal, unital_closure
from .corpus import CaseSpec, DrawPlan, apply_errata, assign_params, env_to_text
from .matd import Mat, SingularMatrixError, inverse
from .presentation import Relation, check_all, load_relations

REPORT_SCHEMA = "ddverify.report/1"


@dataclass
class Discrepancy:
    check: str
    branch: int
    draws: List[int]
    expected: Any
    computed: Any
    detail: str = ""
    explained: bool = False


@dataclass
class DrawResult:
    draw: int
    env: Dict[str, str]
    relations: Dict[str, bool]
    invertible: bool
    dim_R: int
    dim_I: int
    I_equals_generator_centralizer: bool
    R_pattern_match: Optional[bool]
    I_pattern_match: Optional[bool]
    perturbation: str
    perturbation_match: bool
    det: str
    det_match: bool


@dataclass
class BranchResult:
    index: int
    label: str
    constraints: List[str]
    draws: List[DrawResult]


@dataclass
class VerificationReport:
    case_id: str
    family: int
    branches: List[BranchResult]
    expected_dim_R: int
    expected_dim_I: int
    computed_dim_R: Optional[int]
    computed_dim_I: Optional[int]
    relation_status: Dict[str, bool]
    R_pattern_match: Optional[bool]
    I_pattern_match: Optional[bool]
    perturbation_expected: str
    perturbation_computed: str
    perturbation_match: bool
    det_check: Dict[str, Any]
    invertibility: bool
    discrepancies: List[Discrepancy]
    errata: List[Dict[str, Any]] = field(default_factory=list)
    corrected: Optional["VerificationReport"] = None

    @property
    def unexplained(self) -> List[Discrepancy]:
        return [d for d in self.discrepancies if not d.explained]

    @property
    def status(self) -> str:
        if not self.discrepancies:
            return "ok"
        return "unexplained" if self.unexplained else "explained"

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["status"] = self.status
        if self.corrected is not None:
            d["corrected"] = self.corrected.to_dict()
        return d


def generators(case: CaseSpec, env) -> Dict[str, Mat]:
    return {k: ex.eval_matrix(m, env) for k, m in case.generators.items()}


def det_check(case: CaseSpec, env) -> Tuple[Mat, bool]:
    """C11*C22 - C12*C21 compared with the family's d matrix.

    The tables never define d; this tests the hypothesis that it is the image of
    the quantum determinant.
    """
    g = generators(case, env)
    det = g["c11"] @ g["c22"] - g["c12"] @ g["c21"]
    return det, det == ex.eval_matrix(case.d_expr, env)


def _invertible(m: Mat) -> bool:
    try:
        return inverse(m) @ m == Mat.identity(m.n)
    except SingularMatrixError:
        return False


def _verify_draw(case: CaseSpec, env, draw: int, rels: List[Relation]) -> DrawResult:
    g = generators(case, env)
    gens = [g["c11"], g["c12"], g["c21"], g["c22"]]
    rel = {name: ok for name, _, ok in check_all(g, env, rels)}
    R = unital_closure(gens)
    I = centralizer(R, 4)
    I_gen = centralizer_of(gens, 4)
    r_match = None if case.R_pattern is None else subspace_equal(R, pattern_space(case.R_pattern, env))
    i_match = None if case.I_pattern is None else subspace_equal(I, pattern_space(case.I_pattern, env))
    pert = g["c12"] @ g["c21"]
    pert_expected = Mat.zero(4) if case.perturbation is None else ex.eval_matrix(case.perturbation, env)
    det, det_ok = det_check(case, env)
    return DrawResult(
        draw=draw,
        env=env_to_text(env),
        relations=rel,
        invertible=_invertible(g["c11"]) and _invertible(g["c22"]),
        dim_R=R.rank,
        dim_I=I.rank,
        I_equals_generator_centralizer=subspace_equal(I, I_gen),
        R_pattern_match=r_match,
        I_pattern_match=i_match,
        perturbation=pert.to_text(),
        perturbation_match=pert == pert_expected,
        det=det.to_text(),
        det_match=det_ok,
    )


def _all_or_none(vals: Sequence[Optional[bool]]) -> Optional[bool]:
    if any(v is None for v in vals):
        return None
    return all(vals)


def _run(case: CaseSpec, plan: DrawPlan, rels: List[Relation]) -> VerificationReport:
    branches: List[BranchResult] = []
    disc: List[Discrepancy] = []

    def add(check, b, draws, expected, computed, detail=""):
        disc.append(Discrepancy(check, b, list(draws), expected, computed, detail))

    for b, br in enumerate(case.branches):
        results = []
        for k in range(plan.draws):
            env = assign_params(case, b, plan.seed, k, plan)
            results.append(_verify_draw(case, env, k, rels))
        branches.append(BranchResult(b, br.label, list(br.constraints), results))

        bad_rel = sorted({n for r in results for n, ok in r.relations.items() if not ok})
        if bad_rel:
            add("relations", b, [r.draw for r in results if not all(r.relations.values())],
                "all zero", bad_rel, "nonzero residual for " + ", ".join(bad_rel))
        bad_inv = [r.draw for r in results if not r.invertible]
        if bad_inv:
            add("invertibility", b, bad_inv, True, False, "C11 or C22 singular")
        for key, expected in (("dim_R", case.expected_dim_R), ("dim_I", case.expected_dim_I)):
            vals = sorted({getattr(r, key) for r in results})
            if len(vals) > 1:
                add("rank_instability", b, [r.draw for r in results], "constant", vals, f"{key} varies across draws")
            wrong = [r.draw for r in results if getattr(r, key) != expected]
            if wrong:
                add(key, b, wrong, expected, vals if len(vals) > 1 else vals[0])
        for key, attr in (("R_pattern", "R_pattern_match"), ("I_pattern", "I_pattern_match")):
            wrong = [r.draw for r in results if getattr(r, attr) is False]
            if wrong:
                add(key, b, wrong, "equal", "different", f"computed subspace differs from the printed {key}")
        wrong = [r.draw for r in results if not r.perturbation_match]
        if wrong:
            exp_txt = "zero" if case.perturbation is None else case.perturbation.to_text()
            add("perturbation", b, wrong, exp_txt, results[wrong[0]].perturbation)
        wrong = [r.draw for r in results if not r.det_match]
        if wrong:
            add("det", b, wrong, case.d_expr.to_text(), results[wrong[0]].det,
                "C11*C22 - C12*C21 differs from d")

    every = [r for br in branches for r in br.draws]
    dims_R = {r.dim_R for r in every}
    dims_I = {r.dim_I for r in every}
    first = every[0]
    return VerificationReport(
        case_id=case.id,
        family=case.family,
        branches=branches,
        expected_dim_R=case.expected_dim_R,
        expected_dim_I=case.expected_dim_I,
        computed_dim_R=dims_R.pop() if len(dims_R) == 1 else None,
        computed_dim_I=dims_I.pop() if len(dims_I) == 1 else None,
        relation_status={n: all(r.relations[n] for r in every) for n in first.relations},
        R_pattern_match=_all_or_none([r.R_pattern_match for r in every]),
        I_pattern_match=_all_or_none([r.I_pattern_match for r in every]),
        perturbation_expected="zero" if case.perturbation is None else case.perturbation.to_text(),
        perturbation_computed=first.perturbation,
        perturbation_match=all(r.perturbation_match for r in every),
        det_check={"computed": first.det, "equals_d": all(r.det_match for r in every)},
        invertibility=all(r.invertible for r in every),
        discrepancies=disc,
    )


def verify_case(case: CaseSpec, plan: Optional[DrawPlan] = None, *, errata: bool = False,
                relations: Optional[List[Relation]] = None) -> VerificationReport:
    """Verify one case as printed; with ``errata`` also re-run it corrected."""
    plan = plan or DrawPlan()
    rels = load_relations() if relations is None else relations
    report = _run(case, plan, rels)
    covered = {c for e in case.errata for c in e.covers}
    allowed = {c for e in case.errata for c in e.unresolved}
    resolved = True
    if errata and case.errata:
        report.corrected = _run(apply_errata(case), plan, rels)
        resolved = all(d.check in allowed for d in report.corrected.discrepancies)
    for d in report.discrepancies:
        d.explained = d.check in covered and resolved
    report.errata = [
        {"id": e.id, "covers": list(e.covers), "unresolved": list(e.unresolved), "note": e.note,
         "resolved": (resolved if errata else None)}
        for e in case.errata
    ]
    return report


def _verify_job(args):
    case, plan, errata, rels = args
    return verify_case(case, plan, errata=errata, relations=rels)


def verify_all(cases: Sequence[CaseSpec], plan: Optional[DrawPlan] = None, *, errata: bool = False,
               jobs: int = 1, relations: Optional[List[Relation]] = None) -> List[VerificationReport]:
    plan = plan or DrawPlan()
    rels = load_relations() if relations is None else relations
    ordered = sorted(cases, key=lambda c: c.sort_key)
    work = [(c, plan, errata, rels) for c in ordered]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_verify_job, work))
    else:
        reports = [_verify_job(w) for w in work]
    return reports


# ---------------------------------------------------------------------------
# summaries


def summary_rows(reports: Sequence[VerificationReport]) -> List[Dict[str, Any]]:
    rows = []
    for r in reports:
        rows.append({
            "id": r.case_id,
            "dim_R_expected": r.expected_dim_R,
            "dim_R_computed": r.computed_dim_R,
            "dim_I_expected": r.expected_dim_I,
            "dim_I_computed": r.computed_dim_I,
            "perturbation": r.perturbation_computed if r.perturbation_computed != "0" else "zero",
            "discrepancies": len(r.discrepancies),
            "unexplained": len(r.unexplained),
            "status": r.status,
        })
    return rows


def report_document(reports: Sequence[VerificationReport], plan: DrawPlan, errata: bool,
                    relations_name: str = "dipper-donkin-gl2") -> Dict[str, Any]:
    rows = summary_rows(reports)
    return {
        "schema": REPORT_SCHEMA,
        "seed": plan.seed,
        "draws": plan.draws,
        "errata": errata,
        "relations": relations_name,
        "cases": [r.to_dict() for r in reports],
        "summary": {
            "cases": len(reports),
            "ok": sum(1 for r in reports if r.status == "ok"),
            "explained": sum(1 for r in reports if r.status == "explained"),
            "unexplained": sum(1 for r in reports if r.status == "unexplained"),
            "rows": rows,
        },
    }


def exit_status(reports: Sequence[VerificationReport]) -> int:
    return 1 if any(r.unexplained for r in reports) else 0


def format_table(reports: Sequence[VerificationReport]) -> str:
    head = f"{'case':<6} {'dimR exp/got':>13} {'dimI exp/got':>13}  {'perturbation':<16} {'disc':>4}  status"
    lines = [head, "-" * len(head)]
    for row in summary_rows(reports):
        dr = f"{row['dim_R_expected']}/{_d(row['dim_R_computed'])}"
        di = f"{row['dim_I_expected']}/{_d(row['dim_I_computed'])}"
        lines.append(f"{row['id']:<6} {dr:>13} {di:>13}  {row['perturbation']:<16} {row['discrepancies']:>4}  {row['status']}")
    return "\n".join(lines)


def _d(v: Optional[int]) -> str:
    return "?" if v is None else str(v)
