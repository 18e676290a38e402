"""Machine-readable case corpus and deterministic parameter draws.

On disk the corpus is one JSON file per family, ``family-N/cases.json``.  See
``docs/corpus-format.md`` for the schema and the Greek-to-ASCII parameter names.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from . import expr as ex
from .algebra import AnyPattern, KronPattern, Pattern, ScalarsPattern, parse_pattern
from .scalar import Scalar

FORMAT_VERSION = 1
FAMILY_SIZES = {1: 8, 2: 15, 3: 20, 4: 8, 5: 4, 6: 7, 7: 18}
CORPUS_ENV_VAR = "DDVERIFY_CORPUS"
DEFAULT_SEED = 20260101
DEFAULT_DRAWS = 3
MATRIX_KEYS = ("c11", "c12", "c21", "c22")
CHECKS = ("relations", "invertibility", "dim_R", "dim_I", "R_pattern", "I_pattern",
          "perturbation", "det", "rank_instability")


class CorpusError(ValueError):
    def __init__(self, message: str, case_id: Optional[str] = None, path: Optional[str] = None):
        self.case_id = case_id
        self.path = path
        where = []
        if path:
            where.append(str(path))
        if case_id:
            where.append(f"case {case_id}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


class UnsatisfiableBranch(CorpusError):
    pass


@dataclass(frozen=True)
class Constraint:
    lhs: ex.Expr
    op: str  # "=" or "!="
    rhs: ex.Expr
    text: str

    @classmethod
    def parse(cls, text: str) -> "Constraint":
        if "!=" in text:
            left, right = text.split("!=", 1)
            op = "!="
        elif "=" in text:
            left, right = text.split("=", 1)
            op = "="
        else:
            raise ValueError(f"constraint needs '=' or '!=': {text!r}")
        return cls(ex.parse(left), op, ex.parse(right), text.strip())

    def holds(self, env: Dict[str, Scalar]) -> bool:
        a = ex.evaluate(self.lhs, env)
        b = ex.evaluate(self.rhs, env)
        return (a == b) if self.op == "=" else (a != b)


@dataclass(frozen=True)
class Branch:
    label: str
    constraints: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Erratum:
    id: str
    covers: Tuple[str, ...]
    note: str
    overlay: Dict[str, Any] = field(hash=False, compare=False, default_factory=dict)
    # checks the overlay cannot repair; acknowledged but still failing when corrected
    unresolved: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CaseSpec:
    id: str
    family: int
    d_expr: ex.MatExpr
    c11: ex.MatExpr
    c12: ex.MatExpr
    c21: ex.MatExpr
    c22: ex.MatExpr
    params: Tuple[str, ...]
    constraints: Tuple[str, ...]
    branches: Tuple[Branch, ...]
    expected_dim_R: int
    expected_dim_I: int
    R_pattern: Optional[AnyPattern]
    I_pattern: Optional[AnyPattern]
    perturbation: Optional[ex.MatExpr]  # None means "zero"
    errata: Tuple[Erratum, ...]
    notes: Tuple[str, ...]
    raw: Dict[str, Any] = field(hash=False, compare=False, default_factory=dict)
    header: Dict[str, Any] = field(hash=False, compare=False, default_factory=dict)

    @property
    def generators(self) -> Dict[str, ex.MatExpr]:
        return {"c11": self.c11, "c12": self.c12, "c21": self.c21, "c22": self.c22}

    @property
    def sort_key(self) -> Tuple[int, int]:
        return case_sort_key(self.id)


def case_sort_key(case_id: str) -> Tuple[int, int]:
    fam, _, idx = case_id.partition(".")
    return int(fam), int(idx)


# ---------------------------------------------------------------------------
# decoding


def _decode_pattern(obj: Any, where: str, case_id: str) -> Optional[AnyPattern]:
    if obj is None:
        return None
    if obj == "scalars":
        return ScalarsPattern(4)
    try:
        if isinstance(obj, dict) and "kron" in obj:
            left, right = obj["kron"]
            return KronPattern(_decode_grid(left), _decode_grid(right), obj.get("orientation", "ab"))
        if isinstance(obj, dict) and "rows" in obj:
            return _decode_grid(obj)
    except (ValueError, KeyError) as e:
        raise CorpusError(f"{where}: {e}", case_id) from e
    raise CorpusError(f"{where}: unrecognized pattern {obj!r}", case_id)


def _decode_grid(obj: Dict[str, Any]) -> Pattern:
    rows = [[x.strip() for x in r.split(",")] for r in obj["rows"]]
    return parse_pattern(rows, obj.get("symbols", ()))


def _decode_case(obj: Dict[str, Any], family: Dict[str, Any], path: str) -> CaseSpec:
    cid = obj.get("id")
    if not isinstance(cid, str):
        raise CorpusError("case without an id", path=path)
    try:
        mats = {k: ex.parse_matrix(obj[k]) for k in MATRIX_KEYS}
        d_expr = ex.parse_matrix(family["d"])
        pert_text = obj["expected"]["perturbation"]
        pert = None if pert_text == "zero" else ex.parse_matrix(pert_text)
    except ex.ExprSyntaxError as e:
        raise CorpusError(str(e), cid, path) from e
    except KeyError as e:
        raise CorpusError(f"missing field {e}", cid, path) from e
    params = tuple(p["name"] for p in family.get("params", [])) + tuple(p["name"] for p in obj.get("params", []))
    branches = tuple(Branch(b["label"], tuple(b.get("constraints", []))) for b in obj.get("branches", []))
    if not branches:
        branches = (Branch("generic"),)
    exp = obj["expected"]
    errata = tuple(
        Erratum(e["id"], tuple(e["covers"]), e["note"], e.get("overlay", {}), tuple(e.get("unresolved", ())))
        for e in obj.get("errata", [])
    )
    return CaseSpec(
        id=cid,
        family=int(family["family"]),
        d_expr=d_expr,
        params=params,
        constraints=tuple(family.get("constraints", [])) + tuple(obj.get("constraints", [])),
        branches=branches,
        expected_dim_R=int(exp["dim_R"]),
        expected_dim_I=int(exp["dim_I"]),
        R_pattern=_decode_pattern(exp.get("R_pattern"), "R_pattern", cid),
        I_pattern=_decode_pattern(exp.get("I_pattern"), "I_pattern", cid),
        perturbation=pert,
        errata=errata,
        notes=tuple(obj.get("notes", [])),
        raw=obj,
        header={k: v for k, v in family.items() if k != "cases"},
        **mats,
    )


def _validate_case(case: CaseSpec, path: str) -> None:
    declared = set(case.params)
    if len(declared) != len(case.params):
        raise CorpusError("duplicate parameter declaration", case.id, path)
    used = set()
    for m in list(case.generators.values()) + [case.d_expr]:
        used |= m.params()
    if case.perturbation is not None:
        used |= case.perturbation.params()
    undeclared = used - declared
    if undeclared:
        raise CorpusError(f"undeclared parameters {sorted(undeclared)}", case.id, path)
    for text in case.constraints + tuple(c for b in case.branches for c in b.constraints):
        try:
            con = Constraint.parse(text)
        except (ValueError, ex.ExprSyntaxError) as e:
            raise CorpusError(f"bad constraint {text!r}: {e}", case.id, path) from e
        extra = (ex.params_of(con.lhs) | ex.params_of(con.rhs)) - declared
        if extra:
            raise CorpusError(f"constraint {text!r} uses undeclared {sorted(extra)}", case.id, path)
    for e in case.errata:
        bad = [c for c in e.covers + e.unresolved if c not in CHECKS]
        if bad:
            raise CorpusError(f"erratum {e.id} covers unknown checks {bad}", case.id, path)
    fam = case.id.split(".")[0]
    if not fam.isdigit() or int(fam) != case.family:
        raise CorpusError(f"id does not match family {case.family}", case.id, path)


def decode_family(doc: Dict[str, Any], path: str = "<memory>") -> List[CaseSpec]:
    if doc.get("format") != FORMAT_VERSION:
        raise CorpusError(f"unsupported corpus format {doc.get('format')!r}", path=path)
    cases = [_decode_case(c, doc, path) for c in doc.get("cases", [])]
    for c in cases:
        _validate_case(c, path)
    return cases


def default_corpus_dir() -> Path:
    env = os.environ.get(CORPUS_ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("ddverify").joinpath("data/corpus")))


def family_files(root: Union[str, Path]) -> List[Path]:
    root = Path(root)
    files = sorted(root.glob("family-*/cases.json"), key=lambda p: int(p.parent.name.split("-")[1]))
    if not files:
        raise CorpusError(f"no family-N/cases.json files under {root}")
    return files


def load(path: Optional[Union[str, Path]] = None, *, require_complete: bool = True) -> List[CaseSpec]:
    """Load and validate a corpus directory (or a single family file)."""
    root = Path(path) if path is not None else default_corpus_dir()
    files = [root] if root.is_file() else family_files(root)
    cases: List[CaseSpec] = []
    for f in files:
        try:
            doc = json.loads(f.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise CorpusError(f"JSON error at line {e.lineno} column {e.colno}: {e.msg}", path=str(f)) from e
        cases.extend(decode_family(doc, str(f)))
    ids = [c.id for c in cases]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise CorpusError(f"duplicate case ids {dupes}", dupes[0])
    if require_complete and not root.is_file():
        if len(cases) != sum(FAMILY_SIZES.values()):
            raise CorpusError(f"expected {sum(FAMILY_SIZES.values())} cases, found {len(cases)}")
        for fam, size in FAMILY_SIZES.items():
            n = sum(1 for c in cases if c.family == fam)
            if n != size:
                raise CorpusError(f"family {fam} has {n} cases, expected {size}")
    return sorted(cases, key=lambda c: c.sort_key)


def dumps_family(doc: Dict[str, Any]) -> str:
    """Canonical serialization used for the shipped files."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def save(cases: Sequence[CaseSpec], root: Union[str, Path]) -> List[Path]:
    """Write the family files that ``cases`` came from, in canonical form."""
    root = Path(root)
    written = []
    by_family: Dict[int, List[CaseSpec]] = {}
    for c in sorted(cases, key=lambda c: c.sort_key):
        by_family.setdefault(c.family, []).append(c)
    for fam, members in sorted(by_family.items()):
        doc = dict(members[0].header)
        doc["cases"] = [m.raw for m in members]
        out = root / f"family-{fam}" / "cases.json"
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(dumps_family(doc), encoding="utf-8")
        written.append(out)
    return written


# ---------------------------------------------------------------------------
# errata overlays


def apply_errata(case: CaseSpec, errata: Optional[Sequence[Erratum]] = None) -> CaseSpec:
    """Return ``case`` with the overlays of ``errata`` (default: all of them) applied."""
    errata = case.errata if errata is None else errata
    if not errata:
        return case
    raw = copy.deepcopy(case.raw)
    for e in errata:
        ov = e.overlay
        for k in MATRIX_KEYS:
            if k in ov:
                raw[k] = ov[k]
        if "set_constraints" in ov:
            raw["constraints"] = list(ov["set_constraints"])
        if "constraints" in ov:
            raw["constraints"] = list(raw.get("constraints", [])) + list(ov["constraints"])
        if "branches" in ov:
            raw["branches"] = ov["branches"]
        if "expected" in ov:
            raw["expected"] = {**raw["expected"], **ov["expected"]}
    raw["errata"] = []
    (out,) = decode_family({**case.header, "cases": [raw]}, f"errata overlay of {case.id}")
    return replace(out, errata=case.errata)


# ---------------------------------------------------------------------------
# parameter draws


@dataclass(frozen=True)
class DrawPlan:
    seed: int = DEFAULT_SEED
    draws: int = DEFAULT_DRAWS
    numerators: Tuple[int, ...] = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
    denominators: Tuple[int, ...] = (1, 1, 2, 3, 5, 7)
    max_attempts: int = 200


def _rng(seed: int, case_id: str, branch: int, draw: int) -> random.Random:
    h = hashlib.sha256(f"{seed}:{case_id}:{branch}:{draw}".encode()).digest()
    return random.Random(int.from_bytes(h[:8], "big"))


def _draw_value(rng: random.Random, plan: DrawPlan) -> Fraction:
    while True:
        num = rng.choice(plan.numerators)
        den = rng.choice(plan.denominators)
        v = Fraction(num, den)
        if abs(v) != 1:
            return v if rng.random() < 0.5 else -v


def _generic_ok(v: Fraction, taken: List[Fraction]) -> bool:
    a = abs(v)
    return all(a != abs(t) and a != 1 / abs(t) for t in taken)


def branch_constraints(case: CaseSpec, branch: int) -> List[Constraint]:
    if not (0 <= branch < len(case.branches)):
        raise IndexError(f"case {case.id} has no branch {branch}")
    texts = list(case.constraints) + list(case.branches[branch].constraints)
    return [Constraint.parse(t) for t in texts]


def assign_params(case: CaseSpec, branch: int = 0, seed: int = DEFAULT_SEED, draw: int = 0,
                  plan: Optional[DrawPlan] = None) -> Dict[str, Scalar]:
    """Deterministic parameter environment for one (case, branch, draw).

    Equalities ``name = expr`` define ``name`` from the other parameters (values
    may therefore carry powers of q); every remaining parameter gets a distinct,
    multiplicatively unrelated nonzero rational.  Inequalities are checked and the
    draw is repeated until they all hold.
    """
    plan = plan or DrawPlan(seed=seed)
    cons = branch_constraints(case, branch)
    defs: List[Tuple[str, ex.Expr]] = []
    checks: List[Constraint] = []
    for c in cons:
        if c.op == "=" and isinstance(c.lhs, ex.Param) and c.lhs.name not in [d for d, _ in defs]:
            defs.append((c.lhs.name, c.rhs))
        else:
            checks.append(c)
    defined = {d for d, _ in defs}
    free = [p for p in case.params if p not in defined]
    rng = _rng(seed, case.id, branch, draw)
    for _ in range(plan.max_attempts):
        taken: List[Fraction] = []
        env: Dict[str, Scalar] = {}
        for p in free:
            v = _draw_value(rng, plan)
            while not _generic_ok(v, taken):
                v = _draw_value(rng, plan)
            taken.append(v)
            env[p] = Scalar.const(v)
        try:
            pending = list(defs)
            while pending:
                progressed = False
                for item in list(pending):
                    name, rhs = item
                    if ex.params_of(rhs) <= env.keys():
                        env[name] = ex.evaluate(rhs, env)
                        pending.remove(item)
                        progressed = True
                if not progressed:
                    raise UnsatisfiableBranch(f"circular definitions {[n for n, _ in pending]}", case.id)
            if any(v.is_zero() for v in env.values()):
                continue
            if all(c.holds(env) for c in cons):
                return dict(sorted(env.items()))
        except ZeroDivisionError:
            continue
    raise UnsatisfiableBranch(f"no admissible draw for branch {branch}", case.id)


def env_to_text(env: Dict[str, Scalar]) -> Dict[str, str]:
    return {k: str(v) for k, v in sorted(env.items())}
