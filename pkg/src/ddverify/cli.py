"""Command-line front end: ``ddverify verify | table | clifford-check``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from . import __version__
from .clifford import GammaSet, build_dirac, certificate
from .corpus import CORPUS_ENV_VAR, DEFAULT_DRAWS, DEFAULT_SEED, CaseSpec, CorpusError, DrawPlan, load
from .presentation import DEFAULT_RELATIONS, RelationFormatError, flip_convention, load_relations
from .verify import VerificationReport, exit_status, format_table, report_document, verify_all

EXIT_OK, EXIT_DISCREPANCY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", help=f"corpus directory (default: ${CORPUS_ENV_VAR} or the shipped corpus)")
    p.add_argument("--draws", type=int, default=DEFAULT_DRAWS, help="parameter draws per branch (default %(default)s)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="draw seed (default %(default)s)")
    p.add_argument("--errata", choices=("on", "off"), default="off",
                   help="also run every case with its errata overlays applied")
    p.add_argument("--relations", help="relation file to check against (default: shipped set)")
    p.add_argument("--flip-q", action="store_true", help="replace q by 1/q in the relations")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddverify", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify cases and report discrepancies")
    sel = v.add_mutually_exclusive_group(required=True)
    sel.add_argument("--case", action="append", help="case id such as 2.2 (repeatable)")
    sel.add_argument("--family", type=int, help="all cases of one family")
    sel.add_argument("--all", action="store_true", help="every case")
    v.add_argument("--branch", type=int, help="restrict to one branch index")
    _corpus_args(v)

    t = sub.add_parser("table", help="print the dim R / dim I / perturbation table")
    t.add_argument("--family", type=int)
    _corpus_args(t)

    c = sub.add_parser("clifford-check", help="certify that the Dirac gammas generate M4")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--output")
    # test hook: overwrite gamma^k with gamma^0 to exercise the failure path
    c.add_argument("--corrupt", type=int, choices=(1, 2, 3), help=argparse.SUPPRESS)
    return parser


# ---------------------------------------------------------------------------


def _load_cases(args) -> List[CaseSpec]:
    path = args.corpus or os.environ.get(CORPUS_ENV_VAR)
    try:
        cases = load(path)
    except (CorpusError, OSError) as e:
        raise UsageError(f"cannot load corpus: {e}") from e
    return cases


def _select(cases: List[CaseSpec], args) -> List[CaseSpec]:
    if getattr(args, "case", None):
        by_id = {c.id: c for c in cases}
        unknown = [i for i in args.case if i not in by_id]
        if unknown:
            raise UsageError(f"unknown case id(s): {', '.join(unknown)}")
        chosen = [by_id[i] for i in dict.fromkeys(args.case)]
    elif getattr(args, "family", None) is not None:
        chosen = [c for c in cases if c.family == args.family]
        if not chosen:
            raise UsageError(f"no cases in family {args.family}")
    else:
        chosen = list(cases)
    branch = getattr(args, "branch", None)
    if branch is not None:
        out = []
        for c in chosen:
            if not 0 <= branch < len(c.branches):
                raise UsageError(f"case {c.id} has {len(c.branches)} branch(es); no branch {branch}")
            out.append(replace(c, branches=(c.branches[branch],)))
        chosen = out
    return chosen


def _relations(args):
    try:
        rels = load_relations(args.relations)
    except (RelationFormatError, OSError) as e:
        raise UsageError(f"cannot load relations: {e}") from e
    name = Path(args.relations).name if args.relations else DEFAULT_RELATIONS
    if args.flip_q:
        rels, name = flip_convention(rels), name + " (q -> 1/q)"
    return rels, name


def _plan(args) -> DrawPlan:
    if args.draws < 1:
        raise UsageError("--draws must be at least 1")
    return DrawPlan(seed=args.seed, draws=args.draws)


def _emit(text: str, args, stdout: TextIO) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _header(plan: DrawPlan, errata: bool, rel_name: str) -> str:
    return f"# seed {plan.seed}  draws {plan.draws}  errata {'on' if errata else 'off'}  relations {rel_name}"


def _case_text(r: VerificationReport) -> List[str]:
    lines = [f"CASE {r.case_id}  [{r.status}]"]
    bad = [n for n, ok in r.relation_status.items() if not ok]
    lines.append("  relations: " + ("all zero" if not bad else "nonzero " + ", ".join(bad)))
    lines.append(f"  dim R {r.computed_dim_R} (expected {r.expected_dim_R})   "
                 f"dim I {r.computed_dim_I} (expected {r.expected_dim_I})")
    lines.append(f"  perturbation C12*C21 = {r.perturbation_computed}"
                 f" ({'matches' if r.perturbation_match else 'expected ' + r.perturbation_expected})")
    lines.append(f"  C11*C22 - C12*C21 = {r.det_check['computed']}"
                 f" ({'= d' if r.det_check['equals_d'] else 'differs from d'})")
    if not r.invertibility:
        lines.append("  C11 or C22 singular")
    for d in r.discrepancies:
        tag = "explained" if d.explained else "UNEXPLAINED"
        lines.append(f"  - {d.check} (branch {d.branch}, draws {d.draws}): expected {d.expected}, "
                     f"got {d.computed} [{tag}]")
    for e in r.errata:
        state = "" if e["resolved"] is None else ("  resolved" if e["resolved"] else "  NOT resolved")
        lines.append(f"  erratum {e['id']} covers {', '.join(e['covers'])}{state}")
        lines.append(f"    {e['note']}")
    if r.corrected is not None:
        left = [f"{d.check}" for d in r.corrected.discrepancies]
        lines.append("  corrected run: " + ("clean" if not left else "still failing " + ", ".join(sorted(set(left)))))
    return lines


def cmd_verify(args, stdout: TextIO) -> int:
    cases = _select(_load_cases(args), args)
    rels, rel_name = _relations(args)
    plan = _plan(args)
    errata = args.errata == "on"
    reports = verify_all(cases, plan, errata=errata, jobs=args.jobs, relations=rels)
    if args.format == "json":
        _emit(_dumps(report_document(reports, plan, errata, rel_name)), args, stdout)
    else:
        out = [_header(plan, errata, rel_name)]
        if len(reports) > 1:
            out += [format_table(reports), ""]
        for r in reports:
            if len(reports) == 1 or r.discrepancies:
                out += _case_text(r)
        unexplained = sum(len(r.unexplained) for r in reports)
        out.append(f"{len(reports)} case(s), {unexplained} unexplained discrepancies")
        _emit("\n".join(out) + "\n", args, stdout)
    return exit_status(reports)


def cmd_table(args, stdout: TextIO) -> int:
    cases = _select(_load_cases(args), args)
    rels, rel_name = _relations(args)
    plan = _plan(args)
    errata = args.errata == "on"
    reports = verify_all(cases, plan, errata=errata, jobs=args.jobs, relations=rels)
    if args.format == "json":
        doc = report_document(reports, plan, errata, rel_name)
        _emit(_dumps({k: doc[k] for k in ("schema", "seed", "draws", "errata", "relations")}
                     | {"rows": doc["summary"]["rows"]}), args, stdout)
    else:
        _emit(_header(plan, errata, rel_name) + "\n" + format_table(reports) + "\n", args, stdout)
    return exit_status(reports)


def cmd_clifford_check(args, stdout: TextIO, gammas: Optional[GammaSet] = None) -> int:
    g = gammas or build_dirac()
    if args.corrupt:
        gs = list(g.gammas)
        gs[args.corrupt] = gs[0]
        g = GammaSet(tuple(gs), g.metric)
    cert = certificate(g)
    if args.format == "json":
        _emit(_dumps(cert), args, stdout)
    else:
        lines = ["anticommutation {g_mu, g_nu} = 2 eta_mu_nu:"]
        for pair, ok in cert["anticommutation"].items():
            lines.append(f"  ({pair[0]},{pair[1]}) {'ok' if ok else 'FAIL'}")
        lines.append(f"rank {cert['rank']} / {cert['of']}")
        lines.append("C(1,3) = M4: " + ("certified" if cert["ok"] else "NOT certified"))
        _emit("\n".join(lines) + "\n", args, stdout)
    return EXIT_OK if cert["ok"] else EXIT_DISCREPANCY


COMMANDS = {"verify": cmd_verify, "table": cmd_table, "clifford-check": cmd_clifford_check}


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
         stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, stdout)
    except UsageError as e:
        print(f"ddverify: error: {e}", file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
