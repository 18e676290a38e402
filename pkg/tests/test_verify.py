import pytest

from ddverify import verify
from ddverify.corpus import DrawPlan, assign_params
from ddverify.matd import Mat
from ddverify.scalar import Q


@pytest.fixture(scope="module")
def reports(cases):
    return verify.verify_all(cases)


@pytest.fixture(scope="module")
def corrected(cases):
    return verify.verify_all(cases, errata=True)


def _get(reports, cid):
    return next(r for r in reports if r.case_id == cid)


def test_case_1_1(reports):
    r = _get(reports, "1.1")
    assert all(r.relation_status.values())
    assert r.perturbation_match and r.perturbation_computed == "0"
    assert r.det_check["equals_d"]
    # printed 8 and 1; both carried by erratum 1.1-a
    assert (r.computed_dim_R, r.computed_dim_I) == (6, 3)
    assert {d.check for d in r.discrepancies} == {"dim_R", "dim_I", "R_pattern", "I_pattern"}
    assert all(d.explained for d in r.discrepancies)


def test_case_2_2(reports):
    r = _get(reports, "2.2")
    assert (r.computed_dim_R, r.computed_dim_I) == (9, 1)
    assert r.perturbation_match
    assert r.det_check["equals_d"]
    assert r.det_check["computed"] == "q^2*e(1,1) + q*e(2,2) + q*e(3,3) + e(4,4)"


def test_case_6_1_det_mismatch_and_repair(by_id):
    r = verify.verify_case(by_id["6.1"], errata=True)
    det = [d for d in r.discrepancies if d.check == "det"]
    assert det and det[0].explained
    assert r.corrected is not None and not r.corrected.discrepancies


def test_det_check_examples(by_id):
    c = by_id["1.3"]
    det, ok = verify.det_check(c, assign_params(c))
    assert ok and det == Mat.diag([Q * Q, Q, 1, 1])
    c = by_id["2.8"]
    det, ok = verify.det_check(c, assign_params(c))
    assert ok and det == Mat.diag([Q * Q, Q, Q, 1])
    c = by_id["7.17"]
    det, ok = verify.det_check(c, assign_params(c))
    assert ok


def test_eighty_rows(reports):
    assert len(reports) == 80
    assert [r.case_id for r in reports][:3] == ["1.1", "1.2", "1.3"]
    rows = verify.summary_rows(reports)
    nonzero = sorted(row["id"] for row in rows if row["perturbation"] != "zero")
    assert nonzero == ["2.11", "2.2", "2.8"]


def test_report_invariants(reports):
    for r in reports:
        for br in r.branches:
            dims = {(d.dim_R, d.dim_I) for d in br.draws}
            assert len(dims) == 1, r.case_id
            for d in br.draws:
                assert d.dim_I >= 1
                assert d.I_equals_generator_centralizer
                assert d.invertible


def test_no_unexplained_discrepancies(reports, corrected):
    assert verify.exit_status(reports) == 0
    assert verify.exit_status(corrected) == 0


def test_corrected_runs_clean_except_unresolved(corrected):
    for r in corrected:
        if r.corrected is None:
            continue
        allowed = {c for e in r.errata for c in e["unresolved"]}
        left = {d.check for d in r.corrected.discrepancies}
        assert left <= allowed, r.case_id


def test_uncovered_discrepancy_is_unexplained(by_id):
    from dataclasses import replace
    case = replace(by_id["1.8"], expected_dim_R=99)
    r = verify.verify_case(case)
    assert r.status == "unexplained"
    assert verify.exit_status([r]) == 1


def test_rank_instability_recorded(by_id, monkeypatch):
    calls = {"n": 0}
    real = verify.unital_closure

    def flaky(gens):
        calls["n"] += 1
        if calls["n"] == 2:
            return real(gens[:1])
        return real(gens)

    monkeypatch.setattr(verify, "unital_closure", flaky)
    r = verify.verify_case(by_id["1.8"])
    assert any(d.check == "rank_instability" for d in r.discrepancies)


def test_parallel_matches_serial(cases):
    subset = [c for c in cases if c.family == 5]
    a = verify.report_document(verify.verify_all(subset), DrawPlan(), False)
    b = verify.report_document(verify.verify_all(subset, jobs=2), DrawPlan(), False)
    assert a == b


def test_json_document_shape(reports):
    doc = verify.report_document(reports, DrawPlan(), False)
    assert doc["schema"] == verify.REPORT_SCHEMA
    assert doc["seed"] == 20260101 and doc["summary"]["cases"] == 80
    rec = doc["cases"][0]
    for key in ("case_id", "relation_status", "computed_dim_R", "computed_dim_I", "R_pattern_match",
                "I_pattern_match", "perturbation_computed", "perturbation_match", "det_check",
                "invertibility", "discrepancies", "status"):
        assert key in rec
