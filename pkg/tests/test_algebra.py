import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddverify.algebra import (KronPattern, PatternError, ScalarsPattern, centralizer, centralizer_of,
                              commutant_system, contains, parse_pattern, pattern_space, subspace_equal,
                              unital_closure)
from ddverify.corpus import apply_errata, assign_params
from ddverify.matd import Mat, span_of, unit, vectorize
from ddverify.scalar import Q, Scalar
from ddverify.verify import generators

from strategies import matrices

I4 = Mat.identity(4)
ALL_UNITS = span_of([unit(i, j) for i in range(1, 5) for j in range(1, 5)])


def _gens(case, branch=0, draw=0):
    g = generators(case, assign_params(case, branch, draw=draw))
    return [g["c11"], g["c12"], g["c21"], g["c22"]]


def test_closure_of_single_unit():
    b = unital_closure([unit(1, 2)])
    assert b.rank == 2
    assert subspace_equal(b, span_of([I4, unit(1, 2)]))


def test_closure_case_2_7(by_id):
    assert unital_closure(_gens(by_id["2.7"])).rank == 3


def test_closure_case_1_1_is_six(by_id):
    # the table prints 8; the algebra is 6-dimensional (carried as erratum 1.1-a)
    assert unital_closure(_gens(by_id["1.1"])).rank == 6


def test_centralizer_examples():
    assert centralizer(span_of([Mat.diag([1, 2, 3, 4])])).rank == 4
    cen = centralizer(ALL_UNITS)
    assert cen.rank == 1 and subspace_equal(cen, span_of([I4]))


def test_centralizer_case_2_1(by_id):
    # printed 5; exact value 3 (erratum 2.1-a)
    assert centralizer(unital_closure(_gens(by_id["2.1"]))).rank == 3


def test_pattern_space_examples(by_id):
    assert pattern_space(by_id["2.6"].R_pattern).rank == 4
    assert pattern_space(ScalarsPattern()).rank == 1
    case = by_id["1.5"]
    assert pattern_space(case.R_pattern, assign_params(case)).rank == 5


def test_subspace_equal_examples(by_id):
    e11, e22 = span_of([unit(1, 1)]), span_of([unit(2, 2)])
    assert subspace_equal(e11, e11)
    assert not subspace_equal(e11, e22)
    case = by_id["2.2"]
    env = assign_params(case)
    R = unital_closure(_gens(case))
    printed = case.R_pattern
    assert isinstance(printed, KronPattern) and pattern_space(printed, env).rank == 9
    # printed upper x upper does not match; the corrected factor order does
    assert not subspace_equal(R, pattern_space(printed, env))
    assert subspace_equal(R, pattern_space(apply_errata(case).R_pattern, env))


def test_kron_orientation():
    up = parse_pattern([["*", "*"], ["0", "*"]])
    lo = parse_pattern([["*", "0"], ["*", "*"]])
    ab = pattern_space(KronPattern(up, lo, "ab"))
    ba = pattern_space(KronPattern(lo, up, "ba"))
    assert subspace_equal(ab, ba)
    assert not subspace_equal(ab, pattern_space(KronPattern(lo, up, "ab")))


def test_pattern_symbols():
    p = parse_pattern([["eps", "*"], ["0", "eps"]], ["eps"])
    assert p.symbols == ("eps", "_s1")
    assert pattern_space(p).rank == 2
    with pytest.raises(PatternError):
        parse_pattern([["*", "0"], ["0", "*"]], ["phi"])
    with pytest.raises(PatternError):
        parse_pattern([["*", "0"]])


def test_dependent_entries():
    p = parse_pattern([["phi", "-b*phi/g"], ["0", "*"]], ["phi"])
    b = pattern_space(p, {"b": Scalar(2), "g": Scalar(3)})
    assert b.rank == 2
    assert b.contains(vectorize(Mat([[3, -2], [0, 0]])))
    with pytest.raises(ZeroDivisionError):
        pattern_space(p, {"b": Scalar(2), "g": Scalar(0)})


def _sample_cases(cases):
    return [c for c in cases if c.id in {"1.1", "2.2", "2.8", "3.17", "4.2", "5.3", "6.5", "7.13"}]


def test_closure_soundness_and_fixed_point(cases):
    for case in _sample_cases(cases):
        gens = _gens(case)
        R = unital_closure(gens)
        mats = R.matrices(4)
        for x in mats:
            for y in mats:
                assert R.contains(vectorize(x @ y)), case.id
        assert R.contains(vectorize(I4))
        again = unital_closure(mats)
        assert again == R, case.id


def test_centralizer_correctness(cases):
    for case in _sample_cases(cases):
        gens = _gens(case)
        R = unital_closure(gens)
        I = centralizer(R, 4)
        for x in I.matrices(4):
            for b in R.matrices(4):
                assert (x @ b - b @ x).is_zero()
        assert I.rank + commutant_system(R.matrices(4), 4).rank == 16
        assert I.contains(vectorize(I4)) and I.rank >= 1
        assert subspace_equal(I, centralizer_of(gens, 4))


small = st.sampled_from([Scalar(0), Scalar(0), Scalar(1), Scalar(-2), Scalar(3)])


@settings(max_examples=60, deadline=None)
@given(st.lists(matrices(3, small), min_size=1, max_size=3), matrices(3, small))
def test_monotone_and_antitone(gens, extra):
    small_R = unital_closure(gens)
    big_R = unital_closure(gens + [extra])
    assert contains(big_R, small_R)
    assert contains(centralizer(small_R, 3), centralizer(big_R, 3))
