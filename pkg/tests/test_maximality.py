import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rowdefect.errors import HypothesisViolation, NoDefectError
from rowdefect.experiments import battery_zoo, nilpotent_shift, random_contractive_tuple
from rowdefect.fock import creation_tuple, uncapped_window
from rowdefect.linalg import DEFAULT_TOL
from rowdefect.maximality import (departure_consistency, first_dependence,
                                  expected_profile, find_annihilator, is_maximal,
                                  minimal_polynomial)
from rowdefect.tuples import defect_space, validate_tuple
from rowdefect.words import apply_multiindex, apply_word


def _combination(T, verdict):
    D1 = defect_space(T, 1).basis
    apply = apply_multiindex if verdict.mode == 'commuting' else apply_word
    return sum(c * (apply(T.matrices, lab) @ D1[:, i]) for lab, i, c in verdict.witness)


def test_shift_c5_maximal():
    v = is_maximal(nilpotent_shift(5), 7)
    assert v.is_maximal
    assert v.deltas == (1, 2, 3, 4, 5, 5, 5)
    assert v.expected == (1, 2, 3, 4, 5, 5, 5)
    assert v.departure_index is None and v.witness == ()


def test_creation_depth3_maximal():
    v = is_maximal(creation_tuple(2, 3), 5)
    assert v.is_maximal
    assert v.expected == (1, 3, 7, 15, 15)


def test_jordan_pair_is_maximal_under_the_cap():
    J = np.array([[0.0, 0.0], [1.0, 0.0]]) / np.sqrt(2)
    T = validate_tuple([J, J], commuting=True)
    v = is_maximal(T, 3)
    # Delta^2 = 2 = dim H, so the finite-dimensional cap is reached
    assert v.deltas == (1, 2, 2)
    assert v.is_maximal
    # the uncapped count (1, 3) is not reached, and z1 - z2 kills D_1
    assert v.uncapped_departure == 2
    ann = find_annihilator(T, 1)
    assert ann.degree == 1
    c = ann.coefficients
    assert set(c) == {(1, 0), (0, 1)}
    assert abs(c[(1, 0)] + c[(0, 1)]) < 1e-12


def test_not_maximal_witness_is_valid():
    for name, T, _, expected in battery_zoo():
        if expected:
            continue
        v = is_maximal(T, 3, 'non-commuting')
        assert not v.is_maximal, name
        assert v.witness_residual < 1e-8
        assert np.linalg.norm(_combination(T, v)) < 1e-7
        coefs = np.array([c for _, _, c in v.witness])
        assert abs(np.linalg.norm(coefs) - 1) < 1e-12


def test_dshift_as_free_tuple_witness_is_commutator():
    from rowdefect.drury_arveson import dshift
    v = is_maximal(dshift(2, 3), 3, 'non-commuting')
    assert v.departure_index == 3
    w = {lab: c for lab, _, c in v.witness}
    assert set(w) == {(1, 2), (2, 1)}
    assert abs(w[(1, 2)] + w[(2, 1)]) < 1e-12
    assert w[(1, 2)].real > 0 and abs(w[(1, 2)].imag) < 1e-15


def test_no_defect_is_rejected():
    U = validate_tuple([[[1 / np.sqrt(2)]], [[1 / np.sqrt(2)]]])
    with pytest.raises(NoDefectError):
        is_maximal(U, 3)
    with pytest.raises(NoDefectError):
        find_annihilator(U, 2)


def test_expected_profile_cap_rule():
    assert expected_profile(2, 6, 1, 20, 'non-commuting') == [1, 3, 7, 15, 20, 20]
    assert expected_profile(2, 6, 1, 20, 'commuting') == [1, 3, 6, 10, 15, 20]
    assert expected_profile(2, 3, 1, 5, 'commuting', capped=False) == [1, 3, 6]


def test_annihilator_of_shift():
    ann = find_annihilator(nilpotent_shift(5), 6)
    assert ann.degree == 5
    assert list(ann.coefficients) == [(5,)]
    ann = find_annihilator(nilpotent_shift(5), 6, 'non-commuting')
    assert list(ann.coefficients) == [(1, 1, 1, 1, 1)]
    assert ann.residual == 0.0
    assert len(ann.certificates) == 5
    assert find_annihilator(nilpotent_shift(5), 4) is None


def test_departure_consistency_shift():
    rep = departure_consistency(nilpotent_shift(5), 7)
    assert rep.uncapped_departure == 6
    assert rep.annihilator_degree == 5
    assert rep.consistent


def test_departure_consistency_needs_delta_one():
    with pytest.raises(HypothesisViolation):
        departure_consistency(validate_tuple([np.zeros((2, 2))]), 2)


@pytest.mark.parametrize('m', [1, 2, 4, 6])
def test_minimal_polynomial_of_shift(m):
    mp = minimal_polynomial(nilpotent_shift(m))
    assert mp.degree == m
    assert np.allclose(mp.coefficients, [0] * m + [1])
    assert mp.defect_annihilator_degree == m
    assert mp.pure


def test_minimal_polynomial_examples():
    mp = minimal_polynomial(validate_tuple([np.eye(3)]))
    assert mp.degree == 1 and np.allclose(mp.coefficients, [-1, 1])
    mp = minimal_polynomial(validate_tuple([np.diag([0, 0.5])]))
    assert mp.degree == 2 and np.allclose(mp.coefficients, [0, -0.5, 1])
    assert mp.residual < 1e-12
    with pytest.raises(ValueError):
        minimal_polynomial(creation_tuple(2, 1))


def test_first_dependence():
    A = np.array([[1.0, 0, 1], [0, 1, 1]])
    j, c = first_dependence(A, DEFAULT_TOL)
    assert j == 2
    assert np.linalg.norm(A @ c) < 1e-14
    assert first_dependence(np.eye(3), DEFAULT_TOL) is None


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(2, 7), st.integers(0, 2 ** 31))
def test_maximal_iff_no_annihilator(d, m, seed):
    T = random_contractive_tuple(d, m, seed=seed, defect_rank=1)
    h = uncapped_window(T, 6, 1)
    v = is_maximal(T, h, 'non-commuting')
    ann = find_annihilator(T, h - 1, 'non-commuting')
    assert v.is_maximal == (ann is None)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(2, 6), st.integers(0, 2 ** 31))
def test_verdict_is_unitarily_invariant(d, m, seed):
    T = random_contractive_tuple(d, m, seed=seed, defect_rank=1)
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    V = validate_tuple([U @ M @ U.conj().T for M in T.matrices])
    a, b = is_maximal(T, 5), is_maximal(V, 5)
    assert (a.is_maximal, a.departure_index, a.deltas) == (b.is_maximal, b.departure_index, b.deltas)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(2, 6), st.integers(0, 2 ** 31))
def test_witness_combination_vanishes(d, m, seed):
    T = random_contractive_tuple(d, m, seed=seed, defect_rank=2 if m > 2 else 1)
    v = is_maximal(T, 5)
    if not v.is_maximal:
        assert np.linalg.norm(_combination(T, v)) < 1e-7


def test_equivalence_on_zoo():
    for name, T, _, _ in battery_zoo():
        h = uncapped_window(T, 6, 1)
        v = is_maximal(T, h, 'non-commuting')
        ann = find_annihilator(T, h - 1, 'non-commuting')
        assert v.is_maximal == (ann is None), name
        if ann is not None:
            assert departure_consistency(T, h, 'non-commuting').consistent, name
