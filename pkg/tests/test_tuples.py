import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rowdefect.errors import CommutatorError, NotRowContractionError
from rowdefect.experiments import nilpotent_shift, random_contractive_tuple
from rowdefect.fock import creation_tuple
from rowdefect.linalg import Subspace, TolerancePolicy, projection_distance
from rowdefect.tuples import (check_profile_bounds, cp_iterate, cp_map,
                              defect_operator, defect_sequence, defect_space,
                              defect_space_by_join, purity_report,
                              semigroup_split, sum_formula_residual,
                              tuple_from_json, tuple_to_json, validate_tuple)

from _oracles import creation_matrices, rational_defect_ranks, shift_matrix

s = 1 / np.sqrt(2)


def test_validate_tuple_examples():
    Z = validate_tuple([np.zeros((2, 2))] * 3)
    assert Z.row_norm == 0 and Z.arity == 3
    T = validate_tuple([[[s]], [[s]]])
    assert abs(T.row_norm - 1) < 1e-15
    with pytest.raises(NotRowContractionError) as info:
        validate_tuple([[[1.0]], [[1.0]]])
    assert info.value.row_norm == pytest.approx(2.0)


def test_validate_tuple_commutator():
    A = np.array([[0, 0.5], [0, 0]])
    with pytest.raises(CommutatorError):
        validate_tuple([A, A.T], commuting=True)
    validate_tuple([A, A.T])


def test_cp_map_examples():
    X = np.arange(4.0).reshape(2, 2)
    assert np.allclose(cp_map(validate_tuple([np.zeros((2, 2))]), X), 0)
    assert np.allclose(cp_map(validate_tuple([np.eye(2)]), X), X)
    C = creation_tuple(2, 1)
    assert np.allclose(cp_map(C, np.eye(3)), np.diag([0, 1, 1]))


def test_cp_iterate_examples():
    S = nilpotent_shift(3)
    assert np.allclose(cp_iterate(S, 0), np.eye(3))
    assert np.allclose(cp_iterate(S, 3), 0)
    assert np.allclose(cp_iterate(validate_tuple([np.eye(2)]), 7), np.eye(2))


def test_defect_operator_examples():
    assert np.allclose(defect_operator(validate_tuple([np.zeros((3, 3))])), np.eye(3))
    assert np.allclose(defect_operator(nilpotent_shift(3)), np.diag([1, 0, 0]))
    assert np.allclose(defect_operator(validate_tuple([[[s]], [[s]]])), 0)


def test_defect_space_examples():
    Z = validate_tuple([np.zeros((4, 4))])
    assert defect_space(Z, 3).dim == 4
    S = nilpotent_shift(3)
    for n in (1, 2, 3):
        D = defect_space(S, n)
        assert projection_distance(D, Subspace.coordinate(3, range(n))) < 1e-14


def test_defect_space_by_join_examples():
    S = nilpotent_shift(3)
    assert projection_distance(defect_space_by_join(S, 1), defect_space(S, 1)) == 0
    assert projection_distance(defect_space_by_join(S, 2),
                               Subspace.coordinate(3, [0, 1])) < 1e-14


def test_sum_formula_examples():
    T = random_contractive_tuple(3, 8, seed=11)
    assert sum_formula_residual(T, 1) == 0.0
    assert sum_formula_residual(nilpotent_shift(3), 3) < 1e-12
    assert sum_formula_residual(T, 5) < 1e-10


def test_defect_sequence_shift_and_zero():
    prof = defect_sequence(nilpotent_shift(5), 7)
    assert prof.deltas == (1, 2, 3, 4, 5, 5, 5)
    assert prof.stabilized_at == 5
    prof = defect_sequence(validate_tuple([np.zeros((4, 4))]), 3)
    assert prof.deltas == (4, 4, 4)
    assert prof.stabilized_at == 1


@pytest.mark.parametrize('m', [3, 5, 8])
def test_shift_sequence_matches_exact_oracle(m):
    exact = rational_defect_ranks([shift_matrix(m)], m + 2)
    assert list(defect_sequence(nilpotent_shift(m), m + 2).deltas) == exact


@pytest.mark.parametrize('d, N', [(2, 2), (2, 3), (3, 2)])
def test_creation_sequence_matches_exact_oracle(d, N):
    exact = rational_defect_ranks(creation_matrices(d, N), N + 2)
    assert list(defect_sequence(creation_tuple(d, N), N + 2).deltas) == exact


def test_creation_depth3_profile():
    assert defect_sequence(creation_tuple(2, 3), 5).deltas == (1, 3, 7, 15, 15)


def test_purity_report_examples():
    r = purity_report(nilpotent_shift(3), 3)
    assert r.norms[:2] == pytest.approx((1.0, 1.0))
    assert r.norms[2] < 1e-12 and r.pure_at_tolerance
    assert not purity_report(validate_tuple([[[1.0]]]), 10).pure_at_tolerance
    r = purity_report(validate_tuple([0.5 * np.eye(2)]), 20)
    assert r.norms == pytest.approx(tuple(0.25 ** n for n in range(1, 21)))
    assert r.pure_at_tolerance
    assert not purity_report(validate_tuple([0.5 * np.eye(2)]), 5).pure_at_tolerance


def test_row_isometry_has_no_defect():
    # I - sum T_i T_i^* is pure round-off here and must count as zero
    U = validate_tuple([[[s]], [[s]]])
    assert defect_sequence(U, 3).deltas == (0, 0, 0)


def test_certified_flags():
    prof = defect_sequence(nilpotent_shift(4), 5, certified_depth=3)
    assert prof.certified == (True, True, True, False, False)
    assert prof.as_dict()['deltas'] == [1, 2, 3, 4, 4]


def test_tuple_json_roundtrip():
    T = random_contractive_tuple(2, 3, seed=5)
    text = json.dumps(tuple_to_json(T))
    U = tuple_from_json(json.loads(text))
    assert all(np.array_equal(a, b) for a, b in zip(T.matrices, U.matrices))
    assert json.dumps(tuple_to_json(U)) == text


def test_matrices_are_read_only():
    T = nilpotent_shift(3)
    with pytest.raises(ValueError):
        T.matrices[0][0, 0] = 1.0


# -- property tests over random tuples ------------------------------------

tuples = st.builds(
    lambda d, m, seed, low: random_contractive_tuple(
        d, m, seed=seed, defect_rank=(max(1, m // 2) if low else None)),
    st.integers(1, 3), st.integers(1, 8), st.integers(0, 2 ** 31), st.booleans())


@settings(max_examples=40, deadline=None)
@given(tuples)
def test_monotone_bounded_and_stable(T):
    prof = defect_sequence(T, 6)
    assert check_profile_bounds(prof, T.arity, T.commuting) == []
    if prof.stabilized_at is not None:
        k = prof.stabilized_at
        assert len(set(prof.deltas[k - 1:])) == 1


@settings(max_examples=30, deadline=None)
@given(tuples, st.integers(1, 4))
def test_join_identity(T, n):
    assert projection_distance(defect_space_by_join(T, n), defect_space(T, n)) < 1e-7


@settings(max_examples=30, deadline=None)
@given(tuples, st.integers(2, 4), st.data())
def test_semigroup_split(T, m, data):
    n = data.draw(st.integers(1, m - 1))
    assert projection_distance(semigroup_split(T, n, m), defect_space(T, m)) < 1e-7


@settings(max_examples=30, deadline=None)
@given(tuples, st.integers(1, 4))
def test_words_push_defect_spaces_forward(T, n):
    Dn, Dn1 = defect_space(T, n), defect_space(T, n + 1)
    P = Dn1.projection()
    for M in T.matrices:
        V = M @ Dn.basis
        assert np.linalg.norm(V - P @ V) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(1, 6), st.integers(0, 2 ** 31))
def test_pure_tuples_exhaust_the_space(d, m, seed):
    T = random_contractive_tuple(d, m, seed=seed, eps=0.3)
    assert purity_report(T, 100).pure_at_tolerance
    assert defect_space(T, 100).dim == m


def test_stricter_tolerance_is_respected():
    T = random_contractive_tuple(2, 4, seed=0, tol=TolerancePolicy(1e-12, 1e-12))
    assert T.tol.rank_rtol == 1e-12
