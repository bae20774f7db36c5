import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rowdefect.errors import NotHermitianError, NotPSDError
from rowdefect.linalg import (DEFAULT_TOL, Subspace, TolerancePolicy,
                              column_space, matrix_from_json, matrix_to_json,
                              null_space, numerical_rank, orthogonal_projection,
                              projection_distance, psd_sqrt, subspace_intersect,
                              subspace_join)

from _oracles import exact_rank


def test_tolerance_policy_validates():
    with pytest.raises(ValueError):
        TolerancePolicy(rank_rtol=0.0)
    with pytest.raises(ValueError):
        TolerancePolicy(identity_atol=1.5)
    assert DEFAULT_TOL.rank_rtol == 1e-8
    assert DEFAULT_TOL.identity_atol == 1e-10


def test_psd_sqrt_identity_and_diagonal():
    assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(psd_sqrt(np.diag([4.0, 0.0])), np.diag([2.0, 0.0]))


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(4)
    G = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    A = G @ G.conj().T
    R = psd_sqrt(A)
    assert np.allclose(R, R.conj().T)
    assert np.linalg.norm(R @ R - A) < 1e-10


def test_psd_sqrt_rejects_bad_input():
    with pytest.raises(NotHermitianError):
        psd_sqrt(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotPSDError):
        psd_sqrt(np.diag([1.0, -1e-3]))
    # tiny negative round-off is clamped
    assert np.allclose(psd_sqrt(np.diag([1.0, -1e-14])), np.diag([1.0, 0.0]))


def test_column_space_small_cases():
    assert column_space(np.zeros((3, 3))).dim == 0
    U = column_space(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert U.dim == 1
    assert projection_distance(U, Subspace.coordinate(2, [0])) < 1e-14


@pytest.mark.parametrize('seed', range(20))
def test_column_space_rank_matches_exact_elimination(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 9, size=2)
    r = int(rng.integers(0, min(m, n) + 1))
    A = rng.integers(-3, 4, size=(m, r)) @ rng.integers(-3, 4, size=(r, n))
    assert column_space(A.astype(float)).dim == exact_rank(A.tolist())


def test_join_and_intersection():
    rng = np.random.default_rng(0)
    shared = rng.standard_normal(5)
    U = column_space(np.column_stack([shared, rng.standard_normal(5)]))
    V = column_space(np.column_stack([shared, rng.standard_normal(5)]))
    J = subspace_join(U, V)
    assert J.dim == 3
    assert J.dim == column_space(np.hstack([U.basis, V.basis])).dim
    I = subspace_intersect(U, V)
    assert I.dim == 1
    assert I.contains(shared)


def test_intersection_of_planes_is_common_line():
    line = np.array([1.0, 2.0, 3.0])
    P1 = column_space(np.column_stack([line, [1.0, 0, 0]]))
    P2 = column_space(np.column_stack([line, [0, 0, 1.0]]))
    L = subspace_intersect(P1, P2)
    assert L.dim == 1
    assert projection_distance(L, column_space(line[:, None])) < 1e-12


def test_join_dimension_mismatch():
    with pytest.raises(ValueError):
        subspace_join(Subspace.full(2), Subspace.full(3))


def test_projection_examples():
    assert np.allclose(orthogonal_projection(Subspace.full(3)), np.eye(3))
    assert np.allclose(orthogonal_projection(Subspace.zero(3)), 0)
    P = orthogonal_projection(column_space(np.array([[1.0], [1.0]])))
    assert np.allclose(P, 0.5)


def test_null_space_examples():
    assert null_space(np.eye(3)).dim == 0
    assert null_space(np.zeros((2, 4))).dim == 4
    K = null_space(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert K.dim == 1
    assert projection_distance(K, column_space(np.array([[2.0], [-1.0]]))) < 1e-12


def test_numerical_rank_is_relative():
    assert numerical_rank(np.array([1.0, 1e-9])) == 1
    assert numerical_rank(np.array([1e-20, 1e-29])) == 1
    assert numerical_rank(np.array([1e-20, 1e-27])) == 2
    assert numerical_rank(np.array([])) == 0


def test_matrix_json_roundtrip():
    A = np.array([[1 + 2j, 0], [3.5, -1j]])
    obj = json.loads(json.dumps(matrix_to_json(A)))
    assert obj['rows'] == 2 and obj['cols'] == 2
    assert np.array_equal(matrix_from_json(obj), A)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2 ** 31))
def test_projection_is_hermitian_idempotent(n, k, seed):
    rng = np.random.default_rng(seed)
    U = column_space(rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k)))
    P = U.projection()
    assert np.allclose(P, P.conj().T)
    assert np.allclose(P @ P, P)
    assert U.dim == min(n, k)
