"""Row contractions, their completely positive map and defect sequences."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (CommutatorError, DimensionMismatchError,
                     NotRowContractionError)
from .linalg import (DEFAULT_TOL, Subspace, as_matrix, column_space,
                     matrix_from_json, matrix_to_json, psd_sqrt,
                     subspace_join)
from .words import max_count, word_vectors, words_of_length

__all__ = ['OperatorTuple', 'DefectProfile', 'PurityReport', 'validate_tuple',
           'cp_map', 'cp_iterate', 'defect_operator', 'defect_space',
           'defect_space_by_join', 'sum_formula_residual', 'defect_sequence',
           'purity_report', 'semigroup_split', 'check_profile_bounds',
           'tuple_to_json',
           'tuple_from_json']


@dataclass(frozen=True, eq=False)
class OperatorTuple:
    """A row contraction ``T = (T_1, ..., T_d)`` on ``C^m``.

    Construction validates contractivity (and commutativity when
    ``commuting`` is set); use :func:`validate_tuple` as the usual entry
    point.
    """
    matrices: tuple
    commuting: bool = False
    tol: object = DEFAULT_TOL
    row_norm: float = field(init=False)

    def __post_init__(self):
        mats = []
        for M in self.matrices:
            M = np.array(as_matrix(M), copy=True)
            M.flags.writeable = False
            mats.append(M)
        if not mats:
            raise ValueError('a tuple needs at least one operator')
        m = mats[0].shape[0]
        for M in mats:
            if M.shape != (m, m):
                raise DimensionMismatchError('all operators must be %dx%d, got %s'
                                             % (m, m, M.shape))
        object.__setattr__(self, 'matrices', tuple(mats))
        row = sum(M @ M.conj().T for M in mats)
        norm = float(np.linalg.norm(row, 2)) if m else 0.0
        object.__setattr__(self, 'row_norm', norm)
        if norm > 1 + self.tol.identity_atol:
            raise NotRowContractionError(
                'not a row contraction: ||sum T_i T_i^*|| = %.12g' % norm, norm)
        if self.commuting:
            res = self.commutator_norm()
            if res > self.tol.identity_atol:
                raise CommutatorError('commutator violation: max ||T_iT_j - T_jT_i|| = %.3e'
                                      % res, res)

    @property
    def dim(self):
        return self.matrices[0].shape[0]

    @property
    def arity(self):
        return len(self.matrices)

    def __len__(self):
        return len(self.matrices)

    def __getitem__(self, i):
        return self.matrices[i]

    def commutator_norm(self):
        mats = self.matrices
        worst = 0.0
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                C = mats[i] @ mats[j] - mats[j] @ mats[i]
                worst = max(worst, float(np.linalg.norm(C, 2)))
        return worst

    def with_tol(self, tol):
        return OperatorTuple(self.matrices, self.commuting, tol)

    def __repr__(self):
        return 'OperatorTuple(dim=%d, arity=%d, commuting=%s, row_norm=%.6g)' % (
            self.dim, self.arity, self.commuting, self.row_norm)


def validate_tuple(matrices, commuting=False, tol=DEFAULT_TOL):
    """Check that ``matrices`` form a row contraction and wrap them.

    Raises
    ------
    NotRowContractionError
        If ``||sum_i T_i T_i^*|| > 1 + identity_atol``.
    CommutatorError
        If ``commuting`` is set and some ``||T_i T_j - T_j T_i|| > identity_atol``.
    """
    return OperatorTuple(tuple(matrices), bool(commuting), tol)


def cp_map(T, X):
    """``Psi_T(X) = sum_i T_i X T_i^*``."""
    X = as_matrix(X)
    if X.shape != (T.dim, T.dim):
        raise DimensionMismatchError('X must be %dx%d' % (T.dim, T.dim))
    return sum(M @ X @ M.conj().T for M in T.matrices)


def cp_iterate(T, n, X=None):
    """``Psi_T^n(X)``, with ``X = I`` by default."""
    out = np.eye(T.dim, dtype=np.complex128) if X is None else as_matrix(X)
    for _ in range(n):
        out = cp_map(T, out)
    return out


def defect_operator(T):
    """``D_T = (I - Psi_T(I))^{1/2}``."""
    return psd_sqrt(np.eye(T.dim) - cp_map(T, np.eye(T.dim)), T.tol)


def defect_space(T, n):
    """The ``n``-th defect space, the range of ``I - Psi_T^n(I)``."""
    if n < 1:
        raise ValueError('n must be >= 1')
    return column_space(np.eye(T.dim) - cp_iterate(T, n), T.tol, T.tol.identity_atol)


def _layer_space(T, X, k):
    """Span of ``T_f X`` over all words of length exactly ``k``."""
    vecs = word_vectors(T, X, k)
    cols = [vecs[f] for f in words_of_length(T.arity, k)]
    return column_space(np.hstack(cols), T.tol)


def defect_space_by_join(T, n):
    """``D_1 v T(D_1^d) v ... v T^{n-1}(D_1^{d^{n-1}})``.

    Each layer is rank-reduced on its own before joining, so tiny but genuine
    contributions from long words are not drowned by the first layer's scale.
    """
    if n < 1:
        raise ValueError('n must be >= 1')
    D1 = defect_space(T, 1)
    out = D1
    if D1.dim == 0:
        return out
    vecs = word_vectors(T, D1.basis, n - 1)
    for k in range(1, n):
        cols = [vecs[f] for f in words_of_length(T.arity, k)]
        out = subspace_join(out, column_space(np.hstack(cols), T.tol), T.tol)
    return out


def semigroup_split(T, n, m):
    """``D_n v T^n(D_{m-n}^{d^n})``, which equals ``D_m`` for ``n < m``."""
    if not 1 <= n < m:
        raise ValueError('need 1 <= n < m')
    Dmn = defect_space(T, m - n)
    return subspace_join(defect_space(T, n), _layer_space(T, Dmn.basis, n), T.tol)


def sum_formula_residual(T, n):
    """Frobenius norm of ``(I - Psi^n(I)) - sum_{i<n} Psi^i(I - Psi(I))``."""
    if n < 1:
        raise ValueError('n must be >= 1')
    eye = np.eye(T.dim)
    D2 = eye - cp_map(T, eye)
    rhs = np.zeros_like(D2)
    term = D2
    for i in range(n):
        rhs = rhs + term
        if i < n - 1:
            term = cp_map(T, term)
    lhs = eye - cp_iterate(T, n)
    return float(np.linalg.norm(lhs - rhs))


@dataclass(frozen=True, eq=False)
class DefectProfile:
    """Defect indices ``Delta^1, ..., Delta^{n_max}`` and the defect spaces.

    ``deltas[0]`` is ``Delta^1``. ``stabilized_at`` is the first ``n`` (1-based)
    with ``Delta^n == Delta^{n+1}``, when that happens inside the horizon.
    ``certified`` flags which entries are exact statements about the
    untruncated operator; it is all-True for plain finite-dimensional tuples.
    """
    deltas: tuple
    spaces: tuple
    stabilized_at: Optional[int]
    certified: tuple = ()

    def __post_init__(self):
        if not self.certified:
            object.__setattr__(self, 'certified', (True,) * len(self.deltas))

    @property
    def delta(self):
        return self.deltas[0]

    @property
    def n_max(self):
        return len(self.deltas)

    def as_dict(self):
        return {'deltas': list(self.deltas), 'stabilized_at': self.stabilized_at,
                'certified': list(self.certified)}


def defect_sequence(T, n_max, certified_depth=None):
    """Compute the defect profile of ``T`` up to ``n_max``.

    ``Psi`` is iterated once per step; the ``d^n`` word products are never
    formed.
    """
    if n_max < 1:
        raise ValueError('n_max must be >= 1')
    eye = np.eye(T.dim)
    P = eye
    deltas, spaces = [], []
    for _ in range(n_max):
        P = cp_map(T, P)
        D = column_space(eye - P, T.tol, T.tol.identity_atol)
        spaces.append(D)
        deltas.append(D.dim)
    stab = next((n + 1 for n in range(n_max - 1) if deltas[n] == deltas[n + 1]), None)
    if certified_depth is None:
        cert = (True,) * n_max
    else:
        cert = tuple(n + 1 <= certified_depth for n in range(n_max))
    return DefectProfile(tuple(deltas), tuple(spaces), stab, cert)


def check_profile_bounds(profile, d, commuting):
    """Violations of monotonicity and the growth bound in ``profile``."""
    problems = []
    ds = profile.deltas
    for n in range(1, len(ds)):
        if ds[n] < ds[n - 1]:
            problems.append('Delta^%d < Delta^%d' % (n + 1, n))
    for n, v in enumerate(ds, start=1):
        if v > max_count(d, n, ds[0], commuting):
            problems.append('Delta^%d = %d exceeds the growth bound' % (n, v))
    return problems


@dataclass(frozen=True)
class PurityReport:
    """Norms ``||Psi_T^n(I)||`` for ``n = 1..n_max`` and the tolerance verdict."""
    norms: tuple
    atol: float

    @property
    def pure_at_tolerance(self):
        return bool(self.norms) and self.norms[-1] < self.atol

    def as_dict(self):
        return {'norms': list(self.norms), 'pure_at_tolerance': self.pure_at_tolerance}


def purity_report(T, n_max):
    if n_max < 1:
        raise ValueError('n_max must be >= 1')
    P = np.eye(T.dim)
    norms = []
    for _ in range(n_max):
        P = cp_map(T, P)
        norms.append(float(np.linalg.norm(P, 2)) if T.dim else 0.0)
    return PurityReport(tuple(norms), T.tol.identity_atol)


def tuple_to_json(T):
    return {'dim': T.dim, 'arity': T.arity, 'commuting': T.commuting,
            'matrices': [matrix_to_json(M) for M in T.matrices]}


def tuple_from_json(obj, tol=DEFAULT_TOL):
    mats = [matrix_from_json(M) for M in obj['matrices']]
    if len(mats) != int(obj.get('arity', len(mats))):
        raise ValueError('arity does not match the number of matrices')
    if mats and mats[0].shape[0] != int(obj.get('dim', mats[0].shape[0])):
        raise ValueError('dim does not match the matrix size')
    return validate_tuple(mats, bool(obj.get('commuting', False)), tol)
