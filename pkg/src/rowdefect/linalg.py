"""Tolerance-aware dense complex linear algebra.

Operators are plain ``numpy`` arrays of dtype ``complex128``. Subspaces are
stored by an orthonormal basis (the columns of a matrix). Every rank decision
in the package goes through :func:`numerical_rank`, which uses one relative
singular-value cutoff held by a :class:`TolerancePolicy`.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError, NotPSDError

__all__ = ['TolerancePolicy', 'DEFAULT_TOL', 'Subspace', 'as_matrix',
           'numerical_rank', 'psd_sqrt', 'column_space', 'null_space',
           'subspace_join', 'subspace_intersect', 'orthogonal_projection',
           'projection_distance', 'matrix_to_json', 'matrix_from_json']


@dataclass(frozen=True)
class TolerancePolicy:
    """Tolerances shared by every rank and identity decision.

    Parameters
    ----------
    rank_rtol : float
        Singular values ``<= rank_rtol * sigma_max`` count as zero.
    identity_atol : float
        Absolute tolerance for checks that hold exactly in exact arithmetic
        (Hermitian symmetry, contractivity, orthonormality).
    """
    rank_rtol: float = 1e-8
    identity_atol: float = 1e-10

    def __post_init__(self):
        if not 0 < self.rank_rtol < 1:
            raise ValueError('rank_rtol must lie in (0, 1), got %r' % self.rank_rtol)
        if not 0 < self.identity_atol < 1:
            raise ValueError('identity_atol must lie in (0, 1), got %r'
                             % self.identity_atol)


DEFAULT_TOL = TolerancePolicy()


def as_matrix(A):
    """Return ``A`` as a 2-d complex128 array with finite entries."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2:
        raise ValueError('expected a 2-d array, got shape %s' % (A.shape,))
    if not np.all(np.isfinite(A)):
        raise ValueError('matrix has non-finite entries')
    return A


def _freeze(A):
    A = np.array(A, dtype=np.complex128, copy=True)
    A.flags.writeable = False
    return A


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of ``C^n`` given by an orthonormal basis.

    ``basis`` has shape ``(ambient_dim, dim)``; its columns are orthonormal.
    Build instances through :func:`column_space` and friends, or with
    :meth:`from_basis` when the columns are already orthonormal.
    """
    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'basis', _freeze(self.basis))

    @classmethod
    def from_basis(cls, basis, tol=DEFAULT_TOL):
        basis = as_matrix(basis)
        gram = basis.conj().T @ basis
        if basis.shape[1] and np.max(np.abs(gram - np.eye(basis.shape[1]))) > tol.identity_atol:
            raise ValueError('basis columns are not orthonormal')
        return cls(basis)

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, 0), dtype=np.complex128))

    @classmethod
    def full(cls, n):
        return cls(np.eye(n, dtype=np.complex128))

    @classmethod
    def coordinate(cls, n, indices):
        """Span of the standard basis vectors ``e_i`` for ``i`` in ``indices``."""
        basis = np.zeros((n, len(indices)), dtype=np.complex128)
        for col, i in enumerate(indices):
            basis[i, col] = 1.0
        return cls(basis)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def projection(self):
        return orthogonal_projection(self)

    def contains(self, v, atol=1e-8):
        """True if the residual of ``v`` off the subspace is ``<= atol * ||v||``."""
        v = np.asarray(v, dtype=np.complex128)
        r = v - self.basis @ (self.basis.conj().T @ v)
        return np.linalg.norm(r) <= atol * max(np.linalg.norm(v), 1.0)

    def __repr__(self):
        return 'Subspace(ambient_dim=%d, dim=%d)' % (self.ambient_dim, self.dim)


def numerical_rank(s, tol=DEFAULT_TOL, atol=0.0):
    """Number of singular values ``s`` above ``max(rank_rtol * max(s), atol)``.

    ``atol`` is an absolute floor for matrices with a known natural scale,
    such as ``I - Psi^n(I)``, where pure round-off must count as zero.
    """
    s = np.asarray(s)
    if s.size == 0:
        return 0
    smax = s.max()
    if smax == 0.0:
        return 0
    return int(np.count_nonzero(s > max(tol.rank_rtol * smax, atol)))


def psd_sqrt(A, tol=DEFAULT_TOL):
    """Hermitian positive semidefinite square root.

    Eigenvalues with ``|lambda| <= identity_atol`` are set to zero, so that
    round-off in ``I - sum T_i T_i^*`` for a row isometry does not turn into a
    ``1e-8`` sized square root.

    Raises
    ------
    NotHermitianError
        If ``||A - A^*||_max > identity_atol``.
    NotPSDError
        If an eigenvalue is below ``-identity_atol``.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatchError('psd_sqrt needs a square matrix')
    if np.max(np.abs(A - A.conj().T), initial=0.0) > tol.identity_atol:
        raise NotHermitianError('matrix is not Hermitian within %g' % tol.identity_atol)
    w, V = np.linalg.eigh((A + A.conj().T) / 2)
    if w.size and w.min() < -tol.identity_atol:
        raise NotPSDError('smallest eigenvalue %.3e is below -%g'
                          % (w.min(), tol.identity_atol))
    w = np.where(np.abs(w) <= tol.identity_atol, 0.0, w)
    root = np.sqrt(np.clip(w, 0.0, None))
    return (V * root) @ V.conj().T


def column_space(A, tol=DEFAULT_TOL, atol=0.0):
    """Orthonormal basis of the span of the columns of ``A``."""
    A = as_matrix(A)
    if A.shape[1] == 0:
        return Subspace.zero(A.shape[0])
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = numerical_rank(s, tol, atol)
    return Subspace(U[:, :r])


def null_space(A, tol=DEFAULT_TOL):
    """Orthonormal basis of the numerical kernel of ``A``.

    The dimension is ``A.shape[1] - rank(A)``.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if A.shape[0] == 0 or n == 0:
        return Subspace.full(n)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    r = numerical_rank(s, tol)
    return Subspace(Vh[r:].conj().T)


def _check_same_ambient(U, V):
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError('ambient dimensions differ: %d vs %d'
                                     % (U.ambient_dim, V.ambient_dim))


def subspace_join(U, V, tol=DEFAULT_TOL):
    """The smallest subspace containing ``U`` and ``V``."""
    _check_same_ambient(U, V)
    return column_space(np.hstack([U.basis, V.basis]), tol)


def subspace_intersect(U, V, tol=DEFAULT_TOL):
    """``U`` intersected with ``V``, as the kernel of the stacked complements."""
    _check_same_ambient(U, V)
    n = U.ambient_dim
    eye = np.eye(n)
    stacked = np.vstack([eye - orthogonal_projection(U), eye - orthogonal_projection(V)])
    return null_space(stacked, tol)


def orthogonal_projection(U):
    return U.basis @ U.basis.conj().T


def projection_distance(U, V):
    """Spectral norm of the difference of the two orthogonal projections."""
    _check_same_ambient(U, V)
    if U.ambient_dim == 0:
        return 0.0
    return float(np.linalg.norm(orthogonal_projection(U) - orthogonal_projection(V), 2))


def matrix_to_json(A):
    """Encode a matrix as ``{"rows", "cols", "data": [[re, im], ...]}`` (row-major)."""
    A = as_matrix(A)
    return {'rows': int(A.shape[0]), 'cols': int(A.shape[1]),
            'data': [[float(z.real), float(z.imag)] for z in A.ravel()]}


def matrix_from_json(obj):
    rows, cols = int(obj['rows']), int(obj['cols'])
    data = obj['data']
    if len(data) != rows * cols:
        raise ValueError('matrix JSON has %d entries, expected %d' % (len(data), rows * cols))
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return as_matrix(flat.reshape(rows, cols))
