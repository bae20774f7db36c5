"""Truncated full Fock space, compressed creation operators and the Poisson kernel.

The depth-``N`` truncation keeps the basis vectors ``e_f`` with ``|f| <= N``
in the canonical word order, vacuum first. The compressed creation operators
``C_i e_f = e_{i f}`` (zero when ``|f| = N``) form a pure row contraction on
that space, since the truncation is co-invariant for the creation tuple.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CoinvarianceError, HypothesisViolation, NoDefectError
from .linalg import (DEFAULT_TOL, Subspace, matrix_to_json, null_space,
                     numerical_rank)
from .maximality import find_annihilator, is_maximal
from .tuples import (cp_iterate, defect_operator, defect_space, purity_report,
                     validate_tuple)
from .words import apply_word, enumerate_words, max_count, word_vectors

__all__ = ['FockTruncation', 'PoissonKernelMatrix', 'PureBatteryReport',
           'creation_tuple', 'particle_space', 'compress_to_coinvariant',
           'poisson_kernel', 'poisson_adjoint_apply', 'kernel_intersection_dim',
           'pure_maximality_battery', 'uncapped_window']


class FockTruncation:
    """Basis bookkeeping for the full Fock space over ``C^d`` cut at depth ``N``."""

    def __init__(self, d, N):
        if d < 1 or N < 0:
            raise ValueError('need d >= 1 and N >= 0')
        self.d = d
        self.N = N
        self.words = enumerate_words(d, N)
        self.index = {f: i for i, f in enumerate(self.words)}

    @property
    def dim(self):
        return len(self.words)

    def layer_count(self, n):
        """Number of basis words of length ``<= n``."""
        return max_count(self.d, n + 1, 1)

    def manifest(self):
        return {'d': self.d, 'depth': self.N, 'words': [list(f) for f in self.words]}

    def __repr__(self):
        return 'FockTruncation(d=%d, N=%d, dim=%d)' % (self.d, self.N, self.dim)


def _creation_matrices(fock):
    mats = []
    for i in range(1, fock.d + 1):
        C = np.zeros((fock.dim, fock.dim), dtype=np.complex128)
        for f, col in fock.index.items():
            if len(f) < fock.N:
                C[fock.index[(i,) + f], col] = 1.0
        mats.append(C)
    return mats


def creation_tuple(d, N, tol=DEFAULT_TOL):
    """Creation operators compressed to words of length ``<= N``."""
    fock = FockTruncation(d, N)
    return validate_tuple(_creation_matrices(fock), commuting=(d == 1), tol=tol)


def particle_space(fock, n):
    """``Gamma_n = span{e_f : |f| <= n}`` as a coordinate subspace."""
    if not 0 <= n <= fock.N:
        raise ValueError('particle space %d outside the truncation depth %d' % (n, fock.N))
    return Subspace.coordinate(fock.dim, range(fock.layer_count(n)))


def compress_to_coinvariant(d, N, Q, multiplicity=1, tol=DEFAULT_TOL):
    """Compress the (ampliated) creation tuple to a co-invariant subspace ``Q``.

    ``Q`` lives in ``Gamma_N (x) C^multiplicity`` with word-major coordinates.
    The result is expressed in the orthonormal basis ``Q.basis``.

    Raises
    ------
    CoinvarianceError
        If ``||(I - P_Q) C_i^* P_Q|| > identity_atol`` for some ``i``.
    """
    fock = FockTruncation(d, N)
    eye_k = np.eye(multiplicity)
    mats = [np.kron(C, eye_k) for C in _creation_matrices(fock)]
    if Q.ambient_dim != fock.dim * multiplicity:
        raise ValueError('Q must live in a space of dimension %d'
                         % (fock.dim * multiplicity))
    B = Q.basis
    worst = 0.0
    for C in mats:
        r = C.conj().T @ B
        r = r - B @ (B.conj().T @ r)
        worst = max(worst, float(np.linalg.norm(r, 2)) if r.size else 0.0)
    if worst > tol.identity_atol:
        raise CoinvarianceError('Q is not co-invariant: residual %.3e' % worst, worst)
    return validate_tuple([B.conj().T @ C @ B for C in mats], commuting=(d == 1), tol=tol)


@dataclass(frozen=True, eq=False)
class PoissonKernelMatrix:
    """Depth-``N`` Poisson kernel of a tuple.

    Row ``r = p * Delta + j`` corresponds to ``e_f (x) xi_j`` where ``f`` is the
    ``p``-th word of the truncation and ``xi_j`` the ``j``-th basis vector of
    ``D_1``; the row is ``xi_j^* D_T T_f^*``.
    """
    K: np.ndarray
    depth: int
    d: int
    D1: Subspace
    words: tuple

    @property
    def delta(self):
        return self.D1.dim

    def row(self, f, j):
        return self.words.index(f) * self.delta + j

    def gram_residual(self, T):
        """Frobenius norm of ``K^* K - (I - Psi_T^{N+1}(I))``."""
        target = np.eye(T.dim) - cp_iterate(T, self.depth + 1)
        return float(np.linalg.norm(self.K.conj().T @ self.K - target))

    def intertwining_residual(self, T):
        """Largest ``||K T_i^* - (S_i^* (x) I) K||`` over ``i``, top layer dropped."""
        keep = [f for f in self.words if len(f) < self.depth]
        k = self.delta
        worst = 0.0
        for i, M in enumerate(T.matrices, start=1):
            lhs = self.K @ M.conj().T
            rows_l, rows_r = [], []
            for f in keep:
                p = self.words.index(f)
                q = self.words.index((i,) + f)
                rows_l.append(lhs[p * k:(p + 1) * k])
                rows_r.append(self.K[q * k:(q + 1) * k])
            if rows_l:
                diff = np.vstack(rows_l) - np.vstack(rows_r)
                worst = max(worst, float(np.linalg.norm(diff)))
        return worst

    def block_index(self):
        return [{'row': p * self.delta + j, 'word': list(f), 'basis': j}
                for p, f in enumerate(self.words) for j in range(self.delta)]

    def to_json(self):
        return {'matrix': matrix_to_json(self.K), 'depth': self.depth, 'd': self.d,
                'blocks': self.block_index()}


def poisson_kernel(T, N):
    """Assemble ``K(T)`` truncated to words of length ``<= N``."""
    D1 = defect_space(T, 1)
    if D1.dim == 0:
        raise NoDefectError('Poisson kernel needs Delta_T >= 1')
    D = defect_operator(T)
    words = enumerate_words(T.arity, N)
    vecs = word_vectors(T, D @ D1.basis, N)
    K = np.vstack([vecs[f].conj().T for f in words])
    return PoissonKernelMatrix(K, N, T.arity, D1, tuple(words))


def poisson_adjoint_apply(T, f, xi):
    """``K(T)^* (e_f (x) xi) = T_f D_T xi``."""
    return apply_word(T, f) @ (defect_operator(T) @ np.asarray(xi, dtype=np.complex128))


def kernel_intersection_dim(T, n, N=None):
    """``dim[(Gamma_n (x) D_1) cap ker K(T)^*]``."""
    N = n if N is None else N
    if n > N:
        raise ValueError('n = %d exceeds the truncation depth N = %d' % (n, N))
    PK = poisson_kernel(T, n)
    return null_space(PK.K.conj().T, T.tol).dim


def uncapped_window(T, horizon, delta):
    """Largest ``h <= horizon`` with ``(1 + d + ... + d^{h-1}) * delta <= dim``."""
    h = 0
    while h < horizon and max_count(T.arity, h + 1, delta) <= T.dim:
        h += 1
    return h


@dataclass(frozen=True)
class PureBatteryReport:
    """Conditions (i), (ii), (iii), (iv) of the pure-tuple maximality criterion.

    All conditions are evaluated on the window ``n <= window`` where the
    uncapped growth ``(1 + ... + d^{n-1}) Delta`` still fits in the dimension.
    ``no_annihilator`` is ``None`` when ``Delta > 1`` (the polynomial criterion
    is stated for ``Delta = 1``); ``coinvariant_ranks`` is ``None`` unless a
    co-invariant model was supplied.
    """
    delta: int
    window: int
    maximal: bool
    no_annihilator: Optional[bool]
    kernel_dims: tuple
    coinvariant_ranks: Optional[tuple]
    coinvariant_expected: Optional[tuple]

    @property
    def kernel_trivial(self):
        return all(k == 0 for k in self.kernel_dims)

    @property
    def coinvariant_ok(self):
        if self.coinvariant_ranks is None:
            return None
        return self.coinvariant_ranks == self.coinvariant_expected

    @property
    def conditions(self):
        out = {'i': self.maximal, 'iv': self.kernel_trivial}
        if self.no_annihilator is not None:
            out['ii'] = self.no_annihilator
        if self.coinvariant_ranks is not None:
            out['iii'] = self.coinvariant_ok
        return out

    @property
    def agree(self):
        return len(set(self.conditions.values())) == 1

    def as_dict(self):
        return {'delta': self.delta, 'window': self.window,
                'conditions': self.conditions, 'agree': self.agree,
                'kernel_dims': list(self.kernel_dims),
                'coinvariant_ranks': None if self.coinvariant_ranks is None
                else list(self.coinvariant_ranks)}


def pure_maximality_battery(T, horizon, coinvariant=None, purity_steps=None):
    """Run the equivalent maximality conditions for a pure tuple side by side.

    Parameters
    ----------
    T : OperatorTuple
        Pure (at tolerance) tuple with finite ``Delta_T``.
    horizon : int
        Largest ``n`` to examine; clipped to the uncapped window.
    coinvariant : tuple, optional
        ``(Q, multiplicity)`` when ``T`` was produced by
        :func:`compress_to_coinvariant`; enables condition (iii).

    Raises
    ------
    HypothesisViolation
        If ``T`` has no defect or is not pure at tolerance.
    """
    D1 = defect_space(T, 1)
    delta = D1.dim
    if delta == 0:
        raise HypothesisViolation('battery needs Delta_T >= 1')
    steps = purity_steps or max(50, 4 * T.dim)
    if not purity_report(T, steps).pure_at_tolerance:
        raise HypothesisViolation('tuple is not pure at tolerance after %d steps' % steps)
    h = uncapped_window(T, horizon, delta)
    verdict = is_maximal(T, h, 'non-commuting')
    no_ann = None
    if delta == 1:
        no_ann = find_annihilator(T, h - 1, 'non-commuting') is None
    kdims = tuple(kernel_intersection_dim(T, k) for k in range(h))
    ranks = expected = None
    if coinvariant is not None:
        Q, mult = coinvariant
        ranks, expected = [], []
        for k in range(h):
            ncoord = max_count(T.arity, k + 1, 1) * mult
            s = np.linalg.svd(Q.basis[:ncoord], compute_uv=False)
            ranks.append(numerical_rank(s, T.tol))
            expected.append(max_count(T.arity, k + 1, mult))
        ranks, expected = tuple(ranks), tuple(expected)
    return PureBatteryReport(delta, h, verdict.is_maximal, no_ann, kdims, ranks, expected)
