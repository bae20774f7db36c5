"""Truncated Drury-Arveson module, polynomially generated submodules and
one-variable model spaces.

Polynomials are dicts ``{alpha: coef}`` keyed by exponent tuples. Vectors in
the truncated module ``H^2_d`` (degrees ``<= N``) are stored in the
orthonormal basis ``z^alpha / ||z^alpha||`` with ``||z^alpha||^2 = alpha!/|alpha|!``,
so the module inner product is the Euclidean one on coordinates.
"""
from dataclasses import dataclass
from math import comb, factorial, prod
from typing import Optional

import numpy as np

from .errors import CertificationError, CommutatorError, RowDefectError
from .linalg import DEFAULT_TOL, Subspace, column_space, null_space
from .maximality import find_annihilator, is_maximal, minimal_polynomial
from .tuples import cp_map, defect_operator, defect_sequence, validate_tuple
from .words import (enumerate_multiindices, monomial_vectors,
                    multiindices_of_degree)

__all__ = ['da_weight', 'kernel_expansion_gram', 'weight_gate', 'DATruncation',
           'dshift', 'poly_degree', 'is_homogeneous', 'poly_to_json',
           'poly_from_json', 'weighted_gram_schmidt', 'SubmoduleBasis',
           'SubmoduleDefect', 'submodule_from_generators', 'restricted_tuple',
           'submodule_defect', 'rank_one_decomposition_check',
           'submodule_maximality_experiment', 'submodule_poisson_test',
           'ModelSpaceTheta', 'blaschke_model', 'blaschke_taylor',
           'quotient_theta_maximality']


def da_weight(alpha):
    """Squared norm ``alpha! / |alpha|!`` of the monomial ``z^alpha`` in ``H^2_d``."""
    return prod(factorial(a) for a in alpha) / factorial(sum(alpha))


def kernel_expansion_gram(d, n):
    """Gram matrix of the monomials of degree ``<= n``, read off the kernel.

    ``1/(1 - <z, lam>) = sum_k (sum_j z_j conj(lam_j))^k`` is expanded by
    repeated polynomial multiplication; the coefficient matrix ``C`` of
    ``z^alpha conj(lam)^beta`` satisfies ``G = C^{-1}`` for the Gram matrix ``G``.
    """
    basis = enumerate_multiindices(d, n)
    index = {a: i for i, a in enumerate(basis)}
    s = {}
    for j in range(d):
        e = [0] * (2 * d)
        e[j] = 1
        e[d + j] = 1
        s[tuple(e)] = 1
    power = {(0,) * (2 * d): 1}
    total = dict(power)
    for _ in range(n):
        nxt = {}
        for e1, c1 in power.items():
            for e2, c2 in s.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                nxt[e] = nxt.get(e, 0) + c1 * c2
        power = nxt
        for e, c in power.items():
            total[e] = total.get(e, 0) + c
    C = np.zeros((len(basis), len(basis)))
    for e, c in total.items():
        C[index[e[:d]], index[e[d:]]] = c
    return basis, np.linalg.inv(C)


def weight_gate(d, n=4, atol=1e-12):
    """Max deviation between the kernel-expansion Gram matrix and ``diag(weights)``."""
    basis, G = kernel_expansion_gram(d, n)
    W = np.diag([da_weight(a) for a in basis])
    err = float(np.max(np.abs(G - W)))
    if err > atol:
        raise RowDefectError('monomial weights disagree with the kernel expansion: %.3e' % err)
    return err


class DATruncation:
    """Polynomials of total degree ``<= N`` in ``d`` variables."""

    def __init__(self, d, N):
        if d < 1 or N < 0:
            raise ValueError('need d >= 1 and N >= 0')
        self.d = d
        self.N = N
        self.basis = enumerate_multiindices(d, N)
        self.index = {a: i for i, a in enumerate(self.basis)}
        self.weights = np.array([da_weight(a) for a in self.basis])

    @property
    def dim(self):
        return len(self.basis)

    def degrees(self):
        return np.array([sum(a) for a in self.basis])

    def poly_to_coords(self, p):
        """Orthonormal-basis coordinates of the polynomial ``p``."""
        v = np.zeros(self.dim, dtype=np.complex128)
        for alpha, c in p.items():
            if sum(alpha) > self.N:
                raise ValueError('term %s exceeds degree %d' % (alpha, self.N))
            v[self.index[tuple(alpha)]] += c * np.sqrt(da_weight(alpha))
        return v

    def coords_to_poly(self, v, cutoff=1e-14):
        c = np.asarray(v) / np.sqrt(self.weights)
        return {a: complex(c[i]) for i, a in enumerate(self.basis) if abs(c[i]) > cutoff}

    def shift_matrices(self):
        """``M_{z_i}`` compressed to degrees ``<= N`` in orthonormal coordinates."""
        mats = []
        for i in range(self.d):
            M = np.zeros((self.dim, self.dim), dtype=np.complex128)
            for col, a in enumerate(self.basis):
                k = sum(a)
                if k < self.N:
                    b = a[:i] + (a[i] + 1,) + a[i + 1:]
                    # ||z^b||^2 / ||z^a||^2 = (a_i + 1) / (|a| + 1)
                    M[self.index[b], col] = np.sqrt((a[i] + 1) / (k + 1))
            mats.append(M)
        return mats

    def multiplier_matrix(self, p):
        """Multiplication by the polynomial ``p``, truncated to degree ``N``."""
        mats = self.shift_matrices()
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for alpha, c in p.items():
            M = np.eye(self.dim, dtype=np.complex128)
            for i, a in enumerate(alpha):
                for _ in range(a):
                    M = mats[i] @ M
            out += c * M
        return out

    def __repr__(self):
        return 'DATruncation(d=%d, N=%d, dim=%d)' % (self.d, self.N, self.dim)


def dshift(d, N, tol=DEFAULT_TOL):
    """The ``d``-shift compressed to polynomials of degree ``<= N``."""
    if N < 1:
        raise ValueError('N must be >= 1')
    return validate_tuple(DATruncation(d, N).shift_matrices(), commuting=True, tol=tol)


def poly_degree(p):
    return max(sum(a) for a, c in p.items() if c != 0)


def is_homogeneous(p):
    return len({sum(a) for a, c in p.items() if c != 0}) == 1


def poly_to_json(p, d):
    return {'d': d, 'terms': [{'alpha': list(a), 'coef': [complex(c).real, complex(c).imag]}
                              for a, c in sorted(p.items(), key=lambda t: (sum(t[0]), t[0]))]}


def poly_from_json(obj):
    d = int(obj['d'])
    p = {}
    for term in obj['terms']:
        alpha = tuple(int(x) for x in term['alpha'])
        if len(alpha) != d or min(alpha, default=0) < 0:
            raise ValueError('bad exponent vector %r for d = %d' % (alpha, d))
        re, im = term['coef']
        p[alpha] = p.get(alpha, 0) + complex(re, im)
    return d, p


def weighted_gram_schmidt(vectors, weights, rtol=1e-10, passes=2):
    """Modified Gram-Schmidt in the inner product ``<u, v> = sum_k w_k conj(u_k) v_k``.

    Columns whose residual after ``passes`` sweeps falls below ``rtol`` times
    their original weighted norm are dropped as dependent. Returns the
    orthonormal columns (coefficients in the original, unweighted basis) and
    the indices of the kept input columns.
    """
    V = np.array(vectors, dtype=np.complex128)
    w = np.asarray(weights, dtype=float)

    def inner(u, v):
        return np.vdot(u * w, v)

    Q, kept = [], []
    for j in range(V.shape[1]):
        v = V[:, j].copy()
        norm0 = np.sqrt(inner(v, v).real)
        if norm0 == 0.0:
            continue
        for _ in range(passes):
            for q in Q:
                v -= inner(q, v) * q
        nv = np.sqrt(inner(v, v).real)
        if nv <= rtol * norm0:
            continue
        Q.append(v / nv)
        kept.append(j)
    if not Q:
        return np.zeros((V.shape[0], 0), dtype=np.complex128), kept
    return np.column_stack(Q), kept


@dataclass(frozen=True, eq=False)
class SubmoduleBasis:
    """Truncation ``S_N = span{z^beta p_i : |beta| + deg p_i <= N}`` of a submodule.

    ``basis`` holds orthonormal coordinates inside the truncated module.
    ``certified_defect_depth`` is ``N - 1 - g`` with ``g`` the largest generator
    degree; for homogeneous generators, defect data up to that depth agree
    with the untruncated submodule.
    """
    d: int
    N: int
    generators: tuple
    basis: Subspace
    degree: int
    homogeneous: bool

    @property
    def certified_defect_depth(self):
        return self.N - 1 - self.degree

    @property
    def dim(self):
        return self.basis.dim

    @property
    def truncation(self):
        return DATruncation(self.d, self.N)

    def grown(self, extra=2):
        return submodule_from_generators(self.generators, self.d, self.N + extra)


def submodule_from_generators(polys, d, N, tol=DEFAULT_TOL):
    """Orthonormal basis of the degree-``N`` part of the submodule generated by ``polys``.

    Raises
    ------
    ValueError
        If every generator is zero or a generator has degree above ``N``.
    """
    gens = [{tuple(a): complex(c) for a, c in p.items() if c != 0} for p in polys]
    gens = [p for p in gens if p]
    if not gens:
        raise ValueError('at least one nonzero generator is required')
    for p in gens:
        if any(len(a) != d for a in p):
            raise ValueError('generator exponents must have length d = %d' % d)
    g = max(poly_degree(p) for p in gens)
    if g > N:
        raise ValueError('generator degree %d exceeds N = %d' % (g, N))
    da = DATruncation(d, N)
    cols = []
    for k in range(N + 1):
        for p in gens:
            dp = poly_degree(p)
            if dp > k:
                continue
            for beta in multiindices_of_degree(d, k - dp):
                col = np.zeros(da.dim, dtype=np.complex128)
                for a, c in p.items():
                    col[da.index[tuple(x + y for x, y in zip(a, beta))]] += c
                cols.append(col)
    Qm, _ = weighted_gram_schmidt(np.column_stack(cols), da.weights, rtol=tol.rank_rtol)
    B = Qm * np.sqrt(da.weights)[:, None]
    return SubmoduleBasis(d, N, tuple(gens), Subspace(B), g,
                          all(is_homogeneous(p) for p in gens))


def restricted_tuple(S, tol=DEFAULT_TOL):
    """``P_{S_N} M_{z_i}|_{S_N}`` in the orthonormal basis of ``S_N``.

    Raises
    ------
    CommutatorError
        If the compression fails to commute, which can happen for
        non-homogeneous generators in ``d >= 2``.
    """
    B = S.basis.basis
    mats = [B.conj().T @ M @ B for M in S.truncation.shift_matrices()]
    try:
        return validate_tuple(mats, commuting=True, tol=tol)
    except CommutatorError as exc:
        raise CommutatorError('truncated restriction does not commute (%.3e); '
                              'use homogeneous generators' % exc.residual,
                              exc.residual) from None


@dataclass(frozen=True, eq=False)
class SubmoduleDefect:
    """Defect data of the restricted tuple ``R_S``.

    ``D2`` and ``D1`` are expressed in the orthonormal basis of ``S_N``;
    ``D1_ambient`` gives the same defect space inside the truncated module.
    """
    D2: np.ndarray
    D1: Subspace
    D1_ambient: Subspace
    profile: object

    def as_dict(self):
        return {'delta': self.D1.dim, **self.profile.as_dict()}


def submodule_defect(S, n_max=None, tol=DEFAULT_TOL):
    """``D_{R_S}^2``, the first defect space and the defect profile of ``R_S``.

    Profile entries beyond ``S.certified_defect_depth`` are computed but
    flagged uncertified.
    """
    T = restricted_tuple(S, tol)
    eye = np.eye(T.dim)
    D2 = eye - cp_map(T, eye)
    D1 = column_space(D2, tol, tol.identity_atol)
    n_max = n_max or max(S.certified_defect_depth, 1)
    prof = defect_sequence(T, n_max, certified_depth=S.certified_defect_depth)
    return SubmoduleDefect(D2, D1, Subspace(S.basis.basis @ D1.basis), prof)


def rank_one_decomposition_check(S, phis, tol=DEFAULT_TOL):
    """Residuals of ``P_S = sum M_phi M_phi^*`` and ``D^2 = sum |phi><phi|``.

    Both are measured (Frobenius norm) on the interior block of degrees
    ``<= N - max deg phi``, where the truncation is exact.
    """
    da = S.truncation
    g = max(poly_degree(p) for p in phis)
    inner = np.flatnonzero(da.degrees() <= S.N - g)
    B = S.basis.basis
    PS = B @ B.conj().T
    MM = sum(da.multiplier_matrix(p) @ da.multiplier_matrix(p).conj().T for p in phis)
    defect = submodule_defect(S, 1, tol)
    D2_amb = B @ defect.D2 @ B.conj().T
    vecs = [da.poly_to_coords(p) for p in phis]
    R1 = sum(np.outer(v, v.conj()) for v in vecs)
    ix = np.ix_(inner, inner)
    return {'projection_residual': float(np.linalg.norm((PS - MM)[ix])),
            'defect_residual': float(np.linalg.norm((D2_amb - R1)[ix])),
            'interior_degree': S.N - g}


def _check_defect_stable(S, tol):
    d1 = submodule_defect(S, 1, tol).D1.dim
    d2 = submodule_defect(S.grown(2), 1, tol).D1.dim
    if d1 != d2:
        raise CertificationError(
            'first defect index changes from %d to %d when N grows by 2; the defect '
            'looks infinite and no maximality verdict is issued' % (d1, d2))
    return d1


def submodule_maximality_experiment(S, horizon, tol=DEFAULT_TOL):
    """Commuting maximality verdict for ``R_S`` inside the certified window.

    Raises
    ------
    CertificationError
        If ``horizon`` exceeds the certified depth, or the first defect index
        is not stable under growing the truncation.
    """
    if horizon > S.certified_defect_depth:
        raise CertificationError('horizon %d exceeds the certified depth %d'
                                 % (horizon, S.certified_defect_depth))
    _check_defect_stable(S, tol)
    return is_maximal(restricted_tuple(S, tol), horizon, 'commuting')


def submodule_poisson_test(S, n, tol=DEFAULT_TOL):
    """``dim[(polynomials of degree <= n (x) D_1) cap ker K(R_S)^*]``.

    The columns are ``z^alpha D_{R_S} xi_j`` for ``|alpha| <= n``.
    """
    if n > S.certified_defect_depth:
        raise CertificationError('n = %d exceeds the certified depth %d'
                                 % (n, S.certified_defect_depth))
    T = restricted_tuple(S, tol)
    D1 = column_space(np.eye(T.dim) - cp_map(T, np.eye(T.dim)), tol, tol.identity_atol)
    vecs = monomial_vectors(T, defect_operator(T) @ D1.basis, n)
    A = np.hstack([vecs[a] for a in enumerate_multiindices(S.d, n)])
    return null_space(A, tol).dim


def blaschke_taylor(zeros, N):
    """Taylor coefficients ``theta_0..theta_N`` of ``prod (z - a)/(1 - conj(a) z)``."""
    num = np.array([1.0 + 0j])
    den = np.array([1.0 + 0j])
    for a in zeros:
        num = np.convolve(num, [-a, 1.0])
        den = np.convolve(den, [1.0, -np.conj(a)])
    num = np.pad(num, (0, max(0, N + 1 - num.size)))[:N + 1]
    den = np.pad(den, (0, max(0, N + 1 - den.size)))[:N + 1]
    q = np.zeros(N + 1, dtype=np.complex128)
    for k in range(N + 1):
        q[k] = num[k] - np.dot(den[1:k + 1], q[k - 1::-1][:k]) if k else num[0]
    return q


@dataclass(frozen=True, eq=False)
class ModelSpaceTheta:
    """``H_theta = H^2 (-) theta H^2`` for a finite Blaschke product, truncated at ``N``.

    ``basis`` lives in ``C^{N+1}`` (Taylor coordinates); ``R`` is the
    compressed shift in that basis. ``tail_bound`` estimates the truncation
    error of the kernel functions spanning ``H_theta``.
    """
    zeros: tuple
    N: int
    taylor: np.ndarray
    basis: Subspace
    R: object
    tail_bound: float

    @property
    def degree(self):
        return len(self.zeros)

    @property
    def is_polynomial(self):
        return all(a == 0 for a in self.zeros)

    def v_direct(self, i):
        """``P_{H_theta} z^i`` by orthogonal projection."""
        e = np.zeros(self.N + 1, dtype=np.complex128)
        e[i] = 1.0
        B = self.basis.basis
        return B @ (B.conj().T @ e)

    def v_formula(self, i):
        """``z^i - (sum_{k<=i} conj(theta_k) z^{i-k}) theta`` from Taylor data."""
        poly = np.zeros(self.N + 1, dtype=np.complex128)
        for k in range(i + 1):
            poly[i - k] = np.conj(self.taylor[k])
        out = -np.convolve(poly, self.taylor)[:self.N + 1]
        out[i] += 1.0
        return out

    def v_residual(self, imax):
        return max(float(np.linalg.norm(self.v_direct(i) - self.v_formula(i)))
                   for i in range(imax + 1))


def blaschke_model(zeros=None, N=None, power=None, tol=DEFAULT_TOL):
    """Model space and compressed shift for ``theta`` with the given zeros.

    Pass ``power=m`` for ``theta = z^m``. The space is spanned by the
    (derivative) kernel functions ``z^j / (1 - conj(a) z)^{j+1}``.
    """
    if power is not None:
        zeros = [0.0] * power
    zeros = tuple(complex(a) for a in zeros)
    if not zeros:
        raise ValueError('theta must have at least one zero')
    if any(abs(a) >= 1 for a in zeros):
        raise ValueError('Blaschke zeros must lie in the open unit disc')
    m = len(zeros)
    N = 2 * m if N is None else N
    if N < 2 * m:
        raise ValueError('N must be at least twice the degree of theta')
    cols, seen = [], {}
    tail = 0.0
    k = np.arange(N + 1)
    for a in zeros:
        j = seen.get(a, 0)
        seen[a] = j + 1
        col = np.zeros(N + 1, dtype=np.complex128)
        mask = k >= j
        col[mask] = [comb(int(t), j) * np.conj(a) ** (t - j) for t in k[mask]]
        cols.append(col)
        tail = max(tail, comb(N + 1, j) * abs(a) ** (N + 1 - j))
    basis = column_space(np.column_stack(cols), tol)
    if basis.dim != m:
        raise RowDefectError('model space has dimension %d, expected %d' % (basis.dim, m))
    shift = np.diag(np.ones(N, dtype=np.complex128), -1)
    B = basis.basis
    R = validate_tuple([B.conj().T @ shift @ B], commuting=True, tol=tol)
    return ModelSpaceTheta(zeros, N, blaschke_taylor(zeros, N), basis, R, tail)


@dataclass(frozen=True)
class ThetaReport:
    dim: int
    theta_is_polynomial: bool
    minimal_polynomial_degree: int
    annihilator_degree: Optional[int]
    numerator_alignment: float
    maximal: bool
    deltas: tuple

    def as_dict(self):
        return dict(self.__dict__)


def quotient_theta_maximality(zeros=None, N=None, horizon=None, power=None,
                              tol=DEFAULT_TOL):
    """Compare the model operator's annihilator with the numerator of ``theta``.

    ``numerator_alignment`` is the distance between the normalized annihilator
    coefficients and the normalized coefficients of ``prod (z - a)``.
    """
    model = blaschke_model(zeros, N, power, tol)
    R = model.R
    horizon = horizon or model.degree + 1
    mp = minimal_polynomial(R)
    ann = find_annihilator(R, model.degree)
    num = np.array([1.0 + 0j])
    for a in model.zeros:
        num = np.convolve(num, [-a, 1.0])
    num = num / np.linalg.norm(num)
    k0 = np.flatnonzero(np.abs(num) > 1e-12)[0]
    num = num * abs(num[k0]) / num[k0]
    align = float('inf')
    if ann is not None:
        c = np.zeros(ann.degree + 1, dtype=np.complex128)
        for w, v in ann.coefficients.items():
            c[sum(w) if ann.mode == 'commuting' else len(w)] = v
        if c.size == num.size:
            align = float(np.linalg.norm(c - num))
    verdict = is_maximal(R, horizon)
    return ThetaReport(R.dim, model.is_polynomial, mp.degree,
                       None if ann is None else ann.degree, align,
                       verdict.is_maximal, verdict.deltas)
