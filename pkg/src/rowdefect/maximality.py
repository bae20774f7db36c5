"""Maximality verdicts, annihilating polynomials on the first defect space,
and minimal polynomials of single contractions."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import HypothesisViolation, NoDefectError
from .linalg import as_matrix, numerical_rank
from .tuples import defect_sequence, defect_space, purity_report
from .words import (enumerate_multiindices, enumerate_words, max_count,
                    monomial_vectors, word_vectors)

__all__ = ['MaximalityVerdict', 'AnnihilatorResult', 'DepartureReport',
           'MinimalPolynomial', 'resolve_mode', 'expected_profile',
           'is_maximal', 'find_annihilator', 'departure_consistency',
           'minimal_polynomial', 'family_labels', 'first_dependence']

COMMUTING = 'commuting'
NON_COMMUTING = 'non-commuting'


def resolve_mode(T, mode=None):
    if mode is None:
        return COMMUTING if T.commuting else NON_COMMUTING
    if mode not in (COMMUTING, NON_COMMUTING):
        raise ValueError('mode must be %r or %r' % (COMMUTING, NON_COMMUTING))
    return mode


def family_labels(d, degree, mode):
    """Words (or multi-indices in commuting mode) of degree ``<= degree``."""
    if mode == COMMUTING:
        return enumerate_multiindices(d, degree)
    return enumerate_words(d, degree)


def _family(T, X, degree, mode):
    if mode == COMMUTING:
        return monomial_vectors(T, X, degree)
    return word_vectors(T, X, degree)


def _normalize(c):
    c = c / np.linalg.norm(c)
    k = np.flatnonzero(np.abs(c) > 1e-12 * np.abs(c).max())[0]
    return c * (abs(c[k]) / c[k])


def first_dependence(columns, tol):
    """Locate the first column that depends on its predecessors.

    Returns ``(j, coef)`` where ``coef`` (length ``j + 1``) is a unit vector
    with ``columns[:, :j+1] @ coef ~ 0``, or ``None`` when the columns are
    numerically independent. The coefficient of column ``j`` is nonzero.
    """
    A = as_matrix(columns)
    n = A.shape[1]

    def full_rank(k):
        if k == 0:
            return True
        s = np.linalg.svd(A[:, :k], compute_uv=False)
        return numerical_rank(s, tol) == k

    if full_rank(n):
        return None
    lo, hi = 0, n  # prefix lo is full rank, prefix hi is not
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if full_rank(mid):
            lo = mid
        else:
            hi = mid
    _, _, Vh = np.linalg.svd(A[:, :hi])
    return hi - 1, _normalize(Vh[-1].conj())


def expected_profile(d, horizon, delta, dim, mode, capped=True):
    commuting = mode == COMMUTING
    out = []
    for n in range(1, horizon + 1):
        v = max_count(d, n, delta, commuting)
        out.append(min(v, dim) if capped else v)
    return out


@dataclass(frozen=True)
class MaximalityVerdict:
    """Outcome of comparing a defect sequence with its largest possible growth.

    ``departure_index`` is the first ``n`` where ``Delta^n`` falls short of
    ``min(max_count, dim)``. ``witness`` lists ``(label, basis_index, coef)``
    triples: a linear dependence among the vectors ``T_f xi_i`` (words ``f``)
    or ``T^alpha xi_i`` (multi-indices) with ``|f| < departure_index``;
    ``witness_residual`` is the norm of that combination.
    """
    is_maximal: bool
    mode: str
    horizon: int
    departure_index: Optional[int]
    deltas: tuple
    expected: tuple
    witness: tuple = ()
    witness_residual: Optional[float] = None
    uncapped_departure: Optional[int] = None

    def as_dict(self):
        key = 'alpha' if self.mode == COMMUTING else 'word'
        return {
            'is_maximal': self.is_maximal, 'mode': self.mode, 'horizon': self.horizon,
            'departure_index': self.departure_index,
            'deltas': list(self.deltas), 'expected': list(self.expected),
            'witness': [{key: list(lab), 'basis': i, 'coef': [c.real, c.imag]}
                        for lab, i, c in self.witness],
            'witness_residual': self.witness_residual,
        }


def _witness(T, D1, level, mode):
    labels = family_labels(T.arity, level - 1, mode)
    vecs = _family(T, D1.basis, level - 1, mode)
    cols, keys = [], []
    for lab in labels:
        for i in range(D1.dim):
            cols.append(vecs[lab][:, i])
            keys.append((lab, i))
    A = np.column_stack(cols)
    found = first_dependence(A, T.tol)
    if found is None:
        return (), None
    j, coef = found
    residual = float(np.linalg.norm(A[:, :j + 1] @ coef))
    witness = tuple((keys[k][0], keys[k][1], complex(coef[k]))
                    for k in range(j + 1) if abs(coef[k]) > 1e-14)
    return witness, residual


def is_maximal(T, horizon, mode=None):
    """Decide maximality of ``T`` over ``n = 1..horizon``.

    In dimension ``m`` the target for ``Delta^n`` is
    ``min(max_count(d, n, Delta_T), m)``.

    Raises
    ------
    NoDefectError
        If ``Delta_T = 0``.
    """
    mode = resolve_mode(T, mode)
    prof = defect_sequence(T, horizon)
    delta = prof.deltas[0]
    if delta == 0:
        raise NoDefectError('tuple has no defect (Delta_T = 0); maximality is undefined')
    expected = expected_profile(T.arity, horizon, delta, T.dim, mode)
    uncapped = expected_profile(T.arity, horizon, delta, T.dim, mode, capped=False)
    dep = next((n + 1 for n in range(horizon) if prof.deltas[n] < expected[n]), None)
    udep = next((n + 1 for n in range(horizon) if prof.deltas[n] < uncapped[n]), None)
    witness, residual = (), None
    if dep is not None:
        witness, residual = _witness(T, prof.spaces[0], dep, mode)
    return MaximalityVerdict(dep is None, mode, horizon, dep, prof.deltas,
                             tuple(expected), witness, residual, udep)


@dataclass(frozen=True)
class AnnihilatorResult:
    """A minimal-degree polynomial ``P`` with ``P(T)|_{D_1} ~ 0``.

    ``coefficients`` maps words (or multi-indices) to complex coefficients.
    ``certificates[k]`` is the ratio ``sigma_min / sigma_max`` of the family
    of degree ``<= k``, recorded for each degree below ``degree`` where the
    family was certified full rank.
    """
    degree: int
    mode: str
    coefficients: dict
    residual: float
    certificates: tuple = field(default=())

    def as_dict(self):
        key = 'alpha' if self.mode == COMMUTING else 'word'
        return {'degree': self.degree, 'mode': self.mode, 'residual': self.residual,
                'coefficients': [{key: list(k), 'coef': [v.real, v.imag]}
                                 for k, v in self.coefficients.items()],
                'certificates': list(self.certificates)}


def find_annihilator(T, max_degree, mode=None):
    """Lowest-degree polynomial vanishing on the first defect space.

    Columns ``vec(T_f B)`` (``B`` an orthonormal basis of ``D_1``) are added
    degree by degree in canonical order; the first column depending on its
    predecessors yields ``P``. Returns ``None`` when the family stays full
    rank through ``max_degree``.
    """
    mode = resolve_mode(T, mode)
    D1 = defect_space(T, 1)
    if D1.dim == 0:
        raise NoDefectError('tuple has no defect (Delta_T = 0)')
    labels = family_labels(T.arity, max_degree, mode)
    vecs = _family(T, D1.basis, max_degree, mode)
    A = np.column_stack([vecs[lab].ravel(order='F') for lab in labels])
    degree_of = [sum(lab) if mode == COMMUTING else len(lab) for lab in labels]
    certificates = []
    for k in range(max_degree + 1):
        ncols = sum(1 for g in degree_of if g <= k)
        s = np.linalg.svd(A[:, :ncols], compute_uv=False)
        if numerical_rank(s, T.tol) < ncols:
            found = first_dependence(A[:, :ncols], T.tol)
            j, coef = found
            coeffs = {labels[i]: complex(coef[i]) for i in range(j + 1)
                      if abs(coef[i]) > 1e-14}
            P = sum(c * vecs[lab] for lab, c in coeffs.items())
            residual = float(np.linalg.norm(P, 2))
            return AnnihilatorResult(degree_of[j], mode, coeffs, residual,
                                     tuple(certificates))
        certificates.append(float(s.min() / s.max()))
    return None


@dataclass(frozen=True)
class DepartureReport:
    """Departure index of the uncapped growth versus the annihilator degree.

    When the defect count first falls below ``1 + d + ... + d^{n-1}`` at
    ``n = uncapped_departure``, the lowest-degree annihilator has degree
    ``n - 1``, because ``D_n`` is spanned by words of length ``<= n - 1``.
    ``consistent`` records whether that relation holds (or both are absent).
    """
    horizon: int
    capped_departure: Optional[int]
    uncapped_departure: Optional[int]
    annihilator_degree: Optional[int]
    consistent: bool

    def as_dict(self):
        return dict(self.__dict__)


def departure_consistency(T, horizon, mode=None):
    mode = resolve_mode(T, mode)
    verdict = is_maximal(T, horizon, mode)
    if verdict.deltas[0] != 1:
        raise HypothesisViolation('departure analysis needs Delta_T = 1, got %d'
                                  % verdict.deltas[0])
    ann = find_annihilator(T, horizon - 1, mode)
    udep = verdict.uncapped_departure
    deg = None if ann is None else ann.degree
    if udep is None:
        ok = deg is None
    else:
        ok = deg is not None and udep == deg + 1
    return DepartureReport(horizon, verdict.departure_index, udep, deg, ok)


@dataclass(frozen=True)
class MinimalPolynomial:
    """Monic minimal polynomial of a single matrix.

    ``coefficients`` are in ascending powers, the last one equal to 1.
    ``defect_annihilator_degree`` is the degree of the lowest annihilator on
    ``D_1`` (``None`` when ``Delta_T = 0``); it never exceeds ``degree``.
    """
    coefficients: tuple
    residual: float
    defect_annihilator_degree: Optional[int]
    dim: int
    pure: bool

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def as_dict(self):
        return {'degree': self.degree,
                'coefficients': [[c.real, c.imag] for c in self.coefficients],
                'residual': self.residual,
                'defect_annihilator_degree': self.defect_annihilator_degree,
                'dim': self.dim, 'pure': self.pure}


def minimal_polynomial(T):
    """Minimal polynomial of a single contraction by the Krylov rank method.

    The vectors ``vec(I), vec(T), vec(T^2), ...`` are accumulated until one
    depends on its predecessors.
    """
    if T.arity != 1:
        raise ValueError('minimal_polynomial needs a single operator (d = 1), got d = %d'
                         % T.arity)
    A = T.matrices[0]
    m = T.dim
    powers = [np.eye(m, dtype=np.complex128)]
    coef = None
    for k in range(1, m + 1):
        powers.append(powers[-1] @ A)
        K = np.column_stack([P.ravel() for P in powers])
        scale = np.linalg.norm(K, axis=0)
        if scale[-1] <= T.tol.identity_atol:
            coef = np.zeros(k + 1, dtype=np.complex128)
            coef[-1] = 1.0
            break
        s = np.linalg.svd(K / scale, compute_uv=False)
        if numerical_rank(s, T.tol) < k + 1:
            sol, *_ = np.linalg.lstsq(K[:, :k], -K[:, k], rcond=None)
            coef = np.append(sol, 1.0)
            break
    residual = float(np.linalg.norm(sum(c * P for c, P in zip(coef, powers)), 2))
    D1 = defect_space(T, 1)
    ann = find_annihilator(T, len(coef) - 1) if D1.dim else None
    pure = purity_report(T, max(4 * m, 50)).pure_at_tolerance
    return MinimalPolynomial(tuple(complex(c) for c in coef), residual,
                             None if ann is None else ann.degree, m, pure)
