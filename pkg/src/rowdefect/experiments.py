"""Random tuples, named scenarios, the battery zoo and the randomized property suite."""
import csv
from concurrent.futures import ThreadPoolExecutor
import io
import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .drury_arveson import (blaschke_model, submodule_defect,
                            submodule_from_generators,
                            submodule_maximality_experiment, weight_gate, dshift)
from .errors import RowDefectError
from .fock import (FockTruncation, compress_to_coinvariant, creation_tuple,
                   poisson_adjoint_apply, poisson_kernel, pure_maximality_battery)
from .linalg import (DEFAULT_TOL, Subspace, TolerancePolicy, column_space,
                     null_space, projection_distance)
from .maximality import is_maximal
from .tuples import (check_profile_bounds, defect_sequence, defect_space,
                     defect_space_by_join, semigroup_split,
                     sum_formula_residual, validate_tuple)

__all__ = ['random_contractive_tuple', 'random_tuple_family', 'nilpotent_shift',
           'ExperimentConfig', 'SCENARIOS', 'run', 'battery_zoo',
           'property_suite', 'write_report', 'csv_rows']

SCENARIO_VERSION = 1


def nilpotent_shift(m, tol=DEFAULT_TOL):
    """``e_i -> e_{i+1}`` on ``C^m``."""
    return validate_tuple([np.diag(np.ones(m - 1), -1)], commuting=True, tol=tol)


def random_contractive_tuple(d, m, commuting=False, seed=0, eps=1e-3, defect_rank=None,
                             tol=DEFAULT_TOL):
    """Draw a strictly contractive ``d``-tuple on ``C^m``, deterministic in ``seed``.

    Commuting tuples are random polynomials in one random matrix. With
    ``defect_rank = r`` (non-commuting only) the tuple is ``C W_i`` for a row
    isometry ``W`` and a contraction ``C`` with ``rank(I - C C^*) = r``, so the
    first defect space is a proper subspace.
    """
    if d < 1 or m < 1:
        raise ValueError('need d >= 1 and m >= 1')
    rng = np.random.default_rng(seed)

    def gauss(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    if defect_rank is not None and not commuting:
        Q, _ = np.linalg.qr(gauss(d * m, m))
        W = Q.conj().T
        U, _ = np.linalg.qr(gauss(m, m))
        c = np.ones(m)
        c[m - defect_rank:] = rng.uniform(0.1, 0.9, defect_rank)
        C = (U * c) @ U.conj().T
        return validate_tuple([C @ W[:, i * m:(i + 1) * m] for i in range(d)], tol=tol)
    if commuting:
        A = gauss(m, m)
        A /= np.linalg.norm(A, 2)
        powers = [np.eye(m), A, A @ A]
        G = [sum(c * P for c, P in zip(gauss(3), powers)) for _ in range(d)]
    else:
        G = [gauss(m, m) for _ in range(d)]
    row = sum(M @ M.conj().T for M in G)
    s = (1 - eps) / np.sqrt(np.linalg.norm(row, 2))
    return validate_tuple([s * M for M in G], commuting=commuting, tol=tol)


def random_tuple_family(count, seed=0, d_max=3, m_max=8, depth_max=4, tol=DEFAULT_TOL):
    """``count`` random tuples with random shapes and truncation depths.

    Yields ``(sub_seed, T, N)``; half of the draws carry a low-rank defect.
    """
    rng = np.random.default_rng(seed)
    for k in range(count):
        sub = int(rng.integers(2 ** 31))
        d = int(rng.integers(1, d_max + 1))
        m = int(rng.integers(1, m_max + 1))
        N = int(rng.integers(0, depth_max + 1))
        rank = int(rng.integers(1, m + 1)) if k % 2 else None
        yield sub, random_contractive_tuple(d, m, seed=sub, defect_rank=rank, tol=tol), N


def _invariant_span(fock, vectors):
    """Smallest subspace containing ``vectors`` and invariant under compressed creation."""
    mats = [creation_tuple(fock.d, fock.N).matrices][0]
    cols = list(vectors)
    frontier = list(vectors)
    for _ in range(fock.N):
        frontier = [M @ v for v in frontier for M in mats]
        cols.extend(frontier)
    return column_space(np.column_stack(cols))


def coinvariant_complement(d, N, vectors):
    """Co-invariant ``Q``: the orthocomplement of the invariant span of ``vectors``."""
    fock = FockTruncation(d, N)
    inv = _invariant_span(fock, vectors)
    return null_space(inv.basis.conj().T) if inv.dim else Subspace.full(fock.dim)


def _word_difference(fock, f, g):
    v = np.zeros(fock.dim, dtype=np.complex128)
    v[fock.index[f]] = 1.0
    v[fock.index[g]] = -1.0
    return v


def battery_zoo():
    """Pure tuples with ``Delta = 1`` and their expected maximality in the window.

    Entries are ``(name, T, coinvariant, expected_maximal)`` where
    ``coinvariant`` is ``(Q, 1)`` for compressions of the creation tuple.
    """
    zoo = []
    for m in (3, 5, 8):
        zoo.append(('shift-c%d' % m, nilpotent_shift(m), None, True))
    for d, N in ((2, 2), (2, 3), (3, 2)):
        zoo.append(('creation-d%d-depth%d' % (d, N), creation_tuple(d, N), None, True))
    zoo.append(('blaschke-0.3,-0.4', blaschke_model([0.3, -0.4], N=60).R, None, True))
    zoo.append(('blaschke-0,0.5', blaschke_model([0.0, 0.5], N=60).R, None, True))
    fock = FockTruncation(2, 3)
    Q = Subspace.coordinate(fock.dim, range(fock.layer_count(2)))
    zoo.append(('coinv-gamma2-in-depth3', compress_to_coinvariant(2, 3, Q), (Q, 1), True))
    # Q^perp generated by e_1 - e_2: the vacuum's images under T_1 and T_2 coincide
    Q = coinvariant_complement(2, 3, [_word_difference(fock, (1,), (2,))])
    zoo.append(('coinv-e1-e2', compress_to_coinvariant(2, 3, Q), (Q, 1), False))
    # Q^perp generated by e_12 - e_21: a degree-two collision
    Q = coinvariant_complement(2, 3, [_word_difference(fock, (1, 2), (2, 1))])
    zoo.append(('coinv-e12-e21', compress_to_coinvariant(2, 3, Q), (Q, 1), False))
    zoo.append(('dshift-d2-n3-as-free', dshift(2, 3), None, False))
    zoo.append(('dshift-d3-n3-as-free', dshift(3, 3), None, False))
    return zoo


@dataclass
class ExperimentConfig:
    """What to run and where to write it."""
    scenario: str
    mode: Optional[str] = None
    d: Optional[int] = None
    m: Optional[int] = None
    N: Optional[int] = None
    horizon: Optional[int] = None
    rank_rtol: float = DEFAULT_TOL.rank_rtol
    identity_atol: float = DEFAULT_TOL.identity_atol
    seed: int = 0
    out: Optional[str] = None

    @property
    def tol(self):
        return TolerancePolicy(self.rank_rtol, self.identity_atol)

    @classmethod
    def from_dict(cls, obj):
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known - {'tol'}
        if extra:
            raise ValueError('unknown config keys: %s' % ', '.join(sorted(extra)))
        obj = dict(obj)
        tol = obj.pop('tol', None) or {}
        obj.update(tol)
        cfg = cls(**obj)
        cfg.tol  # validates ranges
        return cfg

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class Scenario:
    kind: str
    build: object
    horizon: int
    expect_deltas: tuple
    expect_maximal: bool
    description: str = ''


def _poly_gens(*monomials):
    return [{a: 1.0} for a in monomials]


def _hardy_poly(zeros):
    c = np.array([1.0 + 0j])
    for a in zeros:
        c = np.convolve(c, [-a, 1.0])
    return [{(k,): complex(c[k]) for k in range(c.size)}]


SCENARIOS = {
    'shift-c3': Scenario('tuple', lambda cfg: nilpotent_shift(3, cfg.tol), 4,
                         (1, 2, 3, 3), True, 'nilpotent shift on C^3'),
    'shift-c5': Scenario('tuple', lambda cfg: nilpotent_shift(5, cfg.tol), 6,
                         (1, 2, 3, 4, 5, 5), True, 'nilpotent shift on C^5'),
    'shift-c8': Scenario('tuple', lambda cfg: nilpotent_shift(8, cfg.tol), 9,
                         (1, 2, 3, 4, 5, 6, 7, 8, 8), True, 'nilpotent shift on C^8'),
    'creation-d2-depth3': Scenario('tuple', lambda cfg: creation_tuple(2, 3, cfg.tol), 5,
                                   (1, 3, 7, 15, 15), True, 'creation pair, depth 3'),
    'creation-d2-depth4': Scenario('tuple', lambda cfg: creation_tuple(2, 4, cfg.tol), 6,
                                   (1, 3, 7, 15, 31, 31), True, 'creation pair, depth 4'),
    'dshift-d2-n4': Scenario('tuple', lambda cfg: dshift(2, 4, cfg.tol), 6,
                             (1, 3, 6, 10, 15, 15), True, 'd-shift, d=2, degree 4'),
    'dshift-d3-n3': Scenario('tuple', lambda cfg: dshift(3, 3, cfg.tol), 5,
                             (1, 4, 10, 20, 20), True, 'd-shift, d=3, degree 3'),
    'da-ideal-z1z2-d2': Scenario(
        'submodule', lambda cfg: submodule_from_generators(
            _poly_gens((1, 0), (0, 1)), 2, cfg.N or 8, cfg.tol),
        5, (2, 5, 9, 14, 20), False, 'submodule of H^2_2 generated by z1, z2'),
    'hardy-z2': Scenario(
        'submodule', lambda cfg: submodule_from_generators(
            _poly_gens((2,)), 1, cfg.N or 20, cfg.tol),
        17, tuple(range(1, 18)), True, 'z^2 H^2'),
    'hardy-z3': Scenario(
        'submodule', lambda cfg: submodule_from_generators(
            _poly_gens((3,)), 1, cfg.N or 20, cfg.tol),
        16, tuple(range(1, 17)), True, 'z^3 H^2'),
    'hardy-blaschke': Scenario(
        'submodule', lambda cfg: submodule_from_generators(
            _hardy_poly([0.3, -0.4]), 1, cfg.N or 20, cfg.tol),
        17, tuple(range(1, 18)), True, 'theta H^2, zeros 0.3 and -0.4'),
    'model-theta-blaschke': Scenario(
        'model', lambda cfg: blaschke_model([0.3, -0.4], N=cfg.N or 60, tol=cfg.tol),
        3, (1, 2, 2), True, 'model space for zeros 0.3 and -0.4'),
}


def _run_scenario(name, cfg):
    sc = SCENARIOS[name]
    horizon = cfg.horizon or sc.horizon
    tol = cfg.tol
    failures = []
    report = {'scenario': name, 'version': SCENARIO_VERSION, 'kind': sc.kind,
              'description': sc.description, 'horizon': horizon}
    obj = sc.build(cfg)
    certified = None
    if sc.kind == 'submodule':
        weight_gate(obj.d)
        certified = obj.certified_defect_depth
        sd = submodule_defect(obj, horizon, tol)
        verdict = submodule_maximality_experiment(obj, min(horizon, certified), tol)
        report['profile'] = sd.as_dict()
        report['certified_defect_depth'] = certified
        report['submodule_dim'] = obj.dim
        deltas = sd.profile.deltas
    else:
        T = obj.R if sc.kind == 'model' else obj
        mode = cfg.mode or ('commuting' if T.commuting else 'non-commuting')
        verdict = is_maximal(T, horizon, mode)
        report['profile'] = defect_sequence(T, horizon).as_dict()
        deltas = verdict.deltas
    report['verdict'] = verdict.as_dict()
    k = min(len(deltas), len(sc.expect_deltas))
    if tuple(deltas[:k]) != sc.expect_deltas[:k]:
        failures.append('defect sequence %s != expected %s'
                        % (list(deltas), list(sc.expect_deltas)))
    if horizon == sc.horizon:
        if verdict.is_maximal != sc.expect_maximal:
            failures.append('verdict maximal=%s, expected %s'
                            % (verdict.is_maximal, sc.expect_maximal))
        if not verdict.is_maximal and (verdict.witness_residual is None
                                       or verdict.witness_residual > 1e-8):
            failures.append('witness residual %r is not below 1e-8' % verdict.witness_residual)
    report['failures'] = failures
    row = {'scenario': name, 'deltas': list(deltas), 'mode': verdict.mode,
           'certified_depth': certified,
           'verdict': 'maximal' if verdict.is_maximal else 'not-maximal'}
    return report, row


def csv_rows(rows):
    """CSV text: scenario, ``n=1..H`` defect indices, mode, certified depth, verdict."""
    width = max((len(r['deltas']) for r in rows), default=0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(['scenario'] + ['n=%d' % (n + 1) for n in range(width)]
               + ['mode', 'certified_depth', 'verdict'])
    for r in rows:
        pad = [''] * (width - len(r['deltas']))
        cd = '' if r['certified_depth'] is None else r['certified_depth']
        w.writerow([r['scenario']] + r['deltas'] + pad + [r['mode'], cd, r['verdict']])
    return buf.getvalue()


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + '\n'


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, tuple):
        return list(o)
    raise TypeError('not JSON serializable: %r' % type(o))


def write_report(out, report, rows=None, stem='report'):
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, stem + '.json'), 'w') as fh:
        fh.write(dumps(report))
    if rows is not None:
        with open(os.path.join(out, 'defect_sequences.csv'), 'w') as fh:
            fh.write(csv_rows(rows))


def run(config):
    """Execute one named scenario (or ``"all"``); return ``(report, rows, exit_code)``.

    Exit code 0 means every assertion held, 1 that one failed. Unknown
    scenarios raise ``KeyError``.
    """
    names = sorted(SCENARIOS) if config.scenario == 'all' else [config.scenario]
    for name in names:
        if name not in SCENARIOS:
            raise KeyError('unknown scenario %r; known: %s'
                           % (name, ', '.join(sorted(SCENARIOS))))
    # scenarios are independent; map() keeps the report order fixed
    with ThreadPoolExecutor(max_workers=min(4, len(names))) as pool:
        results = list(pool.map(lambda name: _run_scenario(name, config), names))
    reports = [rep for rep, _ in results]
    rows = [row for _, row in results]
    report = {'scenarios': reports, 'seed': config.seed,
              'tolerance': {'rank_rtol': config.rank_rtol,
                            'identity_atol': config.identity_atol},
              'passed': all(not r['failures'] for r in reports)}
    if config.out:
        write_report(config.out, report, rows)
    return report, rows, 0 if report['passed'] else 1


@dataclass
class SuiteResult:
    checks: int = 0
    failures: list = field(default_factory=list)

    def record(self, name, ok, seed, value):
        self.checks += 1
        if not ok:
            self.failures.append({'check': name, 'seed': seed, 'value': value})

    @property
    def passed(self):
        return not self.failures

    def as_dict(self):
        return {'checks': self.checks, 'failures': self.failures, 'passed': self.passed}


def tuple_identity_checks(T, N, seed, result, subspace_atol=1e-7):
    """Run the exact identities of one random tuple into ``result``."""
    atol = T.tol.identity_atol
    d = T.arity
    for n in range(1, 6):
        result.record('sum-formula', sum_formula_residual(T, n) < atol, seed,
                      sum_formula_residual(T, n))
    for n in range(1, 5):
        dist = projection_distance(defect_space_by_join(T, n), defect_space(T, n))
        result.record('join-formula', dist < subspace_atol, seed, dist)
    for m in range(2, 5):
        Dm = defect_space(T, m)
        for n in range(1, m):
            dist = projection_distance(semigroup_split(T, n, m), Dm)
            result.record('semigroup-split', dist < subspace_atol, seed, dist)
    prof = defect_sequence(T, 6)
    problems = check_profile_bounds(prof, d, T.commuting)
    result.record('monotone-and-bounded', not problems, seed, problems)
    for n in range(1, 5):
        Dn1 = prof.spaces[n]
        worst = 0.0
        for xi in prof.spaces[n - 1].basis.T:
            for M in T.matrices:
                v = M @ xi
                worst = max(worst, float(np.linalg.norm(v - Dn1.basis @ (Dn1.basis.conj().T @ v))))
        result.record('shift-into-next-defect', worst < 1e-8, seed, worst)
    if prof.deltas[0] == 0:
        return
    PK = poisson_kernel(T, N)
    g = PK.gram_residual(T)
    result.record('poisson-gram', g < atol, seed, g)
    it = PK.intertwining_residual(T)
    result.record('poisson-intertwining', it < atol, seed, it)
    worst = 0.0
    Kh = PK.K.conj().T
    for p, f in enumerate(PK.words):
        for j in range(PK.delta):
            col = poisson_adjoint_apply(T, f, PK.D1.basis[:, j])
            worst = max(worst, float(np.max(np.abs(col - Kh[:, p * PK.delta + j]))))
    result.record('poisson-adjoint', worst < atol, seed, worst)


def property_suite(seed=0, count=50, tol=DEFAULT_TOL, zoo=True):
    """Randomized invariant battery; failures carry reproduction seeds."""
    result = SuiteResult()
    for sub, T, N in _safe_family(count, seed, tol, result):
        tuple_identity_checks(T, N, sub, result)
    if zoo and count:
        for name, T, coinv, expected in battery_zoo():
            try:
                rep = pure_maximality_battery(T.with_tol(tol), 6, coinvariant=coinv)
            except RowDefectError as exc:
                result.record('battery-coherence', False, name, str(exc))
                continue
            result.record('battery-coherence', rep.agree and rep.maximal == expected,
                          name, rep.conditions)
    return result


def _safe_family(count, seed, tol, result):
    rng = np.random.default_rng(seed)
    for k in range(count):
        sub = int(rng.integers(2 ** 31))
        try:
            yield next(iter(random_tuple_family(1, sub, tol=tol)))
        except RowDefectError as exc:
            result.record('generate', False, sub, str(exc))
