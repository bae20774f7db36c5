"""Command-line entry point: ``rowdefect <subcommand> [options]``.

Exit status is 0 when every check passes, 1 when an assertion fails and 2
for configuration errors (bad arguments, unreadable files, unknown names).
"""
import argparse
import json
import os
import sys

from . import experiments as ex
from .drury_arveson import (poly_from_json, poly_to_json, quotient_theta_maximality,
                            submodule_defect, submodule_from_generators,
                            submodule_maximality_experiment,
                            submodule_poisson_test, weight_gate)
from .errors import CertificationError
from .fock import kernel_intersection_dim, poisson_kernel, pure_maximality_battery
from .linalg import TolerancePolicy
from .maximality import find_annihilator, is_maximal
from .tuples import defect_sequence, tuple_from_json, tuple_to_json


class ConfigError(Exception):
    pass


def _tol(args):
    try:
        return TolerancePolicy(args.rank_rtol, args.tol)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _load_config(args):
    """Merge ``--config`` JSON under explicit command-line flags."""
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError('cannot read config %s: %s' % (args.config, exc))
    if not isinstance(cfg, dict):
        raise ConfigError('config must be a JSON object')
    tol = cfg.pop('tol', None) or {}
    if 'identity_atol' in tol:
        cfg.setdefault('tol_atol', tol['identity_atol'])
    if 'rank_rtol' in tol:
        cfg.setdefault('rank_rtol', tol['rank_rtol'])
    for key, value in cfg.items():
        attr = 'tol' if key == 'tol_atol' else key.replace('-', '_')
        if not hasattr(args, attr):
            raise ConfigError('unknown config key %r for this subcommand' % key)
        if getattr(args, attr) is None or getattr(args, '_default_' + attr, False):
            setattr(args, attr, value)


def _tuple_input(args):
    tol = _tol(args)
    chosen = [x for x in (args.scenario, args.tuple, args.random) if x]
    if len(chosen) != 1:
        raise ConfigError('give exactly one of --scenario, --tuple, --random')
    if args.scenario:
        zoo = {name: T for name, T, _, _ in ex.battery_zoo()}
        sc = ex.SCENARIOS.get(args.scenario)
        if sc is not None and sc.kind in ('tuple', 'model'):
            obj = sc.build(ex.ExperimentConfig(args.scenario))
            T = obj.R if sc.kind == 'model' else obj
        elif args.scenario in zoo:
            T = zoo[args.scenario]
        else:
            raise ConfigError('unknown tuple scenario %r' % args.scenario)
        return T.with_tol(tol)
    if args.tuple:
        try:
            with open(args.tuple) as fh:
                return tuple_from_json(json.load(fh), tol)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError('cannot read tuple %s: %s' % (args.tuple, exc))
    try:
        d, m = (int(x) for x in str(args.random).split(','))
    except ValueError:
        raise ConfigError('--random expects "d,m"')
    return ex.random_contractive_tuple(d, m, args.commuting, args.seed, tol=tol)


def _emit(args, report, rows=None):
    """Write or print ``report``; CSV output needs ``rows``."""
    if args.format == 'csv':
        if rows is None:
            raise ConfigError('this subcommand has no CSV form')
        text = ex.csv_rows(rows)
    else:
        text = ex.dumps(report)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, 'report.json'), 'w') as fh:
            fh.write(ex.dumps(report))
        if rows is not None:
            with open(os.path.join(args.out, 'defect_sequences.csv'), 'w') as fh:
                fh.write(ex.csv_rows(rows))
    else:
        sys.stdout.write(text)


def _row(name, deltas, mode, verdict, certified=None):
    return {'scenario': name, 'deltas': list(deltas), 'mode': mode,
            'certified_depth': certified, 'verdict': verdict}


def cmd_defect_seq(args):
    T = _tuple_input(args)
    horizon = args.horizon or T.dim + 1
    prof = defect_sequence(T, horizon)
    mode = 'commuting' if T.commuting else 'non-commuting'
    report = {'input': _input_label(args), 'profile': prof.as_dict(), 'dim': T.dim,
              'arity': T.arity}
    _emit(args, report, [_row(_input_label(args), prof.deltas, mode, '')])
    return 0


def _input_label(args):
    if args.scenario:
        return args.scenario
    if args.tuple:
        return os.path.basename(args.tuple)
    return 'random-%s-seed%d' % (args.random, args.seed)


def cmd_maximality(args):
    T = _tuple_input(args)
    horizon = args.horizon or T.dim + 1
    v = is_maximal(T, horizon, args.mode)
    report = {'input': _input_label(args), 'verdict': v.as_dict()}
    _emit(args, report, [_row(_input_label(args), v.deltas, v.mode,
                              'maximal' if v.is_maximal else 'not-maximal')])
    return 0


def cmd_annihilator(args):
    T = _tuple_input(args)
    deg = args.max_degree if args.max_degree is not None else (args.horizon or T.dim)
    ann = find_annihilator(T, deg, args.mode)
    report = {'input': _input_label(args), 'max_degree': deg,
              'annihilator': None if ann is None else ann.as_dict()}
    _emit(args, report)
    return 0


def cmd_fock_poisson(args):
    T = _tuple_input(args)
    N = args.depth
    PK = poisson_kernel(T, N)
    g, it = PK.gram_residual(T), PK.intertwining_residual(T)
    report = {'input': _input_label(args), 'depth': N, 'delta': PK.delta,
              'gram_residual': g, 'intertwining_residual': it,
              'kernel_dims': [kernel_intersection_dim(T, n) for n in range(N + 1)]}
    if args.export:
        report['kernel'] = PK.to_json()
    _emit(args, report)
    atol = T.tol.identity_atol
    return 0 if g < atol and it < atol else 1


def cmd_theorem39(args):
    horizon = args.horizon or 6
    cases = []
    if args.scenario or args.tuple or args.random:
        cases.append((_input_label(args), _tuple_input(args), None, None))
    else:
        tol = _tol(args)
        cases = [(n, T.with_tol(tol), c, e) for n, T, c, e in ex.battery_zoo()]
    out, ok = [], True
    for name, T, coinv, expected in cases:
        rep = pure_maximality_battery(T, horizon, coinvariant=coinv)
        entry = {'case': name, **rep.as_dict(), 'expected_maximal': expected}
        good = rep.agree and (expected is None or rep.maximal == expected)
        entry['passed'] = good
        ok &= good
        out.append(entry)
    _emit(args, {'horizon': horizon, 'cases': out, 'passed': ok})
    return 0 if ok else 1


def cmd_da_submodule(args):
    tol = _tol(args)
    try:
        with open(args.generators) as fh:
            raw = json.load(fh)
        parsed = [poly_from_json(p) for p in (raw if isinstance(raw, list) else [raw])]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError('cannot read generators %s: %s' % (args.generators, exc))
    dims = {d for d, _ in parsed}
    if len(dims) != 1:
        raise ConfigError('generators disagree on the number of variables')
    args.d = dims.pop()
    polys = [p for _, p in parsed]
    weight_gate(args.d)
    S = submodule_from_generators(polys, args.d, args.N, tol)
    cd = S.certified_defect_depth
    horizon = min(args.horizon or cd, cd)
    if horizon < 1:
        raise ConfigError('certified depth %d leaves no window; increase N' % cd)
    sd = submodule_defect(S, horizon, tol)
    v = submodule_maximality_experiment(S, horizon, tol)
    report = {'generators': [poly_to_json(p, args.d) for p in polys], 'N': args.N,
              'dim': S.dim, 'certified_defect_depth': cd, 'profile': sd.as_dict(),
              'verdict': v.as_dict(),
              'poisson_nullity': [submodule_poisson_test(S, n, tol)
                                  for n in range(min(horizon, 3) + 1)]}
    _emit(args, report, [_row(os.path.basename(args.generators), sd.profile.deltas,
                              'commuting', 'maximal' if v.is_maximal else 'not-maximal',
                              cd)])
    return 0


def cmd_model_theta(args):
    tol = _tol(args)
    zeros = None
    if args.zeros:
        try:
            zeros = [complex(x) for x in args.zeros.split(',')]
        except ValueError:
            raise ConfigError('--zeros expects comma-separated numbers')
    elif args.power is None:
        raise ConfigError('give --zeros or --power')
    rep = quotient_theta_maximality(zeros, args.N, args.horizon, args.power, tol)
    report = rep.as_dict()
    _emit(args, report)
    return 0 if rep.minimal_polynomial_degree == rep.dim else 1


def cmd_property_suite(args):
    res = ex.property_suite(args.seed, args.count, _tol(args))
    _emit(args, res.as_dict())
    return 0 if res.passed else 1


def cmd_random_tuple(args):
    T = ex.random_contractive_tuple(args.d, args.m, args.commuting, args.seed,
                                    defect_rank=args.defect_rank, tol=_tol(args))
    _emit(args, tuple_to_json(T))
    return 0


def cmd_run(args):
    if not args.scenario:
        raise ConfigError('run needs --scenario NAME (or "all") or a config naming one')
    cfg = ex.ExperimentConfig(scenario=args.scenario, mode=args.mode, N=args.N,
                              horizon=args.horizon, seed=args.seed,
                              rank_rtol=args.rank_rtol, identity_atol=args.tol)
    try:
        report, rows, code = ex.run(cfg)
    except KeyError as exc:
        raise ConfigError(exc.args[0])
    _emit(args, report, rows)
    for r in report['scenarios']:
        for f in r['failures']:
            sys.stderr.write('FAIL %s: %s\n' % (r['scenario'], f))
    return code


def _common(p):
    p.add_argument('--config', help='JSON file whose keys fill unset options')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--horizon', type=int)
    p.add_argument('--tol', type=float, default=1e-10,
                   help='absolute tolerance for identities (default 1e-10)')
    p.add_argument('--rank-rtol', type=float, default=1e-8,
                   help='relative singular-value cutoff for ranks (default 1e-8)')
    p.add_argument('--out', help='directory for report.json / defect_sequences.csv')
    p.add_argument('--format', choices=('json', 'csv'), default='json')


def _tuple_opts(p):
    p.add_argument('--scenario', help='named tuple scenario or battery zoo member')
    p.add_argument('--tuple', help='tuple JSON file')
    p.add_argument('--random', metavar='D,M', help='random contractive tuple')
    p.add_argument('--commuting', action='store_true')
    p.add_argument('--mode', choices=('commuting', 'non-commuting'))


def build_parser():
    parser = argparse.ArgumentParser(prog='rowdefect',
                                     description='Defect sequences and maximality of row contractions.')
    sub = parser.add_subparsers(dest='command', required=True)

    def add(name, func, helptext, tuple_input=False):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        if tuple_input:
            _tuple_opts(p)
        p.set_defaults(func=func)
        return p

    add('defect-seq', cmd_defect_seq, 'defect indices of a tuple', True)
    add('maximality', cmd_maximality, 'maximality verdict with witness', True)
    p = add('annihilator', cmd_annihilator, 'lowest annihilator on the first defect space', True)
    p.add_argument('--max-degree', type=int)
    p = add('fock-poisson', cmd_fock_poisson, 'Poisson kernel residuals', True)
    p.add_argument('--depth', type=int, default=3)
    p.add_argument('--export', action='store_true', help='include the kernel matrix')
    add('theorem39', cmd_theorem39,
        'pure-tuple maximality battery (defaults to the built-in zoo)', True)
    p = add('da-submodule', cmd_da_submodule, 'submodule of the Drury-Arveson module')
    p.add_argument('--generators', required=True, help='JSON polynomial or list of them')
    p.add_argument('--N', type=int, default=8)
    p = add('model-theta', cmd_model_theta, 'compressed shift on a model space')
    p.add_argument('--zeros', help='comma-separated Blaschke zeros, e.g. "0.3,-0.4"')
    p.add_argument('--power', type=int, help='theta = z^power')
    p.add_argument('--N', type=int)
    p = add('property-suite', cmd_property_suite, 'randomized invariant battery')
    p.add_argument('--count', type=int, default=50)
    p = add('random-tuple', cmd_random_tuple, 'draw a random contractive tuple')
    p.add_argument('--d', type=int, default=2)
    p.add_argument('--m', type=int, default=4)
    p.add_argument('--commuting', action='store_true')
    p.add_argument('--defect-rank', type=int)
    p = add('run', cmd_run, 'run a preset scenario with its assertions')
    p.add_argument('--scenario', help='scenario name or "all"')
    p.add_argument('--mode', choices=('commuting', 'non-commuting'))
    p.add_argument('--N', type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    defaults = {a.dest: a.default for a in parser._subparsers._group_actions[0]
                .choices[args.command]._actions}
    for key, val in defaults.items():
        if val is not None and getattr(args, key, None) == val:
            setattr(args, '_default_' + key, True)
    try:
        _load_config(args)
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write('config error: %s\n' % exc)
        return 2
    except CertificationError as exc:
        sys.stderr.write('not certified: %s\n' % exc)
        return 1
    except ValueError as exc:
        sys.stderr.write('invalid input: %s: %s\n' % (type(exc).__name__, exc))
        return 2


if __name__ == '__main__':
    sys.exit(main())
