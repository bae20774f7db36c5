"""Submodules of the Drury-Arveson module and model spaces in one variable.

Monomials have squared norm alpha!/|alpha|!; the library re-derives that
from the reproducing kernel before any submodule computation.
"""
from math import comb

from rowdefect import (quotient_theta_maximality, rank_one_decomposition_check,
                       submodule_defect, submodule_from_generators,
                       submodule_maximality_experiment, submodule_poisson_test,
                       weight_gate)

print('weight gate (d=2, d=3): %.1e %.1e' % (weight_gate(2), weight_gate(3)))

# %% Polynomials vanishing at the origin in two variables
z1, z2 = {(1, 0): 1.0}, {(0, 1): 1.0}
S = submodule_from_generators([z1, z2], 2, 8)
print('\ntruncated submodule: dim %d, certified depth %d' % (S.dim, S.certified_defect_depth))
sd = submodule_defect(S, S.certified_defect_depth)
print('defect indices', sd.profile.deltas)
print('C(m+2, 2) - 1  ', tuple(comb(m + 2, 2) - 1 for m in range(1, 7)))

v = submodule_maximality_experiment(S, 5)
print('maximal:', v.is_maximal, 'target', v.expected, 'departs at', v.departure_index)
print('witness (z1 acting on xi_%d and z2 on xi_%d cancel):' % (v.witness[0][1], v.witness[1][1]))
for alpha, i, c in v.witness:
    print('   %+.4f  z^%s xi_%d' % (c.real, alpha, i))
print('Poisson nullity per degree:', [submodule_poisson_test(S, n) for n in range(4)])
print('rank-one defect decomposition:', rank_one_decomposition_check(S, [z1, z2]))

# %% One variable: every submodule is maximal
for name, p in [('z^2', {(2,): 1.0}), ('(z-0.3)(z+0.4)', {(0,): -0.12, (1,): 0.1, (2,): 1.0})]:
    S = submodule_from_generators([p], 1, 20)
    v = submodule_maximality_experiment(S, S.certified_defect_depth)
    print('\n%s H^2: maximal %s over %d steps' % (name, v.is_maximal, v.horizon))

# %% Model spaces: the minimal polynomial has degree dim H_theta
for kw in ({'power': 3}, {'zeros': [0.3, -0.4], 'N': 60}, {'zeros': [0.7], 'N': 120}):
    rep = quotient_theta_maximality(**kw)
    print(kw, '-> dim %d, minimal polynomial degree %d, annihilator degree %s'
          % (rep.dim, rep.minimal_polynomial_degree, rep.annihilator_degree))
