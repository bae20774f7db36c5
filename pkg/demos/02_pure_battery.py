"""Four ways of asking whether a pure tuple with one-dimensional defect is maximal.

(i) the defect indices reach their ceiling, (ii) no nonzero polynomial kills
the defect vector, (iii) the co-invariant subspace meets each particle space
in full rank, and (iv) the Poisson kernel's adjoint is injective on each
particle layer. The battery runs them side by side.
"""
import numpy as np

from rowdefect import compress_to_coinvariant, find_annihilator, pure_maximality_battery
from rowdefect.experiments import battery_zoo, coinvariant_complement
from rowdefect.fock import FockTruncation

# %% A hand-built counterexample: collapse e_1 and e_2
F = FockTruncation(2, 3)
v = np.zeros(F.dim)
v[F.index[(1,)]], v[F.index[(2,)]] = 1, -1
Q = coinvariant_complement(2, 3, [v])
T = compress_to_coinvariant(2, 3, Q)
print('compressed tuple lives on C^%d' % T.dim)

rep = pure_maximality_battery(T, 6, coinvariant=(Q, 1))
print('conditions:', rep.conditions)
print('ranks of P_Q on particle spaces:', rep.coinvariant_ranks, 'need', rep.coinvariant_expected)
print('kernel dimensions of K^*:', rep.kernel_dims)

ann = find_annihilator(T, 2, 'non-commuting')
print('lowest annihilator, degree %d:' % ann.degree)
for word, c in ann.coefficients.items():
    print('   %+.4f  T_%s' % (c.real, ''.join(map(str, word)) or '0'))

# %% The whole zoo
print()
for name, T, coinv, expected in battery_zoo():
    rep = pure_maximality_battery(T, 6, coinvariant=coinv)
    flag = 'ok' if rep.agree and rep.maximal == expected else 'MISMATCH'
    print('%-26s dim %2d  window %d  maximal %-5s  %s' % (name, T.dim, rep.window, rep.maximal, flag))
