"""How fast do defect spaces grow?

The n-th defect space of a row contraction T is the range of I - Psi^n(I).
Its dimension can grow at most like 1 + d + ... + d^(n-1) times the first
defect index (binomial sums when the T_i commute), and never beyond dim H.
Tuples that hit this ceiling at every step are called maximal.
"""
import numpy as np

from rowdefect import creation_tuple, defect_sequence, dshift, is_maximal, nilpotent_shift
from rowdefect.fock import FockTruncation, particle_space
from rowdefect.linalg import projection_distance

# %% A single nilpotent shift: one new dimension per step until H is full
for m in (3, 5, 8):
    prof = defect_sequence(nilpotent_shift(m), m + 2)
    print('shift on C^%d:' % m, prof.deltas, 'stabilizes at n =', prof.stabilized_at)

# %% Free creation operators on a truncated Fock space grow geometrically
T = creation_tuple(2, 4)
v = is_maximal(T, 6)
print('\ncreation pair, depth 4:', v.deltas, 'target', v.expected, 'maximal:', v.is_maximal)

# the defect spaces are exactly the particle spaces
F = FockTruncation(2, 4)
prof = defect_sequence(T, 4)
for n in range(1, 5):
    dist = projection_distance(prof.spaces[n - 1], particle_space(F, n - 1))
    print('  D_%d vs words of length <= %d: projection distance %.1e' % (n, n - 1, dist))

# %% Commuting tuples: the truncated d-shift grows binomially
for d, N in ((2, 4), (3, 3)):
    v = is_maximal(dshift(d, N), N + 2)
    print('\nd-shift d=%d N=%d:' % (d, N), v.deltas, 'maximal:', v.is_maximal)

# the same tuple, judged against the free (non-commuting) ceiling, falls short
v = is_maximal(dshift(2, 4), 6, mode='non-commuting')
print('as a free tuple it departs at n = %d; witness:' % v.departure_index)
for word, i, c in v.witness:
    print('   %+.3f%+.3fj  T_%s xi_%d' % (c.real, c.imag, ''.join(map(str, word)), i))
print('residual of the witness combination: %.1e' % v.witness_residual)
