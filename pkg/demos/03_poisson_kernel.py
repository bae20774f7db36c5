"""The Poisson kernel of a random row contraction, checked identity by identity.

Rows of K are xi^* D_T T_f^* over words f of length <= N. Then
K^* K = I - Psi^{N+1}(I) exactly, and K intertwines T_i^* with the
backward creation operators once the top word layer is dropped.
"""
import numpy as np

from rowdefect import poisson_kernel, random_contractive_tuple
from rowdefect.experiments import random_tuple_family
from rowdefect.fock import poisson_adjoint_apply

T = random_contractive_tuple(2, 5, seed=7, defect_rank=2)
PK = poisson_kernel(T, 3)
print('K has shape', PK.K.shape, '(%d words x %d defect directions)' % (len(PK.words), PK.delta))
print('Gram residual        %.2e' % PK.gram_residual(T))
print('intertwining residual %.2e' % PK.intertwining_residual(T))

f = (2, 1)
xi = PK.D1.basis[:, 1]
col = poisson_adjoint_apply(T, f, xi)
print('K^*(e_21 (x) xi_1) vs column of K^*: %.1e' % np.abs(col - PK.K.conj().T[:, PK.row(f, 1)]).max())

# %% Fifty random tuples, worst case
worst = [0.0, 0.0]
for seed, T, N in random_tuple_family(50, seed=2024):
    PK = poisson_kernel(T, N)
    worst[0] = max(worst[0], PK.gram_residual(T))
    worst[1] = max(worst[1], PK.intertwining_residual(T))
print('\nover 50 random tuples: Gram %.1e, intertwining %.1e' % tuple(worst))
