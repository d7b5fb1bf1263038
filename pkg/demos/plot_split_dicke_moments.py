r"""
Splitting a Dicke state
=======================

A Dicke state of :math:`N` spin-1/2 particles has :math:`\langle J_z\rangle = 0`,
no spread in :math:`J_z` and a large planar spin.  Here we split it into two
halves, first with exactly :math:`N/2` particles in each half and then with the
binomial partition noise of a beam splitter, and look at what the two halves
share.
"""

import numpy as np

from splitdicke import analytic_dicke_moments, moment_set, schmidt_entropy, split_binomial, split_exact
from splitdicke.states import dicke

N = 200

#####################################################################
# Exact split
# ###########
#
# With a fixed particle number on each side the state lives in one sector.
# The planar components are correlated between the halves, the :math:`z`
# components anticorrelated.

exact = moment_set(split_exact(dicke(N), N // 2))
print(f"<Jx^a Jx^b> = {exact['corr_x']:.4f}   (N^2/32 * N/(N-1) = {N**2 / 32 * N / (N - 1):.4f})")
print(f"<Jz^a Jz^b> = {exact['corr_z']:.4f}   (-N/16 * N/(N-1) = {-N / 16 * N / (N - 1):.4f})")
print(f"var(Jx^a - Jx^b) = {exact['var_x_minus']:.4f}")

#####################################################################
# The halves are strongly entangled: the entropy of the Schmidt spectrum grows
# like the logarithm of the square root of :math:`N`.

for n in (50, 200, 800):
    print(f"N = {n:4d}: entanglement entropy {schmidt_entropy(split_exact(dicke(n), n // 2)):.3f} bits,"
          f" log2(sqrt(N)) = {0.5 * np.log2(n):.3f}")

#####################################################################
# Binomial split
# ##############
#
# A beam splitter sends each particle to either side at random.  The
# difference variance of the raw components doubles, because the lengths of
# the two spins now fluctuate.  Dividing every component by
# :math:`\sqrt{j_s(j_s+1)}` in each sector removes most of that noise.

binom = moment_set(split_binomial(dicke(N)))
print(f"var(Jx^-) exact split {exact['var_x_minus']:.3f}, binomial split {binom['var_x_minus']:.3f} (N/4 = {N / 4})")
print(f"normalized var(Jx^-): exact {exact['nvar_x_minus']:.5f}, binomial {binom['nvar_x_minus']:.5f}, 2/N = {2 / N:.5f}")

#####################################################################
# The same numbers follow from closed forms built on two-particle
# correlations, which agree with the sector sums to rounding.

closed = analytic_dicke_moments(N)
worst = max(abs(binom[k] - closed[k]) for k in closed.keys())
print(f"largest difference to the closed forms: {worst:.2e}")
