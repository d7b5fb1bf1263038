r"""
Checking the symmetric-subspace path
====================================

All moments are computed in the :math:`(N+1)`-dimensional symmetric subspace
and its bipartite sectors.  For a handful of particles we can afford the full
:math:`2^N` qubit space instead, which gives an independent check.
"""

from splitdicke.analysis import cmd_verify
from splitdicke.spin import OperatorSpec, full_qubit_oracle, realize_operator
from splitdicke.splitting import split_exact
from splitdicke.states import dicke

#####################################################################
# A single observable: the square root of the planar spin of the difference,
# the operator behind the spectral entanglement variants.

spec = OperatorSpec(side="difference", function="sqrt")
state = split_exact(dicke(6), 2)
v = state.vector.reshape(-1)
fast = (v.conj() @ realize_operator(state.sector, spec) @ v).real
print(f"subspace {fast:.12f}  full qubit space {full_qubit_oracle(6, 2, 'dicke', spec):.12f}")

#####################################################################
# Every moment, every split
# #########################

for n in (4, 6):
    results = cmd_verify(n)
    print(f"N = {n}: {len(results)} splits, largest deviation {max(r.max_error for r in results):.1e}")
