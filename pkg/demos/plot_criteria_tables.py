r"""
Steering and entanglement at large N
====================================

We evaluate the normalized steering and entanglement criteria on four
reference states at :math:`N = 1000` and compare with their large-:math:`N`
values.  A ratio below one means the criterion detects steering or
entanglement.
"""

from splitdicke.analysis import cmd_table, format_table
from splitdicke.criteria import entanglement_main, steering_normalized
from splitdicke.splitting import split_binomial
from splitdicke.states import dicke

N = 1000

#####################################################################
# Steering table
# ##############
#
# Columns are the inferred :math:`z` variance, the planar inference term
# :math:`V_a`, the planar second moment :math:`E_a` and the ratio.  Optimal
# gains are used, so product states are not penalized for a fixed estimator.

print(format_table(cmd_table("steering-table1", N)))

#####################################################################
# Entanglement table
# ##################

print(format_table(cmd_table("entanglement-table2", N)))

#####################################################################
# The steering bound is about four times smaller than the entanglement bound
# for the split Dicke state, so steering is the harder property to detect.

state = split_binomial(dicke(N))
ent = entanglement_main(state, "normalized")
steer = steering_normalized(state)
print(f"entanglement rhs / steering rhs = {ent.rhs / steer.rhs:.3f}")
