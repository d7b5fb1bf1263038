r"""
From measurement shots to a criterion
=====================================

An experiment does not see moments, only outcomes.  We simulate shots of a
binomially split Dicke state, write them to CSV, read them back and estimate
the planar entanglement criterion with bootstrap intervals.
"""

import io

from splitdicke import estimate, evaluate_from_estimates, read_csv, sample_shots, write_csv
from splitdicke.criteria import entanglement_main
from splitdicke.splitting import split_binomial
from splitdicke.states import dicke

N = 100
state = split_binomial(dicke(N))

#####################################################################
# Sampling
# ########
#
# Half of the shots measure :math:`J_z` on both sides, the other half a planar
# component at a random angle shared by both sides.  A fixed seed reproduces
# the shot list exactly.

records = sample_shots(state, n_z=20_000, n_planar=20_000, seed=1)
buf = io.StringIO()
write_csv(records, buf)
buf.seek(0)
records = read_csv(buf)
print(f"{len(records)} shots, first planar shot: {next(r for r in records if r.setting == 'planar')}")

#####################################################################
# Estimation
# ##########
#
# Every planar outcome is divided by its own :math:`\sqrt{j_s(j_s+1)}`, so
# partition noise does not leak into the difference variance.

est = estimate(records, bootstrap_reps=500, seed=1)
report = evaluate_from_estimates(est, "planar-entanglement")
lo, hi = report.intervals["ratio"]
print(f"shot-based ratio {report.ratio:.5f} with 68% interval [{lo:.5f}, {hi:.5f}]")
print(f"moment-based ratio {entanglement_main(state, 'planar').ratio:.5f}")
