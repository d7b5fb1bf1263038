import json

import numpy as np
import pytest

from splitdicke.analysis import (
    ASYMPTOTIC,
    TABLES,
    SweepResult,
    bipartite,
    build_state,
    cmd_sweep,
    cmd_table,
    cmd_verify,
    format_table,
    table_csv,
    violation_interval,
)
from splitdicke.exceptions import InvalidArgumentError, ResourceLimitError
from splitdicke.schemas import SWEEP_RESULT, validate


class TestTables:
    @pytest.mark.parametrize("which", TABLES)
    def test_deviations_shrink_with_n(self, which):
        small, large = cmd_table(which, 200, "exact"), cmd_table(which, 2000, "exact")
        for a, b in zip(small, large):
            for d_small, d_large in zip(a.deviations(), b.deviations()):
                # columns that are exact at both sizes only carry rounding noise
                assert d_large < d_small or d_large <= 1e-12, (a.state, d_small, d_large)

    @pytest.mark.parametrize("which", TABLES)
    def test_small_binomial_table_close(self, which):
        rows = cmd_table(which, 400)
        assert [r.state for r in rows] == ["dicke", "polarized-z", "polarized-x", "product-dicke"]
        assert all(all(r.matches(rtol=0.1)) for r in rows)

    def test_outputs(self):
        rows = cmd_table("entanglement-table2", 40, "exact")
        text = format_table(rows)
        assert text.splitlines()[0].startswith("state")
        csv_text = table_csv(rows)
        assert csv_text.count("\n") == 1 + 4 * len(ASYMPTOTIC["entanglement-table2"]["columns"])

    @pytest.mark.parametrize("which,n", [("steering-table1", 22), ("entanglement-table2", 8), ("table3", 100)])
    def test_invalid(self, which, n):
        with pytest.raises(InvalidArgumentError):
            cmd_table(which, n)


class TestSweep:
    def test_small_sweep(self):
        grid = np.linspace(0, 0.3, 7)
        res = cmd_sweep(60, grid, workers=2)
        validate(json.loads(res.to_json()), SWEEP_RESULT)
        assert res.grid == tuple(grid)
        assert res.to_csv().splitlines()[0] == "mu," + ",".join(res.criteria)
        # the coherent state is not flagged as entangled
        assert not res.violated("entanglement-normalized")[0]

    def test_threads_match_serial(self):
        grid = [0.0, 0.05, 0.1]
        assert cmd_sweep(40, grid, workers=1).ratios == cmd_sweep(40, grid, workers=3).ratios

    def test_violation_interval(self):
        res = SweepResult((0.0, 0.1, 0.2, 0.3), ("c",), {"c": [1.2, 0.5, None, 0.9]})
        assert violation_interval(res, "c") == (0.1, 0.3)
        res = SweepResult((0.0,), ("c",), {"c": [None]})
        assert violation_interval(res, "c") is None

    @pytest.mark.parametrize("kwargs,error", [
        (dict(n=3000, mu_grid=[0.1]), ResourceLimitError),
        (dict(n=20, mu_grid=[]), InvalidArgumentError),
        (dict(n=20, mu_grid=[0.2, 0.1]), InvalidArgumentError),
        (dict(n=20, mu_grid=[0.1], names=("bell",)), InvalidArgumentError),
    ])
    def test_invalid(self, kwargs, error):
        with pytest.raises(error):
            cmd_sweep(**kwargs)


class TestVerify:
    @pytest.mark.parametrize("n", [3, 4])
    def test_passes(self, n):
        results = cmd_verify(n)
        assert all(r.passed for r in results)
        tags = {r.state for r in results}
        assert ("dicke" in tags) == (n % 2 == 0)


class TestBuilders:
    def test_names(self):
        assert build_state("polarized-y", 4).n == 4
        assert bipartite("product-dicke", 8).sector.n_a == 4
        assert bipartite("dicke", 8, "exact", 3).sector.n_a == 3
        with pytest.raises(InvalidArgumentError):
            build_state("twisted", 10)
        with pytest.raises(InvalidArgumentError):
            build_state("w-state", 10)
