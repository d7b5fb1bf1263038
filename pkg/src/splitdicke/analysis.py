"""Table reproduction, squeezing sweeps and the oracle verification suite."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import criteria
from .exceptions import InvalidArgumentError, ResourceLimitError
from .moments import moment_set, oracle_moment_set
from .spin import ORACLE_STATES
from .splitting import DEFAULT_TAIL_MASS, split, split_exact
from .states import dicke, ghz, one_axis_twisted, polarized, product_dicke

SWEEP_MAX_N = 2000
DEFAULT_SWEEP_CRITERIA = ("steering-normalized-auto", "reid", "entanglement-normalized", "first-moment-giovannetti")
TABLES = ("steering-table1", "entanglement-table2")
TABLE_STATES = ("dicke", "polarized-z", "polarized-x", "product-dicke")

# large-N values as functions of N, columns in table order
ASYMPTOTIC = {
    "steering-table1": {
        "columns": ("inf_var_z", "V_a", "E_a", "ratio"),
        "dicke": lambda n: (0.0, 4 / n, 1.0, 4 / n),
        "polarized-z": lambda n: (0.0, 4 / n, 4 / n, 1.0),
        "polarized-x": lambda n: (n / 8, 2 / n, 1.0, 1.0),
        "product-dicke": lambda n: (0.0, 1.0, 1.0, 1.0),
    },
    "entanglement-table2": {
        "columns": ("var_z", "V", "E", "ratio"),
        "dicke": lambda n: (0.0, 4 / n, 4.0, 1 / n),
        "polarized-z": lambda n: (0.0, 8 / n, 8 / n, n / 2),
        "polarized-x": lambda n: (n / 4, 4 / n, 4.0, 1.0),
        "product-dicke": lambda n: (0.0, 2.0, 2.0, 2.0),
    },
}
ZERO_ATOL = 1e-9


def build_state(name: str, n: int, mu: float | None = None):
    """Symmetric state (or, for ``product-dicke``, a bipartite one) by name."""
    if name == "dicke":
        return dicke(n)
    if name.startswith("polarized-"):
        return polarized(n, name.split("-", 1)[1])
    if name == "ghz":
        return ghz(n)
    if name == "twisted":
        if mu is None:
            raise InvalidArgumentError("the twisted state needs --mu")
        return one_axis_twisted(n, mu)
    if name == "product-dicke":
        return product_dicke(n)
    raise InvalidArgumentError(f"unknown state {name!r}")


def bipartite(name: str, n: int, split_mode: str = "binomial", n_a: int | None = None,
              mu: float | None = None, tail_mass: float = DEFAULT_TAIL_MASS):
    """Build and split a named state; ``product-dicke`` is already bipartite."""
    st = build_state(name, n, mu)
    if name == "product-dicke":
        return st
    return split(st, split_mode, n_a, tail_mass)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    state: str
    columns: tuple
    computed: tuple
    asymptotic: tuple

    def deviations(self) -> tuple:
        """Relative deviation per column; absolute for columns whose asymptotic value is 0."""
        return tuple(abs(c) if p == 0 else abs(c - p) / abs(p) for c, p in zip(self.computed, self.asymptotic))

    def matches(self, rtol: float = 0.1, atol: float = ZERO_ATOL) -> tuple:
        return tuple(d <= (atol if p == 0 else rtol) for d, p in zip(self.deviations(), self.asymptotic))


def _table_row(which: str, name: str, n: int, state) -> TableRow:
    ms = moment_set(state)
    if which == "steering-table1":
        rep = criteria.steering_normalized(state, "auto", moments=ms)
        c = rep.components
        computed = (c["inf_var_z"], c["V_a"], c["E_a"], rep.ratio)
    else:
        rep = criteria.entanglement_main(state, "normalized", moments=ms)
        c = rep.components
        computed = (c["var_z"], c["factor_xy"], c["planar_second_moment"], rep.ratio)
    spec = ASYMPTOTIC[which]
    return TableRow(name, spec["columns"], tuple(float(x) for x in computed), tuple(float(x) for x in spec[name](n)))


def cmd_table(which: str, n: int, split_mode: str = "binomial", tail_mass: float = DEFAULT_TAIL_MASS) -> list[TableRow]:
    """Rows of the steering or entanglement table for the four reference states.

    Steering columns use optimal gains (which vanish for product states and are
    close to ``g_z = 1``, ``g_x = g_y = -1`` for the split Dicke state).
    """
    if which not in TABLES:
        raise InvalidArgumentError(f"table must be one of {TABLES}")
    if n < 20 or n % 4:
        raise InvalidArgumentError("tables need n >= 20 and divisible by 4 (the product state splits Dicke halves)")
    rows = []
    for name in TABLE_STATES:
        st = bipartite(name, n, split_mode, tail_mass=tail_mass)
        rows.append(_table_row(which, name, n, st))
    return rows


def format_table(rows: list[TableRow]) -> str:
    head = ["state"] + [f"{c} (computed | large-N | dev)" for c in rows[0].columns]
    lines = ["\t".join(head)]
    for r in rows:
        cells = [r.state] + [f"{c:.6g} | {p:.6g} | {d:.3g}" for c, p, d in zip(r.computed, r.asymptotic, r.deviations())]
        lines.append("\t".join(cells))
    return "\n".join(lines)


def table_csv(rows: list[TableRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["state", "column", "computed", "asymptotic", "deviation", "match"])
    for r in rows:
        for col, c, p, d, ok in zip(r.columns, r.computed, r.asymptotic, r.deviations(), r.matches()):
            w.writerow([r.state, col, repr(c), repr(p), repr(d), int(ok)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    grid: tuple
    criteria: tuple
    ratios: dict
    meta: dict = field(default_factory=dict)

    def violated(self, name: str) -> np.ndarray:
        """Boolean mask of grid points where ``name`` is violated (inapplicable counts as not violated)."""
        r = np.array([np.nan if v is None else v for v in self.ratios[name]], dtype=float)
        return np.nan_to_num(r, nan=np.inf) < 1 - criteria.SATURATION_RTOL

    def to_dict(self) -> dict:
        return {"grid": list(self.grid), "criteria": list(self.criteria), "ratios": {k: list(v) for k, v in self.ratios.items()}, "meta": self.meta}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mu", *self.criteria])
        for i, mu in enumerate(self.grid):
            w.writerow([repr(mu), *("" if self.ratios[c][i] is None else repr(self.ratios[c][i]) for c in self.criteria)])
        return buf.getvalue()


def _sweep_point(n, mu, split_mode, names, tail_mass):
    st = split(one_axis_twisted(n, mu), split_mode, None, tail_mass)
    ms = moment_set(st)
    return [criteria.evaluate(st, c, ms).ratio for c in names]


def cmd_sweep(n: int, mu_grid, split_mode: str = "binomial", names=DEFAULT_SWEEP_CRITERIA,
              workers: int = 1, tail_mass: float = DEFAULT_TAIL_MASS) -> SweepResult:
    """Criterion ratios of split one-axis-twisted states over a squeezing grid."""
    if n > SWEEP_MAX_N:
        raise ResourceLimitError(f"sweeps support n <= {SWEEP_MAX_N}")
    grid = tuple(float(m) for m in mu_grid)
    if not grid:
        raise InvalidArgumentError("empty mu grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidArgumentError("mu grid must be strictly increasing")
    names = tuple(names)
    for c in names:
        if c not in criteria.CRITERIA:
            raise InvalidArgumentError(f"unknown criterion {c!r}")
    args = [(n, mu, split_mode, names, tail_mass) for mu in grid]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(lambda a: _sweep_point(*a), args))
    else:
        rows = [_sweep_point(*a) for a in args]
    ratios = {c: [row[i] for row in rows] for i, c in enumerate(names)}
    return SweepResult(grid, names, ratios, {"n": n, "split": split_mode, "criteria": list(names)})


def violation_interval(result: SweepResult, name: str):
    """``(first, last)`` grid values where ``name`` is violated, or ``None``."""
    mask = result.violated(name)
    if not mask.any():
        return None
    idx = np.flatnonzero(mask)
    return result.grid[idx[0]], result.grid[idx[-1]]


# ---------------------------------------------------------------------------
# oracle verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyResult:
    n: int
    state: str
    n_a: int
    max_error: float
    passed: bool


def cmd_verify(n: int, states=ORACLE_STATES, tol: float = 1e-10) -> list[VerifyResult]:
    """Compare every MomentSet field of the symmetric-subspace path with the 2^N oracle, all splits."""
    out = []
    for tag in states:
        if tag == "dicke" and n % 2:
            continue
        st = build_state(tag, n)
        for n_a in range(n + 1):
            fast = moment_set(split_exact(st, n_a))
            slow = oracle_moment_set(n, n_a, tag)
            err = max(abs(fast[k] - slow[k]) for k in slow.keys())
            out.append(VerifyResult(n, tag, n_a, float(err), bool(err <= tol)))
    return out
