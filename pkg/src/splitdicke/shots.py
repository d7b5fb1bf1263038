"""Synthetic measurement shots, CSV ingestion and bootstrap estimation.

Every shot measures the same observable on both sides: ``J_z`` (setting
``"z"``) or ``J_alpha = J_x cos(alpha) + J_y sin(alpha)`` with a fresh uniform
angle (setting ``"planar"``).  Outcomes are exact eigenvalues.

Estimation normalizes every planar outcome with that shot's own particle
numbers, ``J_alpha^s / sqrt(j_s (j_s + 1))``, so fluctuations of ``n_a`` do not
leak into the difference variance.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .criteria import CriterionReport, _report
from .exceptions import InvalidArgumentError, ResourceLimitError
from .spin import SpinSector, _ladder, component_eigenbasis
from .splitting import as_mixture

CSV_HEADER = ("shot_id", "setting", "alpha_rad", "n_a", "n_b", "value_a", "value_b")
SETTINGS = ("z", "planar")
SAMPLING_MAX_N = 400
CHUNK = 4096
CONFIDENCE = 0.68
ESTIMATE_FIELDS = ("var_z", "perp_var_minus", "perp_sq_plus", "perp_sq_a")


@dataclass(frozen=True)
class ShotRecord:
    shot_id: int
    setting: str
    alpha: float | None
    n_a: int
    n_b: int
    value_a: float
    value_b: float

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise InvalidArgumentError(f"setting must be 'z' or 'planar', got {self.setting!r}")
        if (self.alpha is None) != (self.setting == "z"):
            raise InvalidArgumentError("alpha must be given exactly for planar shots")
        if self.alpha is not None and not 0 <= self.alpha < 2 * np.pi:
            raise InvalidArgumentError(f"alpha must lie in [0, 2pi), got {self.alpha!r}")
        if self.n_a < 0 or self.n_b < 0:
            raise InvalidArgumentError("particle numbers must be non-negative")
        for v, n in ((self.value_a, self.n_a), (self.value_b, self.n_b)):
            if abs(v) > n / 2 or (2 * v - n) % 2 != 0:
                raise InvalidArgumentError(f"value {v} is not an eigenvalue for {n} particles")


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


class _SectorSampler:
    """Joint outcome distributions of one pure sector component.

    For planar shots the amplitudes in the ``J_x`` product eigenbasis after the
    rotation ``exp(i alpha J_z)`` are ``sum_M exp(i alpha M) C_M``, where ``C_M`` is
    the transform of the part of ``psi`` with total magnetization ``M``.  Only
    populated ``M`` blocks are kept, so ``J_z`` eigenstates cost one block.
    """

    def __init__(self, sector: SpinSector, psi: np.ndarray):
        self.sector = sector
        ma, _ = _ladder(sector.n_a)
        mb, _ = _ladder(sector.n_b)
        self.ma, self.mb = ma, mb
        prob = np.abs(psi) ** 2
        self.z_cdf = np.cumsum(prob.reshape(-1))
        wa, va = component_eigenbasis(sector.j_a, "x")
        wb, vb = component_eigenbasis(sector.j_b, "x")
        self.wa, self.wb = wa, wb
        total = (ma[:, None] + mb[None, :])
        blocks, phases = [], []
        for m in np.unique(total):
            part = np.where(total == m, psi, 0)
            if np.any(np.abs(part) > 1e-15):
                blocks.append((va.conj().T @ part @ vb.conj()).reshape(-1))
                phases.append(m)
        self.blocks = np.array(blocks)
        self.magnetizations = np.array(phases)

    def _pick(self, cdf, u):
        idx = np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), len(cdf) - 1)
        return np.unravel_index(idx, self.sector.shape)

    def sample_z(self, u: np.ndarray):
        ia, ib = self._pick(self.z_cdf, u)
        return self.ma[ia], self.mb[ib]

    def sample_planar(self, alpha: np.ndarray, u: np.ndarray):
        idx = np.empty(len(alpha), dtype=int)
        step = max(1, 2_000_000 // self.blocks.shape[1])
        for s in range(0, len(alpha), step):
            amp = np.exp(1j * np.outer(alpha[s:s + step], self.magnetizations)) @ self.blocks
            cdf = np.cumsum(np.abs(amp) ** 2, axis=1)
            idx[s:s + step] = (cdf < (u[s:s + step] * cdf[:, -1])[:, None]).sum(axis=1)
        ia, ib = np.unravel_index(np.minimum(idx, self.blocks.shape[1] - 1), self.sector.shape)
        return self.wa[ia], self.wb[ib]


def _components(mix):
    """Flattened ``(weight, sector, psi)`` list and lazily built samplers."""
    from .moments import _pure_terms

    terms = list(_pure_terms(mix))
    weights = np.array([w for w, _, _ in terms])
    return weights / weights.sum(), terms


def sample_shots(state, n_z: int, n_planar: int, seed: int) -> list[ShotRecord]:
    """Simulate ``n_z`` z-shots and ``n_planar`` planar shots of a bipartite state.

    Shots come in chunks of :data:`CHUNK`, each drawn from its own generator
    seeded by ``(seed, setting, chunk index)``, so any range of shots can be
    regenerated independently.
    """
    mix = as_mixture(state)
    if mix.n > SAMPLING_MAX_N:
        raise ResourceLimitError(f"shot sampling supports N <= {SAMPLING_MAX_N}, got {mix.n}")
    if n_z < 0 or n_planar < 0:
        raise InvalidArgumentError("shot counts must be non-negative")
    weights, terms = _components(mix)
    samplers: dict[int, _SectorSampler] = {}

    def sampler(k):
        if k not in samplers:
            _, sector, psi = terms[k]
            samplers[k] = _SectorSampler(sector, psi)
        return samplers[k]

    records = []
    offset = 0
    for code, (setting, count) in enumerate((("z", n_z), ("planar", n_planar))):
        for start in range(0, count, CHUNK):
            size = min(CHUNK, count - start)
            rng = np.random.default_rng([seed, code, start // CHUNK])
            comp = rng.choice(len(weights), size=size, p=weights)
            u = rng.random(size)
            alpha = rng.uniform(0, 2 * np.pi, size) if setting == "planar" else None
            va, vb = np.empty(size), np.empty(size)
            for k in np.unique(comp):
                sel = comp == k
                s = sampler(int(k))
                va[sel], vb[sel] = s.sample_z(u[sel]) if setting == "z" else s.sample_planar(alpha[sel], u[sel])
            for i in range(size):
                sector = terms[comp[i]][1]
                records.append(ShotRecord(
                    offset + start + i, setting, None if alpha is None else float(alpha[i]),
                    sector.n_a, sector.n_b, float(va[i]), float(vb[i]),
                ))
        offset += count
    return records


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def write_csv(records, path_or_file) -> None:
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.shot_id, r.setting, "" if r.alpha is None else repr(r.alpha), r.n_a, r.n_b, repr(r.value_a), repr(r.value_b)])
    finally:
        if own:
            fh.close()


def records_to_csv(records) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(path_or_file) -> list[ShotRecord]:
    """Parse a shot CSV; the header must match :data:`CSV_HEADER` exactly."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, newline="") if own else path_or_file
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_HEADER:
            raise InvalidArgumentError(f"bad CSV header {header!r}; expected {','.join(CSV_HEADER)}")
        out = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise InvalidArgumentError(f"line {line}: expected {len(CSV_HEADER)} fields, got {len(row)}")
            try:
                sid, setting, alpha, n_a, n_b, va, vb = row
                out.append(ShotRecord(int(sid), setting, float(alpha) if alpha != "" else None,
                                      int(n_a), int(n_b), float(va), float(vb)))
            except (ValueError, InvalidArgumentError) as exc:
                raise InvalidArgumentError(f"line {line}: {exc}") from None
        return out
    finally:
        if own:
            fh.close()


# ---------------------------------------------------------------------------
# estimation
# ---------------------------------------------------------------------------


def _norm(n: np.ndarray) -> np.ndarray:
    j = n / 2
    with np.errstate(divide="ignore"):
        return np.where(j > 0, 1 / np.sqrt(j * (j + 1)), 0.0)


@dataclass(frozen=True)
class EstimateSet:
    """Shot-based point estimates with percentile bootstrap intervals."""

    values: dict
    intervals: dict
    counts: dict
    n_mean: float
    confidence: float = CONFIDENCE
    replicates: dict = field(default_factory=dict, repr=False)

    def __getitem__(self, key):
        return self.values[key]

    def to_dict(self, include_replicates: bool = False) -> dict:
        out = {
            "values": {k: float(v) for k, v in self.values.items()},
            "intervals": {k: [float(lo), float(hi)] for k, (lo, hi) in self.intervals.items()},
            "counts": dict(self.counts),
            "n_mean": float(self.n_mean),
            "confidence": self.confidence,
        }
        if include_replicates:
            out["replicates"] = {k: np.asarray(v).tolist() for k, v in self.replicates.items()}
        return out

    def to_json(self, include_replicates: bool = True) -> str:
        return json.dumps(self.to_dict(include_replicates))

    @classmethod
    def from_json(cls, text: str) -> "EstimateSet":
        doc = json.loads(text)
        return cls(
            doc["values"], {k: tuple(v) for k, v in doc["intervals"].items()}, doc["counts"],
            doc["n_mean"], doc.get("confidence", CONFIDENCE),
            {k: np.asarray(v) for k, v in doc.get("replicates", {}).items()},
        )


def _statistics(z_tot, d, plus, ua):
    """Estimates from per-shot arrays; works row-wise on 2-D bootstrap samples."""
    return {
        "var_z": np.var(z_tot, axis=-1, ddof=1),
        "perp_var_minus": np.var(d, axis=-1, ddof=1),
        "perp_sq_plus": np.mean(plus**2, axis=-1),
        "perp_sq_a": np.mean(ua**2, axis=-1),
    }


def _percentile_interval(reps, point, confidence):
    lo, hi = np.percentile(reps, [50 * (1 - confidence), 50 * (1 + confidence)])
    # a percentile interval can miss the point estimate for skewed statistics
    return float(min(lo, point)), float(max(hi, point))


def estimate(records, bootstrap_reps: int = 1000, seed: int = 0, confidence: float = CONFIDENCE) -> EstimateSet:
    """Point estimates and stratified percentile-bootstrap intervals.

    ``var_z`` is the sample variance of ``J_z^a + J_z^b`` over z-shots;
    ``perp_var_minus``, ``perp_sq_plus`` and ``perp_sq_a`` are the sample
    variance of the normalized difference and the second moments of the
    normalized sum and of side ``a`` over planar shots.
    """
    z = [r for r in records if r.setting == "z"]
    p = [r for r in records if r.setting == "planar"]
    if len(z) < 2 or len(p) < 2:
        raise InvalidArgumentError(f"need at least 2 shots per setting, got z={len(z)}, planar={len(p)}")
    if bootstrap_reps < 1:
        raise InvalidArgumentError("bootstrap_reps must be positive")
    z_tot = np.array([r.value_a + r.value_b for r in z])
    na = np.array([r.n_a for r in p], dtype=float)
    nb = np.array([r.n_b for r in p], dtype=float)
    ua = np.array([r.value_a for r in p]) * _norm(na)
    ub = np.array([r.value_b for r in p]) * _norm(nb)
    d, plus = ua - ub, ua + ub
    point = {k: float(v) for k, v in _statistics(z_tot, d, plus, ua).items()}

    rng = np.random.default_rng(seed)
    reps = {k: np.empty(bootstrap_reps) for k in ESTIMATE_FIELDS}
    batch = max(1, 2_000_000 // max(len(z), len(p)))
    for start in range(0, bootstrap_reps, batch):
        size = min(batch, bootstrap_reps - start)
        iz = rng.integers(0, len(z), (size, len(z)))
        ip = rng.integers(0, len(p), (size, len(p)))
        stats = _statistics(z_tot[iz], d[ip], plus[ip], ua[ip])
        for k in ESTIMATE_FIELDS:
            reps[k][start:start + size] = stats[k]
    intervals = {k: _percentile_interval(reps[k], point[k], confidence) for k in ESTIMATE_FIELDS}
    n_mean = float(np.mean([r.n_a + r.n_b for r in records]))
    return EstimateSet(point, intervals, {"z": len(z), "planar": len(p), "bootstrap": bootstrap_reps},
                       n_mean, confidence, reps)


def _criterion_terms(var_z, perp_var, perp_plus, perp_a, criterion):
    lhs = (var_z + 0.25) * 2 * perp_var
    if criterion == "planar-entanglement":
        rhs = perp_plus**2 / 4
    else:
        rhs = perp_a / 2
    return lhs, rhs


def evaluate_from_estimates(est: EstimateSet, criterion: str = "planar-entanglement") -> CriterionReport:
    """Planar entanglement or steering criterion from shot estimates, with bootstrap intervals."""
    if criterion not in ("planar-entanglement", "planar-steering"):
        raise InvalidArgumentError(f"unknown shot criterion {criterion!r}")
    missing = [k for k in ESTIMATE_FIELDS if k not in est.values]
    if missing:
        raise InvalidArgumentError(f"estimate set lacks {missing}")
    v = est.values
    lhs, rhs = _criterion_terms(v["var_z"], v["perp_var_minus"], v["perp_sq_plus"], v["perp_sq_a"], criterion)
    intervals = None
    if all(k in est.replicates and len(est.replicates[k]) for k in ESTIMATE_FIELDS):
        r = est.replicates
        lhs_r, rhs_r = _criterion_terms(r["var_z"], r["perp_var_minus"], r["perp_sq_plus"], r["perp_sq_a"], criterion)
        intervals = {"lhs": _percentile_interval(lhs_r, lhs, est.confidence), "rhs": _percentile_interval(rhs_r, rhs, est.confidence)}
        if rhs > 0 and np.all(rhs_r > 0):
            intervals["ratio"] = _percentile_interval(lhs_r / rhs_r, lhs / rhs, est.confidence)
    n = est.n_mean
    comps = {
        "var_z": v["var_z"], "perp_var_minus": v["perp_var_minus"],
        "perp_sq_plus": v["perp_sq_plus"], "perp_sq_a": v["perp_sq_a"],
        "reference_var_z_polarized_x": n / 4, "reference_perp_var_minus_polarized_x": 2 / n,
    }
    info = {"source": "shots", "n_mean": n, "shots_z": est.counts["z"], "shots_planar": est.counts["planar"]}
    return _report(criterion, lhs, rhs, components=comps, state=info, intervals=intervals)
