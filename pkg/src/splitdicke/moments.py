"""First and second moments of bipartite collective spins.

Field names in a :class:`MomentSet`
-----------------------------------
For ``l`` in ``x, y, z`` and ``s`` in ``a, b``:

``mean_l_s``, ``sq_l_s``, ``var_l_s``
    ``<J_l^s>``, ``<(J_l^s)^2>`` and the variance.
``corr_l``
    ``<J_l^a J_l^b>``.
``mean_l_plus``, ``sq_l_plus``, ``var_l_plus`` (and ``minus``)
    moments of ``J_l^a +/- J_l^b``.

The same names prefixed with ``n`` (``nmean_x_a``, ``nvar_y_minus`` ...) hold
the normalized components ``J_l^s / sqrt(j_s (j_s + 1))`` for ``l`` in ``x, y``.
``perp_plus``, ``perp_minus`` and ``perp_a`` are the planar-averaged normalized
second moments.

Mixtures are evaluated sector by sector: every ``<A f(j_a, j_b)>`` is the
weighted sum of sector expectations, and variances are formed afterwards from
the mixed moments, so partition noise shows up in them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import DegenerateStateError, InvalidArgumentError
from .spin import OperatorSpec, _ladder, full_qubit_oracle, realize_operator
from .splitting import as_mixture, split_exact
from .states import SymmetricState, log_binom

AXES = ("x", "y", "z")
PLANAR = ("x", "y")


@dataclass(frozen=True)
class MomentSet:
    """Immutable bundle of moments; ``approximate`` holds large-N closed forms kept apart from exact values."""

    values: dict
    n: float
    mode: str
    approximate: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        try:
            return self.values[key]
        except KeyError:
            if key in self.approximate:
                raise KeyError(f"{key!r} is only available as an approximation") from None
            raise

    def __contains__(self, key) -> bool:
        return key in self.values

    def keys(self):
        return self.values.keys()

    def to_dict(self) -> dict:
        fields = {k: {"value": float(v), "exact": True} for k, v in self.values.items()}
        fields.update({k + "~approx" if k in fields else k: {"value": float(v), "exact": False} for k, v in self.approximate.items()})
        return {"n": float(self.n), "mode": self.mode, "fields": fields}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class GainVector(NamedTuple):
    """Gains ``g_l`` of the estimator ``J_l,est^a = -g_l J_l^b``."""

    x: float
    y: float
    z: float

    def validate(self) -> "GainVector":
        if not all(np.isfinite(self)):
            raise InvalidArgumentError(f"gains must be finite, got {tuple(self)}")
        return self


def _derive(raw: dict) -> dict:
    """Complete a dict of mean/sq/corr entries with combination moments and variances."""
    v = dict(raw)
    for prefix, axes in (("", AXES), ("n", PLANAR)):
        for l in axes:
            ma, mb = v[f"{prefix}mean_{l}_a"], v[f"{prefix}mean_{l}_b"]
            sa, sb = v[f"{prefix}sq_{l}_a"], v[f"{prefix}sq_{l}_b"]
            c = v[f"{prefix}corr_{l}"]
            v[f"{prefix}var_{l}_a"] = sa - ma**2
            v[f"{prefix}var_{l}_b"] = sb - mb**2
            for name, sign in (("plus", 1), ("minus", -1)):
                mean = ma + sign * mb
                sq = sa + sb + 2 * sign * c
                v[f"{prefix}mean_{l}_{name}"] = mean
                v[f"{prefix}sq_{l}_{name}"] = sq
                v[f"{prefix}var_{l}_{name}"] = sq - mean**2
    v["perp_plus"] = (v["nsq_x_plus"] + v["nsq_y_plus"]) / 2
    v["perp_minus"] = (v["nsq_x_minus"] + v["nsq_y_minus"]) / 2
    v["perp_a"] = (v["nsq_x_a"] + v["nsq_y_a"]) / 2
    return v


def _pure_terms(state):
    """Yield ``(weight, sector, psi)`` for every pure component of ``state``."""
    for w, s in as_mixture(state):
        for p, psi in s.pure_components():
            yield w * p, s.sector, psi


def _side_moments(rows: np.ndarray, m: np.ndarray, cplus: np.ndarray) -> tuple:
    """Single-side means and squares from ladder sums; ``rows`` indexes that side."""
    p = np.einsum("ij,ij->i", rows.conj(), rows).real
    c2 = cplus[1:] ** 2
    s = np.vdot(rows[:-1], cplus[1:, None] * rows[1:])  # <J+>
    t = np.vdot(rows[:-2], (cplus[1:-1] * cplus[2:])[:, None] * rows[2:])  # <J+^2>
    n_up = c2 @ p[1:]
    n_down = c2 @ p[:-1]
    return (s.real, s.imag, p @ m,
            (n_up + n_down + 2 * t.real) / 4, (n_up + n_down - 2 * t.real) / 4, p @ m**2)


def sector_moments(psi: np.ndarray, sector) -> dict:
    """Raw moments of one pure sector state (means, squares, correlations).

    Uses ``J_x = (J+ + J-)/2`` and ``J_y = (J+ - J-)/2i`` so that only a few
    shifted inner products are needed per sector.
    """
    ma, cpa = _ladder(sector.n_a)
    mb, cpb = _ladder(sector.n_b)
    out = {}
    for side, vals in (("a", _side_moments(psi, ma, cpa)), ("b", _side_moments(psi.T, mb, cpb))):
        for key, v in zip(("mean_x", "mean_y", "mean_z", "sq_x", "sq_y", "sq_z"), vals):
            out[f"{key}_{side}"] = float(v)
    cc = cpa[1:, None] * cpb[None, 1:]
    pp = np.vdot(psi[:-1, :-1], cc * psi[1:, 1:]).real  # Re <J+^a J+^b>
    pm = np.vdot(psi[:-1, 1:], cc * psi[1:, :-1]).real  # Re <J+^a J-^b>
    out["corr_x"] = float((pp + pm) / 2)
    out["corr_y"] = float((pm - pp) / 2)
    prob = np.abs(psi) ** 2
    out["corr_z"] = float(ma @ prob @ mb)
    return out


def _centered_z(psi: np.ndarray, sector) -> tuple:
    """Sector variances and covariance of ``J_z^a``, ``J_z^b`` computed from centered values."""
    ma, _ = _ladder(sector.n_a)
    mb, _ = _ladder(sector.n_b)
    prob = np.abs(psi) ** 2
    pa, pb = prob.sum(axis=1), prob.sum(axis=0)
    da, db = ma - pa @ ma, mb - pb @ mb
    return pa @ ma, pb @ mb, pa @ da**2, pb @ db**2, da @ prob @ db


def _stable_z_variances(terms) -> dict:
    """Mixture variances of the z combinations by the law of total variance.

    ``sq - mean^2`` loses about ``eps * N^2`` for polarized states; this form
    stays accurate when the variance is exactly zero.
    """
    t = np.array(terms)
    w, mean_a, mean_b, var_a, var_b, cov = t.T
    out = {}
    for key, ca, cb in (("var_z_a", 1, 0), ("var_z_b", 0, 1), ("var_z_plus", 1, 1), ("var_z_minus", 1, -1)):
        means = ca * mean_a + cb * mean_b
        inner = ca**2 * var_a + cb**2 * var_b + 2 * ca * cb * cov
        out[key] = float(w @ inner + w @ (means - w @ means) ** 2)
    return out


def moment_set(state) -> MomentSet:
    """All first/second moments of a bipartite state or sector mixture."""
    if isinstance(state, MomentSet):
        return state
    mix = as_mixture(state)
    acc: dict[str, float] = {}

    def add(key, val):
        acc[key] = acc.get(key, 0.0) + val

    z_terms = []
    for w, sector, psi in _pure_terms(mix):
        raw = sector_moments(psi, sector)
        z_terms.append((w, *_centered_z(psi, sector)))
        fa, fb = sector.norm_factors()
        for key, val in raw.items():
            add(key, w * val)
        for l in PLANAR:
            add(f"nmean_{l}_a", w * fa * raw[f"mean_{l}_a"])
            add(f"nmean_{l}_b", w * fb * raw[f"mean_{l}_b"])
            add(f"nsq_{l}_a", w * fa**2 * raw[f"sq_{l}_a"])
            add(f"nsq_{l}_b", w * fb**2 * raw[f"sq_{l}_b"])
            add(f"ncorr_{l}", w * fa * fb * raw[f"corr_{l}"])
    values = _derive(acc)
    values.update(_stable_z_variances(z_terms))
    return MomentSet(values, float(mix.n), mix.mode)


def expectation(state, spec: OperatorSpec) -> float:
    """``<spec>`` by dense realization in every sector (small sectors only)."""
    total = 0.0
    for w, sector, psi in _pure_terms(state):
        v = psi.reshape(-1)
        total += w * np.vdot(v, realize_operator(sector, spec) @ v).real
    return float(total)


def _key(axis: str, normalized: bool) -> str:
    if axis not in AXES:
        raise InvalidArgumentError(f"unknown axis {axis!r}")
    if normalized and axis == "z":
        raise InvalidArgumentError("normalized moments are defined only for x and y")
    return ("n" if normalized else "") + "{}_" + axis


def inference_variance(state, axis: str, gain: float, normalized: bool = False) -> float:
    """Variance of ``J_l^a + g J_l^b`` (raw) or of ``J_l^a/s_a + g J_l^b/s_b`` (normalized).

    With the estimator ``J_est^a = -g J^b`` this is the inference variance.  In
    normalized mode ``g = -1`` is the sector-rescaled estimator
    ``J_est^a = sqrt(j_a(j_a+1) / j_b(j_b+1)) J^b``.
    """
    ms = moment_set(state)
    k = _key(axis, normalized)
    if gain == 0:
        return float(ms[k.format("var") + "_a"])
    mean = ms[k.format("mean") + "_a"] + gain * ms[k.format("mean") + "_b"]
    sq = ms[k.format("sq") + "_a"] + gain**2 * ms[k.format("sq") + "_b"] + 2 * gain * ms[k.format("corr")]
    return float(sq - mean**2)


def covariance(state, axis: str, normalized: bool = False) -> float:
    ms = moment_set(state)
    k = _key(axis, normalized)
    return float(ms[k.format("corr")] - ms[k.format("mean") + "_a"] * ms[k.format("mean") + "_b"])


def optimal_gain(state, axis: str, normalized: bool = False, tol: float = 1e-14) -> float:
    """Gain ``-Cov(J^a, J^b) / var(J^b)`` minimizing the inference variance."""
    ms = moment_set(state)
    var_b = ms[_key(axis, normalized).format("var") + "_b"]
    if var_b <= tol * max(1.0, ms.n) ** 2:
        raise DegenerateStateError(f"var(J_{axis}^b) vanishes; optimal gain undefined")
    return -covariance(ms, axis, normalized) / var_b


def planar_average(state, combo: str, order: int) -> float:
    """Angle-averaged normalized moment ``<(J_perp^combo)^order>`` for combo in plus/minus/a."""
    if combo not in ("plus", "minus", "a"):
        raise InvalidArgumentError(f"unknown combination {combo!r}")
    if order == 1:
        return 0.0
    if order != 2:
        raise InvalidArgumentError("only first and second planar moments are defined")
    return float(moment_set(state)[f"perp_{combo}"])


# ---------------------------------------------------------------------------
# closed forms for split Dicke states
# ---------------------------------------------------------------------------


def dicke_pair_correlations(n: int) -> dict:
    """Two-particle correlations ``<j_l^(1) j_l^(2)>`` of the N-particle Dicke state."""
    if n < 2:
        raise InvalidArgumentError("need at least two particles")
    return {"x": n / (8 * (n - 1)), "y": n / (8 * (n - 1)), "z": -1 / (4 * (n - 1))}


def max_correlation_bound(n: int, delta: float) -> float:
    """``j_a j_b``, the largest possible ``|<J_l^a J_l^b>|`` at split ``n/2 + delta``."""
    return n**2 / 16 - delta**2 / 4


def _dicke_sector_raw(n: int, n_a: int) -> dict:
    c = dicke_pair_correlations(n)
    n_b = n - n_a
    raw = {}
    for l in AXES:
        raw[f"mean_{l}_a"] = raw[f"mean_{l}_b"] = 0.0
        raw[f"sq_{l}_a"] = n_a / 4 + n_a * (n_a - 1) * c[l]
        raw[f"sq_{l}_b"] = n_b / 4 + n_b * (n_b - 1) * c[l]
        raw[f"corr_{l}"] = n_a * n_b * c[l]
    return raw


def analytic_dicke_moments(n: int, delta="binomial") -> MomentSet:
    """Closed-form moments of the split Dicke state.

    ``delta`` is the offset ``n_a - n/2`` for an exact split, or ``"binomial"``
    for the beam-splitter mixture.  Exact fields come from the two-particle
    correlations; normalized binomial fields are exact finite sums over the
    untruncated binomial distribution.  Large-N approximations are stored in
    ``approximate``.
    """
    if n % 2 or n < 2:
        raise InvalidArgumentError("Dicke moments need even n >= 2")
    c = dicke_pair_correlations(n)
    if delta == "binomial":
        n_a_values = np.arange(n + 1)
        weights = np.exp(log_binom(n, n_a_values) - n * np.log(2))
        mode = "binomial"
    else:
        if int(delta) != delta or abs(delta) > n / 2:
            raise InvalidArgumentError("delta must be an integer with |delta| <= n/2")
        n_a_values = np.array([n // 2 + int(delta)])
        weights = np.array([1.0])
        mode = "exact"
    acc: dict[str, float] = {}
    for n_a, w in zip(n_a_values, weights):
        raw = _dicke_sector_raw(n, int(n_a))
        ja, jb = n_a / 2, (n - n_a) / 2
        fa = 0.0 if ja == 0 else 1 / np.sqrt(ja * (ja + 1))
        fb = 0.0 if jb == 0 else 1 / np.sqrt(jb * (jb + 1))
        for k, v in raw.items():
            acc[k] = acc.get(k, 0.0) + w * v
        for l in PLANAR:
            for side, f in (("a", fa), ("b", fb)):
                acc[f"nmean_{l}_{side}"] = 0.0
                acc[f"nsq_{l}_{side}"] = acc.get(f"nsq_{l}_{side}", 0.0) + w * f**2 * raw[f"sq_{l}_{side}"]
            acc[f"ncorr_{l}"] = acc.get(f"ncorr_{l}", 0.0) + w * fa * fb * raw[f"corr_{l}"]
    values = _derive(acc)

    if mode == "binomial":
        approx = {
            "nvar_x_minus": 2 / n,
            "nvar_y_minus": 2 / n,
        }
    else:
        d = float(delta)
        ja, jb = n / 4 + d / 2, n / 4 - d / 2
        approx = {
            "var_x_minus": n / 8 + d**2 / 2,
            "var_y_minus": n / 8 + d**2 / 2,
            "nvar_x_minus": n / (n**2 / 2 - d**2),
            "nvar_y_minus": n / (n**2 / 2 - d**2),
        }
        for l in PLANAR:
            for side, j in (("a", ja), ("b", jb)):
                if j > 0:
                    approx[f"nsq_{l}_{side}"] = 1 / (2 * (j + 1)) + 4 * c[l]
    return MomentSet(values, float(n), f"analytic-{mode}", approx)


# ---------------------------------------------------------------------------
# brute-force moment set
# ---------------------------------------------------------------------------


def oracle_moment_set(n: int, n_a: int, state_tag: str) -> MomentSet:
    """MomentSet assembled entirely from :func:`~splitdicke.spin.full_qubit_oracle` calls.

    Correlations follow from ``<(J^a + J^b)^2> - <(J^a)^2> - <(J^b)^2> = 2<J^a J^b>``.
    """
    acc = {}
    for l in AXES:
        for prefix, norm in (("", False), ("n", True)):
            if norm and l == "z":
                continue

            def q(side, power):
                return full_qubit_oracle(n, n_a, state_tag, OperatorSpec(l, side, power, norm))

            acc[f"{prefix}mean_{l}_a"] = q("a", 1)
            acc[f"{prefix}mean_{l}_b"] = q("b", 1)
            sa, sb = q("a", 2), q("b", 2)
            acc[f"{prefix}sq_{l}_a"] = sa
            acc[f"{prefix}sq_{l}_b"] = sb
            acc[f"{prefix}corr_{l}"] = (q("sum", 2) - sa - sb) / 2
    return MomentSet(_derive(acc), float(n), "oracle")


def symmetric_moment_set(state: SymmetricState, n_a: int) -> MomentSet:
    """MomentSet of an exact split, through the symmetric-subspace path."""
    return moment_set(split_exact(state, n_a))
