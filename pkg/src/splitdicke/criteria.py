"""Uncertainty relation, steering and entanglement criteria for split ensembles.

Every criterion returns a :class:`CriterionReport`.  For lower-bound criteria
(``lhs >= rhs`` for every separable or non-steerable state) the ratio is
``lhs / rhs``; for the upper-bound correlation criteria it is ``rhs / lhs``, so
``ratio < 1`` signals a violation throughout.

Functions accept a :class:`~splitdicke.states.SectorState`, a
:class:`~splitdicke.splitting.SectorMixture`, a ``SymmetricState`` (treated as
sector ``(N, 0)``) or, for moment-only criteria, a precomputed
:class:`~splitdicke.moments.MomentSet`.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateStateError, InvalidArgumentError, ResourceLimitError
from .moments import GainVector, MomentSet, _pure_terms, moment_set
from .spin import abs_expectation, perp_sqrt_expectation
from .splitting import SectorMixture, as_mixture

# relative slack below which lhs == rhs counts as saturation, not violation
SATURATION_RTOL = 1e-9

ENTANGLEMENT_VARIANTS = ("raw", "sqrt", "abs", "normalized", "normalized-sqrt", "normalized-abs", "planar")
FIRST_MOMENT_VARIANTS = ("summed", "giovannetti")
APPENDIX_VARIANTS = ("correlation", "correlation-binomial", "singlet", "dicke-variance")
RESCALED_GAINS = GainVector(-1.0, -1.0, 1.0)
ZERO_GAINS = GainVector(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    lhs: float
    rhs: float
    ratio: float | None
    violated: bool
    direction: str = "lower"
    components: dict = field(default_factory=dict)
    gains: dict | None = None
    state: dict = field(default_factory=dict)
    notes: tuple = ()
    intervals: dict | None = None

    @property
    def applicable(self) -> bool:
        return self.ratio is not None

    def to_dict(self) -> dict:
        out = {
            "criterion": self.criterion,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "ratio": None if self.ratio is None else float(self.ratio),
            "violated": bool(self.violated),
            "direction": self.direction,
            "gains": self.gains,
            "components": {k: float(v) for k, v in self.components.items()},
            "state": dict(self.state),
            "notes": list(self.notes),
        }
        if self.intervals is not None:
            out["intervals"] = {k: [float(lo), float(hi)] for k, (lo, hi) in self.intervals.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _report(name, lhs, rhs, *, direction="lower", components=None, gains=None, state=None, notes=(), intervals=None):
    lhs, rhs = float(lhs), float(rhs)
    slack = SATURATION_RTOL * max(abs(lhs), abs(rhs), 1e-300)
    if direction == "lower":
        ratio = lhs / rhs if rhs > 0 else None
        violated = rhs > 0 and lhs < rhs - slack
    else:
        ratio = rhs / lhs if lhs > 0 else None
        violated = lhs > rhs + slack
    return CriterionReport(
        name, lhs, rhs, ratio, bool(violated), direction,
        dict(components or {}), None if gains is None else {k: float(v) for k, v in gains._asdict().items()},
        dict(state or {}), tuple(notes), intervals,
    )


def state_info(state) -> dict:
    if isinstance(state, MomentSet):
        return {"n": state.n, "mode": state.mode}
    mix = as_mixture(state)
    info = {"n": mix.n, "mode": mix.mode, "sectors": len(mix)}
    if mix.discarded_mass:
        info["discarded_mass"] = mix.discarded_mass
    return info


def _moments(state, moments):
    return moments if moments is not None else moment_set(state)


def _require_state(state, what):
    if isinstance(state, MomentSet):
        raise InvalidArgumentError(f"{what} needs the state itself, not only its moments")
    return as_mixture(state)


# ---------------------------------------------------------------------------
# uncertainty relation
# ---------------------------------------------------------------------------


def uncertainty_obs1(state, moments: MomentSet | None = None) -> CriterionReport:
    """Number-phase-like uncertainty relation for the collective spin ``J = J^a + J^b``.

    Holds for every state, so ``violated`` is always false up to rounding.
    """
    ms = _moments(state, moments)
    planar = ms["sq_x_plus"] + ms["sq_y_plus"]
    if planar <= 1e-14 * max(1.0, ms.n) ** 2:
        raise DegenerateStateError("<J_x^2 + J_y^2> vanishes; uncertainty relation undefined")
    var_c = ms["var_x_plus"] / planar
    var_s = ms["var_y_plus"] / planar
    factor_z = ms["var_z_plus"] + 0.25
    comps = {"var_z": ms["var_z_plus"], "factor_z": factor_z, "var_C": var_c, "var_S": var_s, "planar_second_moment": planar}
    return _report("uncertainty", factor_z * (var_c + var_s), 0.25, components=comps, state=state_info(ms))


# ---------------------------------------------------------------------------
# steering
# ---------------------------------------------------------------------------


def _inference_var(ms, axis, g, normalized=False):
    p = "n" if normalized else ""
    if g == 0:
        return ms[f"{p}var_{axis}_a"]
    mean = ms[f"{p}mean_{axis}_a"] + g * ms[f"{p}mean_{axis}_b"]
    sq = ms[f"{p}sq_{axis}_a"] + g**2 * ms[f"{p}sq_{axis}_b"] + 2 * g * ms[f"{p}corr_{axis}"]
    return sq - mean**2


def _auto_gain(ms, axis, normalized=False):
    p = "n" if normalized else ""
    var_b = ms[f"{p}var_{axis}_b"]
    scale = 1.0 if normalized else max(1.0, ms.n) ** 2
    if var_b <= 1e-14 * scale:
        raise DegenerateStateError(f"var(J_{axis}^b) vanishes")
    cov = ms[f"{p}corr_{axis}"] - ms[f"{p}mean_{axis}_a"] * ms[f"{p}mean_{axis}_b"]
    return -cov / var_b


def _resolve_gains(ms, gains, normalized_xy: bool, axes="xyz"):
    """Return a GainVector and the list of axes that fell back to ``g = 0``."""
    if isinstance(gains, GainVector):
        return gains.validate(), []
    if gains in (None, "rescaled"):
        return RESCALED_GAINS, []
    if gains == "zero":
        return ZERO_GAINS, []
    if gains != "auto":
        try:
            return GainVector(*map(float, gains)).validate(), []
        except (TypeError, ValueError):
            raise InvalidArgumentError(f"gains must be 'auto', 'rescaled', 'zero' or three numbers, got {gains!r}") from None
    out, fallback = {}, []
    for axis in "xyz":
        if axis not in axes:
            out[axis] = 0.0
            continue
        try:
            out[axis] = _auto_gain(ms, axis, normalized_xy and axis != "z")
        except DegenerateStateError:
            out[axis] = 0.0
            fallback.append(axis)
    return GainVector(**out), fallback


def _fallback_notes(fallback):
    return [f"gain_fallback:{a}" for a in fallback]


def steering_raw(state, gains="auto", moments: MomentSet | None = None) -> CriterionReport:
    """Inference-variance steering criterion with unnormalized components.

    ``gains`` is ``"auto"`` (optimal gain per axis, falling back to 0 when the
    remote variance vanishes), ``"rescaled"``, ``"zero"`` or a :class:`GainVector`.
    """
    ms = _moments(state, moments)
    g, fallback = _resolve_gains(ms, gains, normalized_xy=False)
    inf = {a: _inference_var(ms, a, getattr(g, a)) for a in "xyz"}
    factor_z = inf["z"] + 0.25
    factor_xy = inf["x"] + inf["y"]
    comps = {"inf_var_z": inf["z"], "inf_var_x": inf["x"], "inf_var_y": inf["y"],
             "factor_z": factor_z, "factor_xy": factor_xy, "sq_x_a": ms["sq_x_a"], "sq_y_a": ms["sq_y_a"]}
    rhs = (ms["sq_x_a"] + ms["sq_y_a"]) / 4
    return _report("steering-raw", factor_z * factor_xy, rhs, components=comps, gains=g,
                   state=state_info(ms), notes=_fallback_notes(fallback))


def steering_normalized(state, gains=None, variant: str = "xy", moments: MomentSet | None = None) -> CriterionReport:
    """Steering criterion with normalized planar components.

    ``gains=None`` uses the rescaled estimators (``g_z = 1``, ``g_x = g_y = -1``
    on the normalized components), which turns the planar factor into
    ``var(J_x^-) + var(J_y^-)`` of the normalized differences.  ``"auto"`` or a
    :class:`GainVector` gives the general estimator form.

    ``variant="planar"`` writes the same criterion with angle-averaged
    quantities: ``2 (Delta J_perp^-)^2`` and ``<(J_perp^a)^2> / 2``.
    """
    ms = _moments(state, moments)
    if variant not in ("xy", "planar"):
        raise InvalidArgumentError(f"unknown steering variant {variant!r}")
    if variant == "planar" and gains not in (None, "rescaled"):
        raise InvalidArgumentError("the planar form is defined for the rescaled estimator only")
    g, fallback = _resolve_gains(ms, gains, normalized_xy=True)
    inf_z = _inference_var(ms, "z", g.z)
    factor_z = inf_z + 0.25
    e_a = ms["nsq_x_a"] + ms["nsq_y_a"]
    comps = {"inf_var_z": inf_z, "factor_z": factor_z, "E_a": e_a}
    if variant == "xy":
        inf = {a: _inference_var(ms, a, getattr(g, a), normalized=True) for a in "xy"}
        v_a = inf["x"] + inf["y"]
        comps.update({"inf_var_x": inf["x"], "inf_var_y": inf["y"], "V_a": v_a})
        lhs, rhs, name = factor_z * v_a, e_a / 4, "steering-normalized"
    else:
        perp_var = planar_difference_variance(ms)
        comps.update({"perp_var_minus": perp_var, "perp_sq_a": ms["perp_a"]})
        lhs, rhs, name = factor_z * 2 * perp_var, ms["perp_a"] / 2, "steering-planar"
    return _report(name, lhs, rhs, components=comps, gains=g, state=state_info(ms), notes=_fallback_notes(fallback))


def planar_difference_variance(ms: MomentSet) -> float:
    """Angle-averaged variance ``(Delta J_perp^-)^2`` of the normalized difference.

    Averaging ``var(J_alpha^-)`` over a uniform angle gives
    ``(var(J_x^-) + var(J_y^-)) / 2``.
    """
    return (ms["nvar_x_minus"] + ms["nvar_y_minus"]) / 2


def reid_criterion(state, gains="auto", moments: MomentSet | None = None) -> CriterionReport:
    """Reid-type criterion ``inf_var(J_z^a) inf_var(J_y^a) >= |<J_x^a>|^2 / 4``."""
    ms = _moments(state, moments)
    g, fallback = _resolve_gains(ms, gains, normalized_xy=False, axes="yz")
    inf_z = _inference_var(ms, "z", g.z)
    inf_y = _inference_var(ms, "y", g.y)
    rhs = ms["mean_x_a"] ** 2 / 4
    notes = _fallback_notes(fallback)
    if rhs <= 1e-24 * max(1.0, ms.n) ** 2:
        rhs = 0.0
        notes.append("polarization-free state, criterion inapplicable")
    comps = {"inf_var_z": inf_z, "inf_var_y": inf_y, "mean_x_a": ms["mean_x_a"]}
    return _report("reid", inf_z * inf_y, rhs, components=comps, gains=g._replace(x=0.0), state=state_info(ms), notes=notes)


# ---------------------------------------------------------------------------
# entanglement
# ---------------------------------------------------------------------------


def _spectral_plus(state, kind: str, normalized: bool) -> tuple:
    """Sector-mixed ``<sqrt(J_x^2 + J_y^2)>`` or ``(<|J_x|>, <|J_y|>)`` of the collective spin."""
    mix = _require_state(state, "spectral variants")
    if kind == "sqrt":
        total = 0.0
    else:
        total = np.zeros(2)
    for w, sector, psi in _pure_terms(mix):
        ca, cb = sector.norm_factors() if normalized else (1.0, 1.0)
        if kind == "sqrt":
            total += w * perp_sqrt_expectation(psi, sector, ca, cb)
        else:
            total += w * np.array([abs_expectation(psi, sector, ax, ca, cb) for ax in "xy"])
    return total


def entanglement_main(state, variant: str = "normalized", moments: MomentSet | None = None) -> CriterionReport:
    """Entanglement criterion ``[var(J_z) + 1/4] [var(J_x^-) + var(J_y^-)] >= rhs``.

    Variants ``raw``, ``sqrt`` and ``abs`` use unnormalized components;
    ``normalized``, ``normalized-sqrt`` and ``normalized-abs`` use the
    normalized ones on both sides.  ``planar`` is the normalized criterion
    written with angle-averaged quantities, ``[var(J_z) + 1/4] 2 (Delta J_perp^-)^2
    >= <(J_perp^+)^2>^2 / 4``.
    """
    if variant not in ENTANGLEMENT_VARIANTS:
        raise InvalidArgumentError(f"unknown entanglement variant {variant!r}")
    ms = moments
    if ms is None:
        ms = state if isinstance(state, MomentSet) else moment_set(state)
    normalized = variant.startswith("normalized") or variant == "planar"
    p = "n" if normalized else ""
    factor_z = ms["var_z_plus"] + 0.25
    comps = {"var_z": ms["var_z_plus"], "factor_z": factor_z}
    if variant == "planar":
        perp_var = planar_difference_variance(ms)
        factor_xy = 2 * perp_var
        comps.update({"perp_var_minus": perp_var, "perp_sq_plus": ms["perp_plus"]})
    else:
        factor_xy = ms[f"{p}var_x_minus"] + ms[f"{p}var_y_minus"]
        comps.update({"var_x_minus": ms[f"{p}var_x_minus"], "var_y_minus": ms[f"{p}var_y_minus"]})
    comps["factor_xy"] = factor_xy
    planar = ms[f"{p}sq_x_plus"] + ms[f"{p}sq_y_plus"]
    comps["planar_second_moment"] = planar
    if variant == "raw":
        rhs = planar**2 / (ms.n * (ms.n + 2))
    elif variant == "normalized":
        rhs = planar**2 / 16
    elif variant == "planar":
        rhs = ms["perp_plus"] ** 2 / 4
    elif variant.endswith("sqrt"):
        s = _spectral_plus(state, "sqrt", normalized)
        comps["mean_sqrt"] = s
        rhs = s**2 / 4
    else:
        ax, ay = _spectral_plus(state, "abs", normalized)
        comps.update({"mean_abs_x": ax, "mean_abs_y": ay})
        rhs = (ax + ay) ** 2 / 8
    return _report(f"entanglement-{variant}", factor_z * factor_xy, rhs, components=comps, state=state_info(ms))


def first_moment_criterion(state, variant: str = "summed", axis: str = "auto", moments: MomentSet | None = None) -> CriterionReport:
    """Entanglement criteria bounded by squared first moments.

    ``summed``: ``var(J_z) [var(J_x^-) + var(J_y^-)] >= (<J_x>^2 + <J_y>^2) / 4``.

    ``giovannetti``: ``var(U_a + U_b) var(V_a - V_b) >= (<C_a> + <C_b>)^2 / 4`` with
    ``U = J_z``, ``V = J_axis`` and ``C = i[U, V]``, that is ``C = -J_y`` for
    ``V = J_x`` and ``C = J_x`` for ``V = J_y``.  ``axis="auto"`` takes the
    choice with the larger bound.
    """
    ms = _moments(state, moments)
    notes = []
    if variant == "summed":
        lhs = ms["var_z_plus"] * (ms["var_x_minus"] + ms["var_y_minus"])
        rhs = (ms["mean_x_plus"] ** 2 + ms["mean_y_plus"] ** 2) / 4
        comps = {"var_z": ms["var_z_plus"], "var_x_minus": ms["var_x_minus"], "var_y_minus": ms["var_y_minus"],
                 "mean_x": ms["mean_x_plus"], "mean_y": ms["mean_y_plus"]}
    elif variant == "giovannetti":
        # <C_a> + <C_b> for V = J_x and V = J_y
        commutator = {"x": -ms["mean_y_plus"], "y": ms["mean_x_plus"]}
        if axis == "auto":
            axis = max("xy", key=lambda a: abs(commutator[a]))
        if axis not in ("x", "y"):
            raise InvalidArgumentError(f"axis must be 'x', 'y' or 'auto', got {axis!r}")
        lhs = ms["var_z_plus"] * ms[f"var_{axis}_minus"]
        rhs = commutator[axis] ** 2 / 4
        comps = {"var_z": ms["var_z_plus"], f"var_{axis}_minus": ms[f"var_{axis}_minus"], "commutator_mean": commutator[axis]}
        notes.append(f"V=J_{axis}")
    else:
        raise InvalidArgumentError(f"unknown first-moment variant {variant!r}")
    if rhs <= 1e-24 * max(1.0, ms.n) ** 2:
        rhs = 0.0
        notes.append("vanishing first moments, criterion inapplicable")
    return _report(f"first-moment-{variant}", lhs, rhs, components=comps, state=state_info(ms), notes=notes)


def _sector_weights(state) -> dict:
    if isinstance(state, MomentSet):
        raise InvalidArgumentError("correlation criteria need the sector distribution of the state")
    return as_mixture(state).sector_weights()


def appendix_criteria(state, variant: str, moments: MomentSet | None = None) -> CriterionReport:
    """Correlation and variance criteria for two large spins.

    ``correlation``: ``sum_l |<J_l^a J_l^b>| <= j_a j_b`` on a single sector.
    ``correlation-binomial``: the same with the bound averaged over the
    sector distribution, which is ``N(N-1)/16`` for binomial partitions.
    ``singlet``: ``sum_l var(J_l^a + J_l^b) >= N/2``.
    ``dicke-variance``: ``var(J_z^+) + var(J_x^-) + var(J_y^-) >= N/2``.
    """
    if variant not in APPENDIX_VARIANTS:
        raise InvalidArgumentError(f"unknown appendix variant {variant!r}")
    ms = _moments(state, moments)
    n = ms.n
    if variant.startswith("correlation"):
        weights = _sector_weights(state)
        if variant == "correlation" and len(weights) != 1:
            raise InvalidArgumentError("the fixed-sector correlation criterion needs a single sector; use correlation-binomial")
        bound = sum(w * (k / 2) * ((n - k) / 2) for k, w in weights.items())
        comps = {f"corr_{l}": ms[f"corr_{l}"] for l in "xyz"}
        comps["binomial_bound"] = n * (n - 1) / 16
        lhs = sum(abs(ms[f"corr_{l}"]) for l in "xyz")
        return _report(f"appendix-{variant}", lhs, bound, direction="upper", components=comps, state=state_info(ms))
    if variant == "singlet":
        keys = ("var_x_plus", "var_y_plus", "var_z_plus")
    else:
        keys = ("var_z_plus", "var_x_minus", "var_y_minus")
    comps = {k: ms[k] for k in keys}
    return _report(f"appendix-{variant}", sum(comps.values()), n / 2, components=comps, state=state_info(ms))


# ---------------------------------------------------------------------------
# bundles
# ---------------------------------------------------------------------------

CRITERIA = (
    "uncertainty", "steering-raw", "steering-normalized", "steering-normalized-auto", "steering-planar", "reid",
    *(f"entanglement-{v}" for v in ENTANGLEMENT_VARIANTS),
    *(f"first-moment-{v}" for v in FIRST_MOMENT_VARIANTS),
    *(f"appendix-{v}" for v in APPENDIX_VARIANTS),
)
SPECTRAL = ("entanglement-sqrt", "entanglement-abs", "entanglement-normalized-sqrt", "entanglement-normalized-abs")


def _renamed(report: CriterionReport, name: str) -> CriterionReport:
    return dataclasses.replace(report, criterion=name)


def evaluate(state, name: str, moments: MomentSet | None = None) -> CriterionReport:
    """Evaluate one criterion by its identifier (see :data:`CRITERIA`)."""
    ms = _moments(state, moments)
    if name == "uncertainty":
        return uncertainty_obs1(state, ms)
    if name == "steering-raw":
        return steering_raw(state, "auto", ms)
    if name == "steering-normalized":
        return steering_normalized(state, None, "xy", ms)
    if name == "steering-normalized-auto":
        return _renamed(steering_normalized(state, "auto", "xy", ms), name)
    if name == "steering-planar":
        return steering_normalized(state, None, "planar", ms)
    if name == "reid":
        return reid_criterion(state, "auto", ms)
    for prefix, fn in (("entanglement-", entanglement_main), ("first-moment-", first_moment_criterion), ("appendix-", appendix_criteria)):
        if name.startswith(prefix):
            return fn(state, name[len(prefix):], moments=ms)
    raise InvalidArgumentError(f"unknown criterion {name!r}")


def evaluate_all(state, criteria="all", skip_inapplicable_errors: bool = True) -> list[CriterionReport]:
    """Evaluate a list of criteria sharing one moment computation.

    With ``criteria="all"``, criteria that cannot apply to the state (fixed-sector
    correlation on a mixture, uncertainty relation on a state without planar
    spin) are skipped when ``skip_inapplicable_errors`` is set.
    """
    names = CRITERIA if criteria == "all" else tuple(criteria)
    ms = moment_set(state)
    out = []
    for name in names:
        try:
            out.append(evaluate(state, name, ms))
        except (InvalidArgumentError, DegenerateStateError, ResourceLimitError):
            if not (skip_inapplicable_errors and criteria == "all"):
                raise
    return out
