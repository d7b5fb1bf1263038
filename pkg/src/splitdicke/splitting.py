"""Splitting a symmetric ensemble into two sub-ensembles.

Exact splitting keeps ``n_a`` fixed.  Binomial splitting models a beam-splitter
that sends each particle to either side with probability 1/2; the result is a
:class:`SectorMixture` over ``n_a`` with binomial weights.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import InvalidArgumentError
from .spin import SpinSector
from .states import SectorState, SymmetricState, log_binom, random_product

DEFAULT_TAIL_MASS = 1e-15


@dataclass(frozen=True, eq=False)
class SectorMixture:
    """Convex mixture of sector states, all sharing the same total particle number.

    Entries may be stored as zero-argument builders so that large binomial
    mixtures are materialized one sector at a time.
    """

    n: int
    mode: str
    weights: tuple
    sources: tuple
    discarded_mass: float = 0.0
    delta_variance: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.sources) or len(w) == 0:
            raise InvalidArgumentError("weights and entries must be non-empty and of equal length")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise InvalidArgumentError("mixture weights must be non-negative and sum to 1")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    @classmethod
    def from_entries(cls, entries, mode: str = "explicit") -> "SectorMixture":
        entries = list(entries)
        ns = {s.sector.n for _, s in entries}
        if len(ns) != 1:
            raise InvalidArgumentError("all mixture entries must share the total particle number")
        w = np.array([p for p, _ in entries], dtype=float)
        return cls(ns.pop(), mode, tuple(w / w.sum()), tuple(s for _, s in entries))

    def __len__(self) -> int:
        return len(self.weights)

    def state(self, i: int) -> SectorState:
        src = self.sources[i]
        return src if isinstance(src, SectorState) else src()

    def __iter__(self):
        for i, w in enumerate(self.weights):
            yield w, self.state(i)

    def sectors(self) -> list[SpinSector]:
        return [self.state(i).sector for i in range(len(self))]

    def sector_weights(self) -> dict:
        """Total weight per ``n_a``, without materializing lazily built entries when possible."""
        if "n_a" in self.meta:
            keys = self.meta["n_a"]
        else:
            keys = [s.n_a for s in self.sectors()]
        out: dict[int, float] = {}
        for k, w in zip(keys, self.weights):
            out[int(k)] = out.get(int(k), 0.0) + w
        return out

    def single_sector(self) -> SpinSector | None:
        keys = list(self.sector_weights())
        return SpinSector(keys[0], self.n - keys[0]) if len(keys) == 1 else None

    def to_json(self) -> str:
        entries = []
        for w, s in self:
            if not s.is_pure:
                raise InvalidArgumentError("JSON export supports pure entries only")
            entries.append({
                "n_a": s.sector.n_a,
                "weight": w,
                "amplitudes": [[float(a.real), float(a.imag)] for a in s.vector.reshape(-1)],
            })
        return json.dumps({"n": self.n, "mode": self.mode, "entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "SectorMixture":
        doc = json.loads(text)
        n = doc["n"]
        entries = []
        for e in doc["entries"]:
            sector = SpinSector(e["n_a"], n - e["n_a"])
            amp = np.array([re + 1j * im for re, im in e["amplitudes"]])
            entries.append((e["weight"], SectorState(sector, amp.reshape(sector.shape))))
        mix = cls.from_entries(entries, mode=doc.get("mode", "explicit"))
        return mix


def as_mixture(state) -> SectorMixture:
    """Wrap a :class:`SectorState` (or pass through a mixture)."""
    if isinstance(state, SectorMixture):
        return state
    if isinstance(state, SectorState):
        return SectorMixture(state.sector.n, "exact", (1.0,), (state,))
    if isinstance(state, SymmetricState):
        return as_mixture(state.as_sector())
    raise InvalidArgumentError(f"cannot interpret {type(state).__name__} as a bipartite state")


def split_amplitudes(amplitudes: np.ndarray, n_a: int) -> np.ndarray:
    """Bipartite amplitudes ``psi[i_a, i_b]`` of a symmetric state split at ``n_a``.

    The amplitude on ``|k, n_a> |m-k, n_b>`` is
    ``c_m sqrt(C(n_a, k) C(n_b, m-k) / C(n, m))``; rows and columns are then
    reordered to descending ``m_s``.
    """
    n = len(amplitudes) - 1
    n_b = n - n_a
    k = np.arange(n_a + 1)
    l = np.arange(n_b + 1)
    m = k[:, None] + l[None, :]
    logc = 0.5 * (log_binom(n_a, k)[:, None] + log_binom(n_b, l)[None, :] - log_binom(n, np.arange(n + 1))[m])
    amp = np.asarray(amplitudes)
    if not np.any(amp.imag):
        amp = amp.real
    psi = amp[m] * np.exp(logc)
    return psi[::-1, ::-1]


def split_exact(state: SymmetricState, n_a: int) -> SectorState:
    """Split ``state`` with exactly ``n_a`` particles in subsystem ``a``."""
    if int(n_a) != n_a or not 0 <= n_a <= state.n:
        raise InvalidArgumentError(f"n_a must be an integer in [0, {state.n}], got {n_a!r}")
    n_a = int(n_a)
    psi = split_amplitudes(state.amplitudes, n_a)
    return SectorState(SpinSector(n_a, state.n - n_a), psi / np.linalg.norm(psi))


def binomial_weights(n: int, tail_mass: float = DEFAULT_TAIL_MASS):
    """Kept ``n_a`` values, renormalized weights and the discarded probability.

    The kept range is symmetric about ``n/2`` and as narrow as possible while the
    discarded binomial mass stays at or below ``tail_mass``.
    """
    if not 0 < tail_mass <= 1e-6:
        raise InvalidArgumentError("tail_mass must lie in (0, 1e-6]")
    n_a = np.arange(n + 1)
    p = np.exp(log_binom(n, n_a) - n * np.log(2))
    dist = np.abs(n_a - n / 2)
    # drop whole distance shells from the outside while the dropped mass fits the budget
    shells = np.unique(dist)[::-1]
    dropped = 0.0
    cutoff = np.inf
    for d in shells[:-1]:
        extra = p[dist == d].sum()
        if dropped + extra > tail_mass:
            break
        dropped += extra
        cutoff = d
    keep = dist < cutoff
    w = p[keep]
    return n_a[keep], w / w.sum(), float(p[~keep].sum())


def split_binomial(state: SymmetricState, tail_mass: float = DEFAULT_TAIL_MASS) -> SectorMixture:
    """Binomial partition of ``state``: mixture of exact splits weighted by ``2^-N C(N, n_a)``."""
    n_values, w, dropped = binomial_weights(state.n, tail_mass)
    sources = tuple(functools.partial(split_exact, state, int(k)) for k in n_values)
    return SectorMixture(
        state.n, "binomial", tuple(w), sources,
        discarded_mass=dropped, delta_variance=state.n / 4,
        meta={"n_a": [int(k) for k in n_values]},
    )


def split(state: SymmetricState, mode: str = "exact", n_a: int | None = None, tail_mass: float = DEFAULT_TAIL_MASS):
    """Dispatch on ``mode`` (``"exact"`` or ``"binomial"``); exact defaults to ``n_a = n // 2``."""
    if mode == "exact":
        return split_exact(state, state.n // 2 if n_a is None else n_a)
    if mode == "binomial":
        return split_binomial(state, tail_mass)
    raise InvalidArgumentError(f"unknown split mode {mode!r}")


# ---------------------------------------------------------------------------
# Schmidt decomposition
# ---------------------------------------------------------------------------


def dicke_schmidt_coefficients(n: int, n_a: int) -> np.ndarray:
    """Closed-form Schmidt coefficients ``lambda_m`` of the Dicke state, ``m = 0..n_a``.

    ``m`` counts excitations in subsystem ``a``; coefficients vanish where
    ``n/2 - m`` is outside ``[0, n_b]``.
    """
    n_b = n - n_a
    m = np.arange(n_a + 1)
    rest = n // 2 - m
    lam = np.zeros(n_a + 1)
    ok = (rest >= 0) & (rest <= n_b)
    lam[ok] = np.exp(0.5 * (log_binom(n_a, m[ok]) + log_binom(n_b, rest[ok]) - log_binom(n, n // 2)))
    return lam


def schmidt_spectrum(state: SectorState) -> np.ndarray:
    """Schmidt coefficients (descending) of a pure sector state."""
    if not state.is_pure:
        raise InvalidArgumentError("Schmidt decomposition requires a pure state")
    return np.linalg.svd(state.vector, compute_uv=False)


def schmidt_entropy(state: SectorState) -> float:
    """Entanglement entropy in bits, ``-sum lambda^2 log2 lambda^2``."""
    p = schmidt_spectrum(state) ** 2
    p = p[p > 1e-300]
    return float(-(p * np.log2(p)).sum() + 0.0)


# ---------------------------------------------------------------------------
# separable test ensembles
# ---------------------------------------------------------------------------


def random_separable(n: int, terms: int, rng: np.random.Generator, sectors: str = "single",
                     n_a: int | None = None, kind: str = "haar") -> SectorMixture:
    """Random separable state: Dirichlet-weighted mixture of Haar-random product states.

    ``sectors="single"`` puts every term in sector ``(n_a, n - n_a)`` (default a
    random ``n_a``); ``sectors="binomial"`` gives each binomially weighted
    sector its own mixture of ``terms`` product states.  ``kind`` selects
    Haar-random or spin-coherent factors (see :func:`~splitdicke.states.random_product`).
    """
    if sectors == "single":
        if n_a is None:
            n_a = int(rng.integers(0, n + 1))
        sector = SpinSector(n_a, n - n_a)
        w = rng.dirichlet(np.ones(terms))
        return SectorMixture.from_entries([(wk, random_product(sector, rng, kind)) for wk in w], mode="separable")
    if sectors == "binomial":
        entries = []
        for k in range(n + 1):
            pk = np.exp(log_binom(n, k) - n * np.log(2))
            sector = SpinSector(k, n - k)
            for wk in rng.dirichlet(np.ones(terms)):
                entries.append((pk * wk, random_product(sector, rng, kind)))
        return SectorMixture.from_entries(entries, mode="separable-binomial")
    raise InvalidArgumentError(f"unknown sector layout {sectors!r}")
