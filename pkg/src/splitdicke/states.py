"""Reference states of N spin-1/2 particles in the symmetric (Dicke) basis.

A :class:`SymmetricState` stores amplitudes over ``|m, N>`` where ``m`` is the
number of excited particles, so ``J_z = m - N/2``.  Bipartite states live on a
single :class:`~splitdicke.spin.SpinSector` as :class:`SectorState`.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.special import gammaln

from .exceptions import InvalidArgumentError
from .spin import SpinSector, apply_component, spin_matrices

NORM_TOL = 1e-12
PSD_TOL = 1e-10
JSON_BASIS = "dicke-m-ascending"


def log_binom(n, k):
    """Natural log of the binomial coefficient, vectorized over ``k``."""
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


@dataclass(frozen=True, eq=False)
class SymmetricState:
    """Pure permutation-symmetric state; ``amplitudes[m]`` multiplies ``|m, N>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size == 0:
            raise InvalidArgumentError("empty amplitude vector")
        if abs(np.linalg.norm(amp) - 1) > NORM_TOL:
            raise InvalidArgumentError(f"state not normalized (norm {np.linalg.norm(amp)!r})")
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n(self) -> int:
        return self.amplitudes.size - 1

    def spin_vector(self) -> np.ndarray:
        """Amplitudes in the descending ``|N/2, m>`` spin basis."""
        return self.amplitudes[::-1]

    def as_sector(self) -> "SectorState":
        """The whole ensemble viewed as subsystem ``a`` of sector ``(N, 0)``."""
        return SectorState(SpinSector(self.n, 0), self.spin_vector()[:, None])

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "basis": JSON_BASIS,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        })

    @classmethod
    def from_json(cls, text: str) -> "SymmetricState":
        doc = json.loads(text)
        if doc.get("basis") != JSON_BASIS:
            raise InvalidArgumentError(f"unsupported basis {doc.get('basis')!r}")
        amp = np.array([re + 1j * im for re, im in doc["amplitudes"]])
        if amp.size != doc["n"] + 1:
            raise InvalidArgumentError("amplitude count does not match n")
        return cls(amp)


@dataclass(frozen=True, eq=False)
class SectorState:
    """Pure (``vector``) or mixed (``density``) state on one bipartite sector.

    ``vector`` has shape ``sector.shape``; ``density`` is a square matrix on the
    row-major flattened product basis.
    """

    sector: SpinSector
    vector: np.ndarray | None = None
    density: np.ndarray | None = None

    def __post_init__(self):
        if (self.vector is None) == (self.density is None):
            raise InvalidArgumentError("give exactly one of vector or density")
        if self.vector is not None:
            psi = np.asarray(self.vector)
            # real amplitudes stay real, which halves the cost of moment evaluation
            psi = np.array(psi, dtype=float if np.isrealobj(psi) else complex).reshape(self.sector.shape)
            if abs(np.linalg.norm(psi) - 1) > NORM_TOL:
                raise InvalidArgumentError("sector state not normalized")
            psi.flags.writeable = False
            object.__setattr__(self, "vector", psi)
        else:
            rho = np.array(self.density, dtype=complex)
            d = self.sector.dim
            if rho.shape != (d, d):
                raise InvalidArgumentError(f"density matrix must be {d}x{d}")
            if not np.allclose(rho, rho.conj().T, atol=PSD_TOL):
                raise InvalidArgumentError("density matrix not Hermitian")
            if abs(np.trace(rho).real - 1) > NORM_TOL:
                raise InvalidArgumentError("density matrix not unit trace")
            if la.eigvalsh(rho).min() < -PSD_TOL:
                raise InvalidArgumentError("density matrix not positive semidefinite")
            rho.flags.writeable = False
            object.__setattr__(self, "density", rho)

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    def pure_components(self):
        """Yield ``(probability, psi)`` pairs whose mixture is this state."""
        if self.is_pure:
            yield 1.0, self.vector
            return
        w, v = la.eigh(self.density)
        for p, vec in zip(w, v.T):
            if p > PSD_TOL:
                yield float(p), vec.reshape(self.sector.shape)

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            psi = self.vector.reshape(-1)
            return np.outer(psi, psi.conj())
        return self.density


def _check_n(n, minimum=1):
    if int(n) != n or n < minimum:
        raise InvalidArgumentError(f"particle number must be an integer >= {minimum}, got {n!r}")
    return int(n)


def dicke(n: int) -> SymmetricState:
    """Unpolarized symmetric Dicke state with ``n/2`` excitations."""
    n = _check_n(n, 2)
    if n % 2:
        raise InvalidArgumentError("Dicke state requires even n")
    amp = np.zeros(n + 1)
    amp[n // 2] = 1
    return SymmetricState(amp)


def polarized(n: int, axis: str = "z") -> SymmetricState:
    """Spin-coherent state with every particle pointing along ``axis``."""
    n = _check_n(n)
    m = np.arange(n + 1)
    if axis == "z":
        amp = np.zeros(n + 1, dtype=complex)
        amp[n] = 1
        return SymmetricState(amp)
    mag = np.exp(0.5 * (log_binom(n, m) - n * np.log(2)))
    if axis == "x":
        return SymmetricState(mag / np.linalg.norm(mag))
    if axis == "y":
        amp = mag * (-1j) ** m
        return SymmetricState(amp / np.linalg.norm(amp))
    raise InvalidArgumentError(f"unknown axis {axis!r}")


def ghz(n: int) -> SymmetricState:
    n = _check_n(n, 2)
    amp = np.zeros(n + 1)
    amp[0] = amp[n] = 1 / np.sqrt(2)
    return SymmetricState(amp)


@functools.lru_cache(maxsize=8)
def _jx_eigh(n: int):
    # J_x of spin n/2 in the ascending-m basis
    jx = spin_matrices(n / 2)[0][::-1, ::-1].real
    return la.eigh(jx)


def rotate_x(amplitudes: np.ndarray, theta: float) -> np.ndarray:
    """Apply ``exp(-i theta J_x)`` to symmetric amplitudes."""
    n = len(amplitudes) - 1
    w, v = _jx_eigh(n)
    return v @ (np.exp(-1j * theta * w) * (v.T @ amplitudes))


def _var_jz(amplitudes: np.ndarray) -> float:
    n = len(amplitudes) - 1
    m = np.arange(n + 1) - n / 2
    p = np.abs(amplitudes) ** 2
    return float(p @ m**2 - (p @ m) ** 2)


def squeezing_angle(amplitudes: np.ndarray) -> float:
    """Rotation angle in ``[0, pi)`` about x minimizing ``var(J_z)``.

    ``var(J_z)`` after ``exp(-i theta J_x)`` is ``A + B cos 2theta + C sin 2theta``;
    the three coefficients are read off at ``theta = 0, pi/4, pi/2``.
    """
    f0 = _var_jz(amplitudes)
    f45 = _var_jz(rotate_x(amplitudes, np.pi / 4))
    f90 = _var_jz(rotate_x(amplitudes, np.pi / 2))
    a = (f0 + f90) / 2
    b = (f0 - f90) / 2
    c = f45 - a
    if np.hypot(b, c) <= 1e-14 * max(1.0, abs(a)):
        return 0.0
    return float(((np.arctan2(c, b) + np.pi) / 2) % np.pi)


def one_axis_twisted(n: int, mu: float) -> SymmetricState:
    """x-polarized coherent state evolved under ``chi J_z^2`` with ``mu = 2 chi t``,
    then rotated about x so that the squeezed direction is z."""
    n = _check_n(n, 2)
    if mu == 0:
        return polarized(n, "x")
    m = np.arange(n + 1) - n / 2
    amp = polarized(n, "x").amplitudes * np.exp(-0.5j * mu * m**2)
    amp = rotate_x(amp, squeezing_angle(amp))
    return SymmetricState(amp / np.linalg.norm(amp))


def product_dicke(n: int) -> SectorState:
    """``|D_{n/2}> (x) |D_{n/2}>`` on sector ``(n/2, n/2)``."""
    n = _check_n(n, 4)
    if n % 4:
        raise InvalidArgumentError("product of Dicke halves requires n divisible by 4")
    half = n // 2
    psi = np.zeros((half + 1, half + 1))
    psi[half // 2, half // 2] = 1
    return SectorState(SpinSector(half, half), psi)


def random_symmetric(n: int, rng: np.random.Generator) -> SymmetricState:
    """Haar-random pure state of the symmetric subspace."""
    amp = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return SymmetricState(amp / np.linalg.norm(amp))


def coherent_spin_vector(two_j: int, theta: float, phi: float) -> np.ndarray:
    """Spin-coherent state of spin ``two_j/2`` pointing along ``(theta, phi)``, descending-m basis."""
    k = np.arange(two_j + 1)  # excitations, k = two_j is the top state
    mag = np.exp(0.5 * log_binom(two_j, k)) * np.cos(theta / 2) ** k * np.sin(theta / 2) ** (two_j - k)
    amp = mag * np.exp(1j * (two_j - k) * phi)
    return (amp / np.linalg.norm(amp))[::-1]


def _random_side(dim: int, rng: np.random.Generator, kind: str) -> np.ndarray:
    if kind == "haar":
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return v / np.linalg.norm(v)
    if kind == "coherent":
        theta = np.arccos(rng.uniform(-1, 1))
        return coherent_spin_vector(dim - 1, theta, rng.uniform(0, 2 * np.pi))
    raise InvalidArgumentError(f"unknown product kind {kind!r}")


def random_product(sector: SpinSector, rng: np.random.Generator, kind: str = "haar") -> SectorState:
    """Product of random pure states on the two sides of ``sector``.

    ``kind="haar"`` draws Haar-random states, ``kind="coherent"`` spin-coherent
    states along isotropic random directions.
    """
    da, db = sector.shape
    psi = np.outer(_random_side(da, rng, kind), _random_side(db, rng, kind))
    return SectorState(sector, psi / np.linalg.norm(psi))


def collective_expectations(state: SymmetricState) -> dict:
    """First and second moments of the collective spin of a symmetric state."""
    psi = state.spin_vector()[:, None]
    j = state.n / 2
    out = {}
    for axis in "xyz":
        v = apply_component(psi, j, axis, "a")
        out[f"mean_{axis}"] = float(np.vdot(psi, v).real)
        out[f"sq_{axis}"] = float(np.vdot(v, v).real)
    return out
