"""Angular-momentum matrices, bipartite collective operators and matrix functions.

Basis conventions
-----------------
A spin ``j`` is represented in ``|j, m>`` with ``m`` running from ``j`` down to
``-j``.  A bipartite sector ``(n_a, n_b)`` stores amplitudes as a 2-D array
``psi[i_a, i_b]`` whose flattening is row-major over ``(m_a, m_b)``; dense
operators returned by :func:`realize_operator` act on ``psi.reshape(-1)``.

Large sectors are never stored as dense operators.  Moment evaluation uses the
structured actions in :func:`apply_component` (``J_z`` diagonal, ``J_x``/``J_y``
tridiagonal in ``m``), and the spectral quantities ``<|J_l|>`` and
``<sqrt(J_x^2 + J_y^2)>`` are evaluated block by block.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .exceptions import DomainError, InvalidArgumentError, ResourceLimitError

PSD_CLAMP = 1e-10
# eigenvalues this close to zero (relative to the spectral radius) are exact zeros
# whose rounding error would otherwise be amplified by the square root
ZERO_SNAP = 1e-12
ORACLE_MAX_QUBITS = 12
SPECTRAL_MAX_DIM = 40_000

AXES = ("x", "y", "z")
SIDES = ("a", "b", "sum", "difference")


def check_spin(j) -> float:
    """Return ``j`` as a float after checking that ``2j`` is a non-negative integer."""
    two_j = 2 * float(j)
    if two_j < 0 or abs(two_j - round(two_j)) > 1e-12:
        raise InvalidArgumentError(f"spin quantum number must be a non-negative half-integer, got {j!r}")
    return round(two_j) / 2


@functools.lru_cache(maxsize=None)
def _ladder(two_j: int):
    j = two_j / 2
    m = j - np.arange(two_j + 1)
    # J+ |j,m> = cplus[i] |j,m+1>, zero at the top state
    cplus = np.sqrt(np.clip(j * (j + 1) - m * (m + 1), 0.0, None))
    m.flags.writeable = False
    cplus.flags.writeable = False
    return m, cplus


def magnetic_numbers(j) -> np.ndarray:
    """``m`` values of spin ``j`` in basis order (descending)."""
    return _ladder(round(2 * check_spin(j)))[0]


def spin_matrices(j):
    """Dense ``(J_x, J_y, J_z)`` for spin ``j`` in the descending ``|j, m>`` basis."""
    j = check_spin(j)
    m, cplus = _ladder(round(2 * j))
    jp = np.diag(cplus[1:], k=1).astype(complex)
    jx = (jp + jp.T) / 2
    jy = (jp - jp.T) / 2j
    jz = np.diag(m).astype(complex)
    return jx, jy, jz


@dataclass(frozen=True)
class SpinSector:
    """Fixed particle numbers ``(n_a, n_b)`` of the two subsystems."""

    n_a: int
    n_b: int

    def __post_init__(self):
        for v in (self.n_a, self.n_b):
            if int(v) != v or v < 0:
                raise InvalidArgumentError(f"particle numbers must be non-negative integers, got {self.n_a}, {self.n_b}")
        object.__setattr__(self, "n_a", int(self.n_a))
        object.__setattr__(self, "n_b", int(self.n_b))

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    @property
    def j_a(self) -> float:
        return self.n_a / 2

    @property
    def j_b(self) -> float:
        return self.n_b / 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_a + 1, self.n_b + 1)

    @property
    def dim(self) -> int:
        return (self.n_a + 1) * (self.n_b + 1)

    def norm_factors(self) -> tuple[float, float]:
        """``1/sqrt(j_s(j_s+1))`` per side; an empty side gets 0 (zero operator)."""
        return _norm_factor(self.j_a), _norm_factor(self.j_b)


def _norm_factor(j: float) -> float:
    return 0.0 if j == 0 else 1.0 / np.sqrt(j * (j + 1))


@dataclass(frozen=True)
class OperatorSpec:
    """Symbolic description of a bipartite collective observable.

    ``axis`` is ``"x"``, ``"y"``, ``"z"`` or a float planar angle ``alpha``
    giving ``J_x cos(alpha) + J_y sin(alpha)``.  ``function="sqrt"`` denotes
    ``sqrt(O_x^2 + O_y^2)`` built from the chosen side combination; the axis is
    ignored in that case.
    """

    axis: object = "z"
    side: str = "sum"
    power: int = 1
    normalized: bool = False
    function: str | None = None

    def __post_init__(self):
        if isinstance(self.axis, str):
            if self.axis not in AXES:
                raise InvalidArgumentError(f"unknown axis {self.axis!r}")
        elif not np.isfinite(float(self.axis)):
            raise InvalidArgumentError("planar angle must be finite")
        if self.side not in SIDES:
            raise InvalidArgumentError(f"unknown side {self.side!r}")
        if self.power not in (1, 2):
            raise InvalidArgumentError("power must be 1 or 2")
        if self.function not in (None, "abs", "sqrt"):
            raise InvalidArgumentError(f"unknown matrix function {self.function!r}")
        if self.normalized and self.axis == "z" and self.function != "sqrt":
            raise InvalidArgumentError("normalization is defined only for the x and y directions")

    def side_coefficients(self, sector: SpinSector) -> tuple[float, float]:
        ca, cb = {"a": (1.0, 0.0), "b": (0.0, 1.0), "sum": (1.0, 1.0), "difference": (1.0, -1.0)}[self.side]
        if self.normalized:
            fa, fb = sector.norm_factors()
            ca, cb = ca * fa, cb * fb
        return ca, cb


def _axis_matrix(j: float, axis) -> np.ndarray:
    jx, jy, jz = spin_matrices(j)
    if isinstance(axis, str):
        return {"x": jx, "y": jy, "z": jz}[axis]
    return np.cos(axis) * jx + np.sin(axis) * jy


def _combine(sector: SpinSector, ca: float, cb: float, axis) -> np.ndarray:
    da, db = sector.shape
    return ca * np.kron(_axis_matrix(sector.j_a, axis), np.eye(db)) + cb * np.kron(np.eye(da), _axis_matrix(sector.j_b, axis))


def realize_operator(sector: SpinSector, spec: OperatorSpec) -> np.ndarray:
    """Dense matrix of ``spec`` on the ``(n_a+1)(n_b+1)``-dimensional sector space."""
    ca, cb = spec.side_coefficients(sector)
    if spec.function == "sqrt":
        ox, oy = _combine(sector, ca, cb, "x"), _combine(sector, ca, cb, "y")
        op = matrix_function(ox @ ox + oy @ oy, "sqrt")
    else:
        op = _combine(sector, ca, cb, spec.axis)
        if spec.function == "abs":
            op = matrix_function(op, "abs")
    if spec.power == 2:
        op = op @ op
    return op


def matrix_function(op: np.ndarray, tag: str) -> np.ndarray:
    """Apply ``abs`` or ``sqrt`` to a Hermitian matrix through its eigendecomposition.

    For ``sqrt``, eigenvalues in ``[-1e-10, 0)`` and those within
    :data:`ZERO_SNAP` of zero (relative) are set to zero; anything more negative
    raises :class:`DomainError`.
    """
    op = np.asarray(op)
    if not np.allclose(op, op.conj().T, atol=1e-10):
        raise InvalidArgumentError("matrix function requires a Hermitian operator")
    w, v = la.eigh(op)
    if tag == "abs":
        f = np.abs(w)
    elif tag == "sqrt":
        if w.min(initial=0.0) < -PSD_CLAMP:
            raise DomainError(f"sqrt of operator with eigenvalue {w.min():.3e}")
        w = np.where(np.abs(w) <= ZERO_SNAP * max(1.0, np.abs(w).max(initial=0.0)), 0.0, w)
        f = np.sqrt(np.clip(w, 0.0, None))
    else:
        raise InvalidArgumentError(f"unknown matrix function {tag!r}")
    out = (v * f) @ v.conj().T
    return (out + out.conj().T) / 2


# ---------------------------------------------------------------------------
# structured actions on sector amplitudes psi[i_a, i_b]
# ---------------------------------------------------------------------------


def _raise(x: np.ndarray, cplus: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    out[:-1] = cplus[1:, None] * x[1:]
    return out


def _lower(x: np.ndarray, cplus: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    out[1:] = cplus[1:, None] * x[:-1]
    return out


def apply_component(psi: np.ndarray, j: float, axis, side: str) -> np.ndarray:
    """Apply ``J_axis`` of spin ``j`` to side ``"a"`` (rows) or ``"b"`` (columns) of ``psi``."""
    x = psi if side == "a" else psi.T
    m, cplus = _ladder(round(2 * j))
    if axis == "z":
        out = m[:, None] * x
    else:
        up, down = _raise(x, cplus), _lower(x, cplus)
        if axis == "x":
            out = (up + down) / 2
        elif axis == "y":
            out = (up - down) / 2j
        else:
            out = (np.cos(axis) + np.sin(axis) / 1j) * up / 2 + (np.cos(axis) - np.sin(axis) / 1j) * down / 2
    return out if side == "a" else out.T


@functools.lru_cache(maxsize=64)
def _component_eigh(two_j: int, axis: str):
    jx, jy, _ = spin_matrices(two_j / 2)
    w, v = la.eigh(jx if axis == "x" else jy)
    # exact spectrum -j..j
    w = -two_j / 2 + np.arange(two_j + 1, dtype=float)
    v.flags.writeable = False
    return w, v


def component_eigenbasis(j: float, axis: str):
    """Eigenvalues (ascending, exact half-integers) and eigenvectors of ``J_x`` or ``J_y``."""
    return _component_eigh(round(2 * check_spin(j)), axis)


def _spectral_guard(sector: SpinSector):
    if sector.dim > SPECTRAL_MAX_DIM:
        raise ResourceLimitError(f"sector dimension {sector.dim} exceeds spectral guard {SPECTRAL_MAX_DIM}")


def abs_expectation(psi: np.ndarray, sector: SpinSector, axis: str, ca: float, cb: float) -> float:
    """``<psi| |ca J_l^a + cb J_l^b| |psi>`` using the product eigenbasis of the two sides."""
    _spectral_guard(sector)
    wa, va = component_eigenbasis(sector.j_a, axis)
    wb, vb = component_eigenbasis(sector.j_b, axis)
    coeffs = va.conj().T @ psi @ vb.conj()
    spectrum = np.abs(ca * wa[:, None] + cb * wb[None, :])
    return float(np.sum(np.abs(coeffs) ** 2 * spectrum))


def perp_sqrt_expectation(psi: np.ndarray, sector: SpinSector, ca: float, cb: float) -> float:
    """``<sqrt(O_x^2 + O_y^2)>`` for ``O = ca J^a + cb J^b``.

    The operator conserves ``m_a + m_b`` and is tridiagonal inside each block of
    fixed total ``m``, so it is diagonalized block by block.
    """
    _spectral_guard(sector)
    ja, jb = sector.j_a, sector.j_b
    ma, cpa = _ladder(sector.n_a)
    mb, cpb = _ladder(sector.n_b)
    da, db = sector.shape
    total = 0.0
    # index sums i_a + i_b = s label blocks of constant m_a + m_b
    for s in range(da + db - 1):
        ia = np.arange(max(0, s - db + 1), min(da - 1, s) + 1)
        ib = s - ia
        amp = psi[ia, ib]
        if not np.any(amp):
            continue
        diag = ca**2 * (ja * (ja + 1) - ma[ia] ** 2) + cb**2 * (jb * (jb + 1) - mb[ib] ** 2)
        if len(ia) == 1:
            w = diag
            proj = np.abs(amp) ** 2
        else:
            # <m_a+1, m_b-1| J+^a J-^b |m_a, m_b>; ia descending in m_a means next row is ia-1
            # order block by increasing i_a: element (k, k+1) couples ia[k] (higher m_a) with ia[k+1]
            off = ca * cb * cpa[ia[1:]] * cpb[ib[:-1]]
            w, v = la.eigh_tridiagonal(diag, off)
            proj = np.abs(v.T @ amp) ** 2
        if w.min() < -PSD_CLAMP * max(1.0, abs(w).max()):
            raise DomainError("negative eigenvalue in sum of squares")
        w = np.where(np.abs(w) <= ZERO_SNAP * max(1.0, np.abs(w).max()), 0.0, w)
        total += float(np.sum(proj * np.sqrt(np.clip(w, 0.0, None))))
    return total


# ---------------------------------------------------------------------------
# brute-force oracle on the full 2^N qubit space
# ---------------------------------------------------------------------------

_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex) / 2,
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex) / 2,
    "z": np.array([[1, 0], [0, -1]], dtype=complex) / 2,
}
ORACLE_STATES = ("dicke", "polarized-x", "polarized-z", "ghz")


def _single_site(op: np.ndarray, site: int, n: int):
    return sp.kron(sp.kron(sp.identity(2**site), sp.csr_matrix(op)), sp.identity(2 ** (n - site - 1)), format="csr")


def _oracle_state(n: int, tag: str) -> np.ndarray:
    # qubit basis order (|1>, |0>): bit value 0 of a site index means an excitation
    if tag == "polarized-z":
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = 1
        return psi
    if tag == "polarized-x":
        return np.full(2**n, 2 ** (-n / 2), dtype=complex)
    if tag == "ghz":
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = psi[-1] = 1 / np.sqrt(2)
        return psi
    if tag == "dicke":
        if n % 2:
            raise InvalidArgumentError("Dicke state needs even N")
        psi = np.zeros(2**n, dtype=complex)
        for ones in itertools.combinations(range(n), n // 2):
            idx = sum(1 << (n - 1 - k) for k in range(n) if k not in ones)
            psi[idx] = 1
        return psi / np.linalg.norm(psi)
    raise InvalidArgumentError(f"unknown oracle state {tag!r}")


def _oracle_component(n: int, sites, axis):
    if isinstance(axis, str):
        local = _SIGMA[axis]
    else:
        local = np.cos(axis) * _SIGMA["x"] + np.sin(axis) * _SIGMA["y"]
    out = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for k in sites:
        out = out + _single_site(local, k, n)
    return out


def full_qubit_oracle(n: int, n_a: int, state_tag: str, spec: OperatorSpec) -> float:
    """Expectation of ``spec`` computed on the full ``2^N`` tensor-product space.

    Subsystem ``a`` is the first ``n_a`` qubits.  Independent of the symmetric
    subspace machinery: states are built by enumerating bit strings and the
    collective operators are sums of single-qubit spin matrices.
    """
    if n > ORACLE_MAX_QUBITS:
        raise ResourceLimitError(f"oracle limited to N <= {ORACLE_MAX_QUBITS}")
    if not 0 <= n_a <= n:
        raise InvalidArgumentError("n_a out of range")
    psi = _oracle_state(n, state_tag)
    ca, cb = spec.side_coefficients(SpinSector(n_a, n - n_a))

    def collective(axis):
        return ca * _oracle_component(n, range(n_a), axis) + cb * _oracle_component(n, range(n_a, n), axis)

    if spec.function == "sqrt":
        ox, oy = collective("x"), collective("y")
        op = matrix_function((ox @ ox + oy @ oy).toarray(), "sqrt")
    elif spec.function == "abs":
        op = matrix_function(collective(spec.axis).toarray(), "abs")
    else:
        op = collective(spec.axis)
    if spec.power == 2:
        op = op @ op
    return float(np.real(np.vdot(psi, op @ psi)))
