"""Collective-spin (Dicke) sector states and operations.

An ensemble of ``N`` two-level systems restricted to a fixed total-spin
sector ``l`` lives in a ``2l+1``-dimensional space spanned by the
simultaneous eigenstates ``|l, m>`` of total spin and its z projection.
Throughout the package the component order is ``m = +l, +l-1, ..., -l``
(largest projection first); serialized artifacts state this explicitly.

Dense storage is used everywhere: even ``N = 512`` is only a 513x513
complex matrix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .errors import DomainError, NumericError, UsageError

__all__ = [
    "Basis",
    "SectorLabel",
    "DickeState",
    "DickeDensityMatrix",
    "coherent_state",
    "rotation_to_x",
    "rotate_state_to_x",
    "to_x_basis",
    "fidelity",
    "purity",
    "coherence_corner",
]

_NORM_TOL = 1e-12
_HERM_TOL = 1e-12
_TRACE_TOL = 1e-12
_PSD_TOL = 1e-10


class Basis(str, enum.Enum):
    """Which collective-spin component eigenbasis labels the indices."""

    LZ = "Lz"
    LX = "Lx"


@dataclass(frozen=True)
class SectorLabel:
    """Total-spin sector of an N-particle ensemble.

    ``l`` defaults to the symmetric (maximal) sector ``N/2``.  ``2l`` must
    be an integer and ``0 <= l <= N/2``.
    """

    n_particles: int
    l: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if not (isinstance(self.n_particles, (int, np.integer)) and self.n_particles >= 1):
            raise DomainError(f"n_particles must be a positive integer, got {self.n_particles!r}")
        object.__setattr__(self, "n_particles", int(self.n_particles))
        l = self.n_particles / 2.0 if self.l is None else float(self.l)
        object.__setattr__(self, "l", l)
        two_l = 2.0 * l
        if abs(two_l - round(two_l)) > 1e-12 or not 0.0 <= l <= self.n_particles / 2.0:
            raise DomainError(f"l must satisfy 2l integer and 0 <= l <= N/2, got l={l}")

    @property
    def dimension(self) -> int:
        return int(round(2.0 * self.l)) + 1

    @property
    def symmetric(self) -> bool:
        return self.l == self.n_particles / 2.0

    def m_values(self) -> np.ndarray:
        """Projection quantum numbers, ordered ``+l`` down to ``-l``."""
        return self.l - np.arange(self.dimension)


@dataclass(frozen=True)
class DickeState:
    """Pure state in a fixed sector: complex amplitudes ``c_m``.

    ``bloch`` optionally records the preparation angles ``(theta, phi)``
    when the state was built as a spin coherent state; it is metadata only.
    """

    sector: SectorLabel
    amplitudes: np.ndarray
    basis: Basis = Basis.LZ
    bloch: tuple[float, float] | None = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.sector.dimension,):
            raise DomainError(
                f"amplitudes shape {amp.shape} != sector dimension ({self.sector.dimension},)")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > _NORM_TOL:
            raise DomainError(f"state norm {norm!r} deviates from 1 beyond {_NORM_TOL}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "basis", Basis(self.basis))

    def projector(self) -> "DickeDensityMatrix":
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return DickeDensityMatrix(self.sector, rho, self.basis)


@dataclass(frozen=True)
class DickeDensityMatrix:
    """Density matrix over ``m`` indices (order ``+l`` first) in a sector.

    Construction enforces hermiticity, unit trace and positive
    semidefiniteness within fixed tolerances.
    """

    sector: SectorLabel
    elements: np.ndarray
    basis_tag: Basis = Basis.LZ

    def __post_init__(self):
        rho = np.asarray(self.elements, dtype=complex)
        d = self.sector.dimension
        if rho.shape != (d, d):
            raise DomainError(f"elements shape {rho.shape} != ({d}, {d})")
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > _HERM_TOL:
            raise DomainError(f"matrix deviates from hermitian by {herm!r}")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > _TRACE_TOL:
            raise DomainError(f"trace {tr!r} deviates from 1 beyond {_TRACE_TOL}")
        lo = float(np.linalg.eigvalsh(rho)[0])
        if lo < -_PSD_TOL:
            raise DomainError(f"smallest eigenvalue {lo!r} below -{_PSD_TOL}")
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)
        object.__setattr__(self, "basis_tag", Basis(self.basis_tag))


# ---------------------------------------------------------------------------
# state construction


def coherent_state(sector: SectorLabel, theta: float, phi: float) -> DickeState:
    """Spin coherent state: every particle points along ``(theta, phi)``.

    Amplitudes (m ordered ``+l`` down to ``-l``)::

        c_m = sqrt(C(2l, l-m)) * cos(theta/2)**(l+m)
                                * sin(theta/2)**(l-m) * exp(i (l-m) phi)

    Only defined in the symmetric sector ``l = N/2``.  Binomial weights are
    accumulated in log space so the construction stays stable to N = 512
    and beyond.  For ``theta`` in (0, pi) the ``m = +l`` amplitude is real
    positive (global-phase convention); the formula is evaluated as printed
    for any real angles, including negative ``theta``.
    """
    if not sector.symmetric:
        raise UsageError(
            f"coherent states require the symmetric sector l = N/2, got l={sector.l}")
    l = sector.l
    m = sector.m_values()
    two_l = int(round(2 * l))
    k = np.round(l - m).astype(int)  # 0 .. 2l
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    log_binom = 0.5 * (gammaln(two_l + 1) - gammaln(k + 1) - gammaln(two_l - k + 1))

    # magnitude in log space, exact zeros handled by masks so that
    # 0**0 = 1 and 0**positive = 0 without log-of-zero noise
    pc, ps = two_l - k, k  # exponents of cos and sin halves
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = log_binom \
            + np.where(pc > 0, pc * np.log(abs(c)) if c != 0.0 else -np.inf, 0.0) \
            + np.where(ps > 0, ps * np.log(abs(s)) if s != 0.0 else -np.inf, 0.0)
    mag = np.exp(log_mag)
    sign = np.where(pc % 2 == 1, math.copysign(1.0, c), 1.0) \
        * np.where(ps % 2 == 1, math.copysign(1.0, s), 1.0)
    if c == 0.0:
        mag = np.where(pc > 0, 0.0, mag)
    if s == 0.0:
        mag = np.where(ps > 0, 0.0, mag)
    amp = sign * mag * np.exp(1j * k * phi)
    amp = amp / np.linalg.norm(amp)
    return DickeState(sector, amp, Basis.LZ, bloch=(float(theta), float(phi)))


# ---------------------------------------------------------------------------
# rotation between the Lz and Lx eigenbases


@lru_cache(maxsize=64)
def _rotation_matrix(two_l: int) -> np.ndarray:
    """Orthogonal map from Lz-basis components to Lx-basis components.

    Row r of the result is the Lx eigenvector with eigenvalue ``m = l - r``
    expressed in the Lz basis, so ``c_x = M @ c_z``.  The rows are obtained
    as eigenvectors of the tridiagonal Lx matrix (a numerically stable
    symmetric-tridiagonal eigenproblem); each row's sign is fixed by making
    its last (m' = -l) component positive, which reproduces the active
    rotation by ``-pi/2`` about the y axis.
    """
    l = two_l / 2.0
    dim = two_l + 1
    m = l - np.arange(dim)
    # <m|Lx|m-1> = sqrt(l(l+1) - m(m-1))/2 couples index k to k+1
    off = 0.5 * np.sqrt(l * (l + 1.0) - m[:-1] * (m[:-1] - 1.0))
    vals, vecs = eigh_tridiagonal(np.zeros(dim), off)
    # ascending eigenvalues are -l..+l; row r needs eigenvalue l - r
    mat = vecs[:, ::-1].T.copy()
    signs = np.where(mat[:, -1] >= 0.0, 1.0, -1.0)
    mat *= signs[:, None]
    mat.setflags(write=False)
    return mat


def rotation_to_x(sector: SectorLabel) -> np.ndarray:
    """Rotation matrix taking Lz-basis components to Lx-basis components.

    The returned array is cached and marked read-only; copy before
    mutating.  Orthogonal to machine precision for all supported sectors.
    """
    return _rotation_matrix(int(round(2 * sector.l)))


def rotate_state_to_x(state: DickeState) -> DickeState:
    """Re-express a pure Lz-basis state in the Lx eigenbasis."""
    if state.basis is not Basis.LZ:
        raise UsageError(f"state already in basis {state.basis.value}")
    amp = rotation_to_x(state.sector) @ state.amplitudes
    return DickeState(state.sector, amp, Basis.LX, bloch=state.bloch)


def to_x_basis(rho: DickeDensityMatrix) -> DickeDensityMatrix:
    """Re-express an Lz-basis density matrix in the Lx eigenbasis."""
    if rho.basis_tag is not Basis.LZ:
        raise UsageError(f"density matrix already in basis {rho.basis_tag.value}")
    mat = rotation_to_x(rho.sector)
    return DickeDensityMatrix(rho.sector, mat @ rho.elements @ mat.T, Basis.LX)


# ---------------------------------------------------------------------------
# metrics


def fidelity(rho: DickeDensityMatrix, target: DickeState) -> float:
    """Pure-target fidelity ``<psi| rho |psi>``, clamped to [0, 1]."""
    if rho.sector != target.sector:
        raise UsageError("fidelity requires matching sectors")
    if rho.basis_tag.value != target.basis.value:
        raise UsageError(
            f"basis mismatch: rho in {rho.basis_tag.value}, target in {target.basis.value}")
    val = float(np.real(target.amplitudes.conj() @ rho.elements @ target.amplitudes))
    if val < -_NORM_TOL or val > 1.0 + _NORM_TOL:
        raise NumericError(f"fidelity {val!r} outside [0,1] beyond tolerance", estimate=val)
    return min(1.0, max(0.0, val))


def purity(rho: DickeDensityMatrix) -> float:
    """``trace(rho^2)``; 1 for pure states, 1/d for the maximally mixed."""
    return float(np.real(np.vdot(rho.elements, rho.elements)))


def coherence_corner(rho: DickeDensityMatrix) -> float:
    """Magnitude of the extreme anti-diagonal element ``|rho_{+l,-l}|``.

    Only meaningful in the Lx basis, where it measures the coherence
    between the two macroscopically distinct superposition components.
    """
    if rho.basis_tag is not Basis.LX:
        raise UsageError("corner coherence is defined in the Lx basis")
    return float(abs(rho.elements[0, -1]))
