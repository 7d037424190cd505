"""Exact reduced dynamics and superposition-formation analysis.

The collective coupling dephases the ensemble in the ``L_z`` eigenbasis
without moving populations; the exact propagator acts elementwise::

    rho_{mm'}(t) = rho_{mm'}(0) * exp(-i t f(t) (m**2 - m'**2))
                               * exp(-t Gamma(t) (m - m')**2)

The ``m**2`` phase is one-axis twisting: at accumulated phase
``t*f(t) = pi/2`` a spin coherent state is reshaped into an equal
superposition of two macroscopically distinct coherent states.  This
module builds those target states, solves for the earliest formation time
``tau`` (root of ``t*f(t) = pi/2``), and scores the formed state
(fidelity, purity, extreme coherence) together with the survival
condition ``tau * Gamma(tau) * N**2 < 1`` and the implied maximum
ensemble size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import SpectralDensity
from .dicke import (
    Basis,
    DickeDensityMatrix,
    DickeState,
    SectorLabel,
    coherence_corner,
    coherent_state,
    fidelity,
    purity,
    to_x_basis,
)
from .errors import NoFormationError, NumericError, UsageError
from .kernels import f_of_t, gamma_of_t

import enum

__all__ = [
    "MqsConvention",
    "EvolutionParams",
    "MqsReport",
    "evolve_state",
    "mqs_target",
    "solve_tau_mqs",
    "assess_mqs",
    "snapshot_series",
]

_HALF_PI = math.pi / 2.0
_TAU_RESIDUAL_TOL = 1e-9 * _HALF_PI


class MqsConvention(str, enum.Enum):
    """How the second component of the macroscopic superposition is built.

    ANTIPODAL pairs ``|theta, phi>`` with ``|theta - pi, phi>`` (exact
    antipode on the Bloch sphere, components always orthogonal).  TWIST
    pairs it with ``|theta, phi + pi>``, the population-conserving partner
    actually produced by the ``m**2``-phase dynamics; the two conventions
    coincide on the equator ``theta = pi/2``.
    """

    ANTIPODAL = "antipodal"
    TWIST = "twist"


@dataclass(frozen=True)
class EvolutionParams:
    """Complete description of one evolution problem.

    ``force_zero_decoherence`` is a test hook that replaces ``Gamma`` by 0
    so the unitary twisting can be checked in isolation; it is not exposed
    through the command-line layer.  ``solve_horizon_factor`` bounds the
    formation-time search at ``horizon = factor * t_corr``.
    """

    spectrum: SpectralDensity
    sector: SectorLabel
    initial: DickeState
    mqs_convention: MqsConvention = MqsConvention.TWIST
    force_zero_decoherence: bool = False
    solve_horizon_factor: float = 1e6

    def __post_init__(self):
        object.__setattr__(self, "mqs_convention", MqsConvention(self.mqs_convention))
        if self.initial.sector != self.sector:
            raise UsageError("initial state sector differs from params sector")
        if self.initial.basis is not Basis.LZ:
            raise UsageError("initial state must be given in the Lz basis")
        if not self.solve_horizon_factor > 1.0:
            raise UsageError(f"solve_horizon_factor must exceed 1, got {self.solve_horizon_factor}")


@dataclass(frozen=True)
class MqsReport:
    """Summary of superposition formation at ``tau_mqs``.

    ``n_max = floor(1 / sqrt(tau * gamma_bar))`` is the largest ensemble
    obeying the survival condition; it is None (unbounded) when the
    effective decoherence vanishes.  ``feasible`` applies the condition at
    the report's own particle number.
    """

    tau_mqs: float
    f_at_tau: float
    gamma_at_tau: float
    fidelity: float
    corner: float
    purity: float
    feasible: bool
    n_max: int | None
    convention_used: str


def evolve_state(p: EvolutionParams, t: float) -> DickeDensityMatrix:
    """Exact dephasing propagation of the initial pure state to time ``t``.

    ``t = 0`` returns the initial projector.  The result is always in the
    Lz basis; populations are conserved exactly.
    """
    if t < 0.0:
        raise UsageError(f"t must be >= 0, got {t}")
    rho0 = np.outer(p.initial.amplitudes, p.initial.amplitudes.conj())
    if t == 0.0:
        return DickeDensityMatrix(p.sector, rho0, Basis.LZ)
    f = f_of_t(p.spectrum, t)
    gamma = 0.0 if p.force_zero_decoherence else gamma_of_t(p.spectrum, t)
    m = p.sector.m_values()
    m2 = m * m
    phase = np.exp(-1j * t * f * (m2[:, None] - m2[None, :]))
    decay = np.exp(-t * gamma * (m[:, None] - m[None, :]) ** 2)
    return DickeDensityMatrix(p.sector, rho0 * phase * decay, Basis.LZ)


def mqs_target(sector: SectorLabel, theta: float, phi: float,
               convention: MqsConvention = MqsConvention.TWIST) -> DickeState:
    """Macroscopic-superposition target state for a given preparation.

    ANTIPODAL builds ``(e^{-i pi/4}|theta,phi> + e^{+i pi/4}|theta-pi,phi>)``
    normalized.  TWIST builds ``(e^{-i s pi/4}|theta,phi> +
    e^{+i s pi/4}|theta,phi+pi>)`` normalized, with a parity sign
    ``s = (-1)**l`` for integer ``l``: the twisting phases
    ``exp(-i (pi/2) m**2)`` reduce to 1 on even ``m`` and ``-i`` on odd
    ``m``, and matching that pattern onto the two-component form flips the
    quarter-wave phases between even and odd ``l``.  Half-integer sectors
    (odd N) never reach a two-component superposition exactly; ``s = +1``
    is used and the fidelity is simply reported.
    """
    if not sector.symmetric:
        raise UsageError("superposition targets require the symmetric sector")
    convention = MqsConvention(convention)
    a = coherent_state(sector, theta, phi)
    if convention is MqsConvention.ANTIPODAL:
        b = coherent_state(sector, theta - math.pi, phi)
        sign = 1.0
    else:
        b = coherent_state(sector, theta, phi + math.pi)
        l = sector.l
        sign = -1.0 if (l == int(l) and int(l) % 2 == 1) else 1.0
    qw = math.cos(math.pi / 4.0) - 1j * sign * math.sin(math.pi / 4.0)
    amp = qw * a.amplitudes + qw.conjugate() * b.amplitudes
    amp = amp / np.linalg.norm(amp)
    return DickeState(sector, amp, Basis.LZ, bloch=None)


def solve_tau_mqs(sd: SpectralDensity, horizon_factor: float = 1e6) -> float:
    """Earliest time with accumulated twisting phase ``t*f(t) = pi/2``.

    ``t*f(t)`` is nondecreasing, so the first crossing is found by bracket
    doubling from the bath correlation time up to ``horizon_factor * t_corr``
    followed by root polishing; the returned root satisfies
    ``|tau f(tau) - pi/2| <= 1e-9 * pi/2``.  Raises
    :class:`NoFormationError` (with the achieved supremum) when the phase
    never reaches the threshold inside the horizon.
    """
    from scipy.optimize import brentq

    from .kernels import correlation_time

    t_c = correlation_time(sd)
    horizon = horizon_factor * t_c
    g = lambda t: t * f_of_t(sd, t) - _HALF_PI

    hi = t_c
    ghi = g(hi)
    while ghi < 0.0 and hi < horizon:
        hi = min(2.0 * hi, horizon)
        ghi = g(hi)
    if ghi < 0.0:
        raise NoFormationError(
            f"accumulated phase t*f(t) reaches only {ghi + _HALF_PI!r} "
            f"(< pi/2) up to the horizon t = {horizon!r}",
            estimate=ghi + _HALF_PI)
    lo = hi / 2.0
    glo = g(lo)
    for _ in range(200):
        if glo <= 0.0:
            break
        hi, ghi = lo, glo
        lo = lo / 2.0
        glo = g(lo)
    else:
        raise NumericError("failed to bracket the formation time from below")
    if glo == 0.0:
        tau = lo
    else:
        # certified bracket: g(lo) < 0 <= g(hi)
        tau = brentq(g, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200)
    residual = abs(tau * f_of_t(sd, tau) - _HALF_PI)
    if residual > _TAU_RESIDUAL_TOL:
        raise NumericError(
            f"formation-time residual {residual!r} exceeds tolerance",
            estimate=tau, error_bound=residual)
    return float(tau)


def assess_mqs(p: EvolutionParams) -> MqsReport:
    """Evolve to the formation time and score the superposition.

    The fidelity is taken against the convention's target built from the
    initial state's preparation angles; the corner coherence is evaluated
    after rotating to the Lx basis.  ``gamma_bar`` in the survival
    condition is ``Gamma(tau)`` (already a time-averaged rate).
    """
    if p.initial.bloch is None:
        raise UsageError(
            "assess_mqs needs a coherent initial state (preparation angles "
            "are required to construct the target)")
    theta, phi = p.initial.bloch
    tau = solve_tau_mqs(p.spectrum, p.solve_horizon_factor)
    rho = evolve_state(p, tau)
    f_tau = f_of_t(p.spectrum, tau)
    gamma_bar = 0.0 if p.force_zero_decoherence else gamma_of_t(p.spectrum, tau)
    target = mqs_target(p.sector, theta, phi, p.mqs_convention)
    fid = fidelity(rho, target)
    pur = purity(rho)
    corner = coherence_corner(to_x_basis(rho))
    n = p.sector.n_particles
    product = tau * gamma_bar
    feasible = product * n * n < 1.0
    n_max = math.floor(1.0 / math.sqrt(product)) if product > 0.0 else None
    return MqsReport(tau_mqs=tau, f_at_tau=f_tau, gamma_at_tau=gamma_bar,
                     fidelity=fid, corner=corner, purity=pur,
                     feasible=feasible, n_max=n_max,
                     convention_used=p.mqs_convention.value)


def snapshot_series(p: EvolutionParams, times, basis: Basis = Basis.LZ) -> list[DickeDensityMatrix]:
    """Evolved density matrices at each requested time, optionally rotated.

    Kernel values are computed independently per time point; evaluation
    order does not affect the results.
    """
    basis = Basis(basis)
    out = []
    for t in np.asarray(times, dtype=float):
        rho = evolve_state(p, float(t))
        if basis is Basis.LX:
            rho = to_x_basis(rho)
        out.append(rho)
    return out
