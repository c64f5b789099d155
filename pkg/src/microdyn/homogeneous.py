"""Particle in a homogeneous field that is ramped on linearly over tau.

The ramp redistributes energy density between the field part and the
kinetic part of the particle.  The two symmetric solutions (branches)
carry opposite changes; their sum is zero in every branch.

Two numerical routes back the closed forms:

- the mass density follows from  lap(phi) + d2(rho)/dt2 = 0,  integrated on
  a uniform space-time grid with trapezoidal time stepping;
- the phase-velocity change follows from the linearized continuity equation
  integrated along the particle's path x' = u0 * t'.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import NATURAL, Branch, HomogeneousField, InteractionResult, ParticleState, UnitsLedger
from .errors import DomainError, RangeError, SolverError

__all__ = [
    "RampSchedule",
    "FringeShiftResult",
    "ramped_fields",
    "delta_phi_em",
    "delta_phi_em_terms",
    "delta_rho_analytic",
    "delta_rho_numeric",
    "density_history",
    "kinetic_branches",
    "field_branches",
    "phase_velocity_shift",
    "linear_velocity_change",
    "phase_velocity_shift_numeric",
    "fringe_shift",
    "interact",
]

MIN_RESOLUTION = 16


@dataclass(frozen=True)
class RampSchedule:
    tau: float
    shape: str = "linear"

    def __post_init__(self):
        if not (self.tau > 0):
            raise DomainError(f"tau must be > 0, got {self.tau!r}", "tau")
        if self.shape != "linear":
            raise DomainError(f"only the linear ramp is implemented, got {self.shape!r}", "shape")

    def fraction(self, t):
        """Fraction of the full field switched on at time t."""
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > self.tau)):
            raise RangeError(f"t={t!r} outside ramp interval [0, {self.tau}]", "t")
        out = t / self.tau
        return float(out) if out.ndim == 0 else out

    def rate(self) -> float:
        return 1.0 / self.tau


@dataclass(frozen=True)
class FringeShiftResult:
    """Interferometer phase difference of the field arm against the reference arm.

    ``delta_phase`` is the first-order phase, -omega0 * L * delta_u / u0**2.
    ``delta_phase_exact`` keeps the full reciprocal-velocity form
    omega0 * L * (1/(u0 + delta_u) - 1/u0).
    """

    delta_u: float
    path_length: float
    delta_phase: float
    delta_phase_exact: float
    branch: Branch


def _require_homogeneous(field):
    if not isinstance(field, HomogeneousField):
        raise DomainError("operation needs a homogeneous field", "field")


def ramped_fields(state: ParticleState, field: HomogeneousField, x, t):
    """Intrinsic fields while the external field ramps in.

    Returns (E'_y, E'_z, B'_y, B'_z).  The magnetic part grows with the ramp
    fraction t/tau.  The induced electric part is set by the (constant) ramp
    rate, -b_ext * x / tau along the field direction, so it is present for
    the whole ramp; at t = tau the result is the fully switched-on state.
    """
    _require_homogeneous(field)
    ramp = RampSchedule(field.tau)
    f = ramp.fraction(t)
    wave = np.cos(state.phase(x, t))
    s, c = math.sin(field.theta), math.cos(field.theta)
    b = field.b_ext
    e_y = state.E0 * wave - b * c * x / field.tau
    e_z = -b * s * x / field.tau + 0.0 * wave
    b_y = -f * b * s + 0.0 * wave
    b_z = state.B0 * wave + f * b * c
    return e_y, e_z, b_y, b_z


def delta_phi_em_terms(state: ParticleState, field: HomogeneousField, x):
    """The x-dependent and the constant term of the field energy change."""
    _require_homogeneous(field)
    b2 = field.b_ext**2
    dynamic = 0.5 * b2 / state.u0**2 * x**2 / field.tau**2
    constant = 0.5 * b2
    return dynamic, constant


def delta_phi_em(state: ParticleState, field: HomogeneousField, x):
    """Change of field energy density at t = tau and position x."""
    dynamic, constant = delta_phi_em_terms(state, field, x)
    return dynamic + constant


def delta_rho_analytic(state: ParticleState, field: HomogeneousField) -> float:
    _require_homogeneous(field)
    return -0.5 * field.b_ext**2 / state.u0**2


def _default_potential(state, field):
    coef = 0.5 * field.b_ext**2 / (state.u0**2 * field.tau**2)
    return lambda x, t: coef * x * x + 0.0 * t


def density_history(state: ParticleState, field: HomogeneousField, resolution=256, potential=None):
    """Integrate d2(rho)/dt2 = -lap(phi) over the ramp on a uniform grid.

    The grid covers x in [0, u0 * tau] and t in [0, tau] with ``resolution``
    intervals each, so grid node n in space is where the particle sits at
    time node n.  ``potential(x, t)`` defaults to the x-dependent field
    energy term; pass another callable to integrate a different source.

    Returns ``(x, t, rho, rate)`` with ``rho`` and ``rate`` (its time
    derivative) shaped (time, space) and zero at t = 0.
    """
    _require_homogeneous(field)
    resolution = int(resolution)
    if resolution < MIN_RESOLUTION:
        raise DomainError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}", "resolution")
    if potential is None:
        potential = _default_potential(state, field)
    tau = field.tau
    x = np.linspace(0.0, state.u0 * tau, resolution + 1)
    t = np.linspace(0.0, tau, resolution + 1)
    dx = x[1] - x[0]
    dt = t[1] - t[0]

    X, T = np.meshgrid(x, t)
    lap = (potential(X + dx, T) - 2.0 * potential(X, T) + potential(X - dx, T)) / (dx * dx)
    accel = -lap

    rate = np.zeros_like(accel)
    rho = np.zeros_like(accel)
    for n in range(resolution):
        rate[n + 1] = rate[n] + 0.5 * dt * (accel[n] + accel[n + 1])
        rho[n + 1] = rho[n] + 0.5 * dt * (rate[n] + rate[n + 1])

    if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(rate))):
        bad = np.argwhere(~np.isfinite(rho))
        step = int(bad[0, 0]) if len(bad) else -1
        raise SolverError(
            "mass-density integration produced non-finite values",
            {"resolution": resolution, "first_bad_step": step,
             "max_abs_source": float(np.nanmax(np.abs(accel)))},
        )
    return x, t, rho, rate


def delta_rho_numeric(state: ParticleState, field: HomogeneousField, resolution=256,
                      potential=None) -> float:
    """Mass-density change at t = tau, at the particle position x = u0 * tau."""
    _, _, rho, _ = density_history(state, field, resolution, potential)
    return float(rho[-1, -1])


def kinetic_branches(B_E, units: UnitsLedger = NATURAL):
    """Kinetic energy-density change (plus branch, minus branch)."""
    if B_E < 0:
        raise DomainError(f"B_E must be >= 0, got {B_E!r}", "B_E")
    magnitude = 0.5 * units.hbar * units.c**2 * B_E**2
    return -magnitude, magnitude


def field_branches(B_E, units: UnitsLedger = NATURAL):
    """Field energy-density change (plus branch, minus branch)."""
    k_plus, k_minus = kinetic_branches(B_E, units)
    return -k_plus, -k_minus


def phase_velocity_shift(state: ParticleState, B_E, branch: Branch) -> float:
    if B_E < 0:
        raise DomainError(f"B_E must be >= 0, got {B_E!r}", "B_E")
    return Branch.parse(branch).sign * B_E / math.sqrt(state.rho0)


def linear_velocity_change(state: ParticleState, field: HomogeneousField, resolution=256,
                           potential=None) -> float:
    """First-order speed change at x = u0 * tau from the continuity equation.

    Integrates  rho0 * du = -int_0^x d(delta_rho)/dt dx'  along the path
    x' = u0 * t', using the density rate from ``density_history``.
    """
    x, _, _, rate = density_history(state, field, resolution, potential)
    along_path = np.diagonal(rate)
    return float(-np.trapezoid(along_path, x) / state.rho0)


def phase_velocity_shift_numeric(state: ParticleState, field: HomogeneousField, resolution=256,
                                 branch: Branch = Branch.PLUS, potential=None) -> float:
    """Branch-resolved speed change from the numerically integrated ramp.

    The first-order change du_lin sets the kinetic increment u0 * du_lin,
    which is identified with du**2 / 2; the branch picks the sign of du.
    """
    du_lin = linear_velocity_change(state, field, resolution, potential)
    work = state.u0 * du_lin
    return Branch.parse(branch).sign * math.sqrt(2.0 * abs(work))


def fringe_shift(state: ParticleState, field: HomogeneousField, path_length,
                 branch: Branch) -> FringeShiftResult:
    _require_homogeneous(field)
    if not path_length > 0:
        raise DomainError(f"path_length must be > 0, got {path_length!r}", "path_length")
    branch = Branch.parse(branch)
    du = phase_velocity_shift(state, field.b_ext, branch)
    u = state.u0 + du
    if u <= 0:
        raise DomainError(f"u0 + delta_u = {u!r} is not a physical speed", "delta_u")
    omega = state.omega0
    linear = -omega * path_length * du / state.u0**2
    exact = omega * path_length * (1.0 / u - 1.0 / state.u0)
    return FringeShiftResult(delta_u=du, path_length=float(path_length), delta_phase=linear,
                             delta_phase_exact=exact, branch=branch)


def interact(state: ParticleState, field: HomogeneousField, branch: Branch,
             units: UnitsLedger = NATURAL, resolution=None) -> InteractionResult:
    """Full branch-resolved interaction at the end of the ramp.

    Field energy uses only the x-dependent term at the particle position
    x = u0 * tau; the constant term does not act on the particle.  With
    ``resolution`` set, mass density and speed come from the numerical
    routes, otherwise from the closed forms.
    """
    _require_homogeneous(field)
    branch = Branch.parse(branch)
    dynamic, _ = delta_phi_em_terms(state, field, state.u0 * field.tau)
    d_em = branch.sign * units.hbar * units.c**2 * dynamic
    k_plus, k_minus = kinetic_branches(field.b_ext, units)
    d_k = k_plus if branch is Branch.PLUS else k_minus
    if resolution is None:
        d_rho = delta_rho_analytic(state, field)
        d_u = phase_velocity_shift(state, field.b_ext, branch)
    else:
        d_rho = delta_rho_numeric(state, field, resolution)
        d_u = phase_velocity_shift_numeric(state, field, resolution, branch)
    return InteractionResult(delta_phi_em=d_em, delta_phi_k=d_k, delta_rho=d_rho,
                             delta_u=d_u, branch=branch)
