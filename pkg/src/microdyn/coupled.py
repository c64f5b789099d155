"""Nonlinear coupled system for the complex field and complex mass amplitude.

With B = B_r + i B_i and psi = psi_r + i psi_i the field equation

    (hbar/2) lap(B**2) + (1/c**2) d2/dt2 (psi**2) = 0

splits into a real part in (B_r**2 - B_i**2, P) and a cross-term part in
(B_r B_i, Q), where P = psi_r**2 - psi_i**2 and Q = psi_r psi_i.  Only the
quadratic combinations appear, so the solver works with P and Q; B is
prescribed external data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import NATURAL, CoupledFieldGrid, UnitsLedger
from .errors import DimensionError, DivergenceError, DomainError, StabilityError
from .tables import write_table

__all__ = [
    "CoupledResidual",
    "residual",
    "CaseReport",
    "DegenerateReport",
    "degenerate_grid",
    "verify_degenerate_cases",
    "stability_limit",
    "laplacian",
    "initial_levels",
    "evolve",
    "manufactured_grid",
    "plane_wave_pair_grid",
    "export_grid",
    "GRID_COLUMNS",
]

GRID_COLUMNS = ("t", "x", "B_r", "B_i", "P", "Q")


@dataclass
class CoupledResidual:
    """Residuals on interior grid points, shaped (nt - 2, nx - 2)."""

    real_residual: np.ndarray
    imag_residual: np.ndarray
    dx: float
    dt: float

    @property
    def norms(self) -> dict:
        w = math.sqrt(self.dx * self.dt)
        return {
            "real_max": float(np.max(np.abs(self.real_residual))),
            "real_l2": float(w * np.linalg.norm(self.real_residual)),
            "imag_max": float(np.max(np.abs(self.imag_residual))),
            "imag_l2": float(w * np.linalg.norm(self.imag_residual)),
        }


def residual(grid: CoupledFieldGrid) -> CoupledResidual:
    if grid.nx < 3 or grid.nt < 3:
        raise DimensionError(f"grid needs nx >= 3 and nt >= 3, got nx={grid.nx}, nt={grid.nt}",
                             "grid")
    half_hbar = 0.5 * grid.units.hbar
    inv_c2 = 1.0 / grid.units.c**2

    def lap_x(a):
        return (a[1:-1, 2:] - 2.0 * a[1:-1, 1:-1] + a[1:-1, :-2]) / grid.dx**2

    def d2_t(a):
        return (a[2:, 1:-1] - 2.0 * a[1:-1, 1:-1] + a[:-2, 1:-1]) / grid.dt**2

    square_diff = grid.B_r * grid.B_r - grid.B_i * grid.B_i
    cross = grid.B_r * grid.B_i
    real = half_hbar * lap_x(square_diff) + inv_c2 * d2_t(grid.P)
    imag = half_hbar * lap_x(cross) + inv_c2 * d2_t(grid.Q)
    return CoupledResidual(real, imag, grid.dx, grid.dt)


@dataclass
class CaseReport:
    name: str
    imag_exactly_zero: bool
    norms: dict


@dataclass
class DegenerateReport:
    cases: dict
    pairs: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.imag_exactly_zero for c in self.cases.values()) and all(self.pairs.values())


# (B_r present, psi_r present) for each degenerate case
_CASES = {"I": (True, True), "II": (True, False), "III": (False, True), "IV": (False, False)}


def degenerate_grid(case: str, nx=48, nt=40, units: UnitsLedger = NATURAL) -> CoupledFieldGrid:
    """Representative grid where exactly one of B_r, B_i and one of psi_r, psi_i is zero."""
    try:
        b_real, psi_real = _CASES[case]
    except KeyError:
        raise DomainError(f"unknown degenerate case {case!r}", "case") from None
    dx = 2.0 * math.pi / nx
    dt = 0.5 * dx
    x = dx * np.arange(nx)
    t = dt * np.arange(nt)
    T, X = np.meshgrid(t, x, indexing="ij")
    amp_b = 1.0 + 0.5 * np.sin(X - 0.3 * T)
    amp_psi = 0.8 + 0.3 * np.cos(2.0 * X + 0.5 * T)
    zero = np.zeros_like(amp_b)
    B_r, B_i = (amp_b, zero) if b_real else (zero, amp_b)
    psi_r, psi_i = (amp_psi, zero) if psi_real else (zero, amp_psi)
    return CoupledFieldGrid.from_components(B_r, B_i, psi_r, psi_i, dx, dt, units)


def verify_degenerate_cases(nx=48, nt=40, units: UnitsLedger = NATURAL) -> DegenerateReport:
    """Check that the cross-term equation vanishes identically on cases I-IV.

    Cases I/IV and II/III differ only by swapping real and imaginary labels;
    their residual norms must then coincide exactly.
    """
    cases = {}
    for name in _CASES:
        r = residual(degenerate_grid(name, nx, nt, units))
        cases[name] = CaseReport(name, bool(np.all(r.imag_residual == 0.0)), r.norms)
    pairs = {}
    for a, b in (("I", "IV"), ("II", "III")):
        pairs[(a, b)] = cases[a].norms == cases[b].norms
    return DegenerateReport(cases, pairs)


def stability_limit(dx, units: UnitsLedger = NATURAL, safety=0.5) -> float:
    """Largest admissible time step, safety * dx * sqrt(2 / (hbar c**2))."""
    return safety * dx * math.sqrt(2.0 / units.coupling)


def laplacian(a, dx, bc="periodic"):
    a = np.asarray(a, dtype=float)
    if bc == "periodic":
        return (np.roll(a, -1, axis=-1) - 2.0 * a + np.roll(a, 1, axis=-1)) / dx**2
    if bc == "dirichlet":
        out = np.zeros_like(a)
        out[..., 1:-1] = (a[..., 2:] - 2.0 * a[..., 1:-1] + a[..., :-2]) / dx**2
        return out
    raise DomainError(f"unknown boundary condition {bc!r}", "bc")


def _field_at(spec, x, t):
    if callable(spec):
        return np.asarray(spec(x, t), dtype=float) * np.ones_like(x)
    return np.asarray(spec, dtype=float)


def _forcing(B_r, B_i, x, t, dx, units, bc):
    br = _field_at(B_r, x, t)
    bi = _field_at(B_i, x, t)
    k = 0.5 * units.coupling
    return -k * laplacian(br * br - bi * bi, dx, bc), -k * laplacian(br * bi, dx, bc)


def initial_levels(B_r, B_i, x, dt, units: UnitsLedger = NATURAL, P0=0.0, Q0=0.0,
                   dP0=0.0, dQ0=0.0, bc="periodic"):
    """Two starting time levels from values and rates at t = 0.

    Second level uses a second-order Taylor step with the t = 0 forcing, so
    a time-independent forcing is reproduced exactly by the leapfrog scheme.
    """
    x = np.asarray(x, dtype=float)
    dx = x[1] - x[0]
    fP, fQ = _forcing(B_r, B_i, x, 0.0, dx, units, bc)
    P0 = np.broadcast_to(np.asarray(P0, dtype=float), x.shape).copy()
    Q0 = np.broadcast_to(np.asarray(Q0, dtype=float), x.shape).copy()
    P1 = P0 + dt * np.asarray(dP0) + 0.5 * dt * dt * fP
    Q1 = Q0 + dt * np.asarray(dQ0) + 0.5 * dt * dt * fQ
    return (P0, P1), (Q0, Q1)


def evolve(B_r, B_i, P_levels, Q_levels, x, dt, steps, units: UnitsLedger = NATURAL,
           bc="periodic", safety=0.5) -> CoupledFieldGrid:
    """Leapfrog for  d2P/dt2 = -(hbar c**2/2) lap(B_r**2 - B_i**2)  and the
    analogous cross-term equation for Q.

    ``B_r`` and ``B_i`` are static 1-D arrays on ``x`` or callables
    ``f(x, t)``.  ``P_levels`` and ``Q_levels`` hold the solution at t = 0
    and t = dt.  Returns a grid with ``steps + 1`` time levels.  Under
    Dirichlet conditions the end points keep their starting values.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < 3:
        raise DimensionError("x must be a 1-D grid with at least 3 points", "x")
    dx = float(x[1] - x[0])
    if not np.allclose(np.diff(x), dx, rtol=1e-9, atol=0.0):
        raise DomainError("x must be uniformly spaced", "x")
    steps = int(steps)
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}", "steps")
    limit = stability_limit(dx, units, safety)
    if not (0 < dt <= limit):
        raise StabilityError(
            f"dt={dt!r} violates the stability bound dt <= {limit!r}",
            {"dt": dt, "dx": dx, "limit": limit, "safety": safety},
        )

    nt = steps + 1
    P = np.empty((nt, len(x)))
    Q = np.empty_like(P)
    Br = np.empty_like(P)
    Bi = np.empty_like(P)
    P[0], P[1] = P_levels
    Q[0], Q[1] = Q_levels
    for n in range(nt):
        Br[n] = _field_at(B_r, x, n * dt)
        Bi[n] = _field_at(B_i, x, n * dt)

    k = 0.5 * units.coupling
    for n in range(1, steps):
        fP = -k * laplacian(Br[n] * Br[n] - Bi[n] * Bi[n], dx, bc)
        fQ = -k * laplacian(Br[n] * Bi[n], dx, bc)
        P[n + 1] = 2.0 * P[n] - P[n - 1] + dt * dt * fP
        Q[n + 1] = 2.0 * Q[n] - Q[n - 1] + dt * dt * fQ
        if bc == "dirichlet":
            P[n + 1, [0, -1]] = P[1, [0, -1]]
            Q[n + 1, [0, -1]] = Q[1, [0, -1]]
        if not (np.all(np.isfinite(P[n + 1])) and np.all(np.isfinite(Q[n + 1]))):
            raise DivergenceError(f"non-finite values at step {n + 1}", step=n + 1,
                                  diagnostics={"dt": dt, "dx": dx})
    return CoupledFieldGrid(dx=dx, dt=dt, B_r=Br, B_i=Bi, P=P, Q=Q, units=units,
                            x0=float(x[0]))


def manufactured_grid(nx, nt, dx, dt, units: UnitsLedger = NATURAL, k=1.0, omega=1.0,
                      s0=2.0, a=0.5, b=0.4, p0=3.0, q0=0.2) -> CoupledFieldGrid:
    """Exact smooth solution with all four components nonzero.

    With theta = k x - omega t the field obeys B**2 = s0 + a cos(theta)
    + 2i b sin(theta); the mass amplitude psi**2 = P + 2iQ is the matching
    double time integral.  Components come from the principal square root,
    which stays smooth while s0 > |a| and p0 > hbar c**2 k**2 |a| / (2 omega**2).
    """
    x = dx * np.arange(nx)
    t = dt * np.arange(nt)
    T, X = np.meshgrid(t, x, indexing="ij")
    theta = k * X - omega * T
    g = 0.5 * units.coupling * k * k / (omega * omega)
    B = np.sqrt((s0 + a * np.cos(theta)) + 2j * b * np.sin(theta))
    psi = np.sqrt((p0 - g * a * np.cos(theta)) + 2j * (q0 - g * b * np.sin(theta)))
    return CoupledFieldGrid.from_components(B.real, B.imag, psi.real, psi.imag, dx, dt, units)


def plane_wave_pair_grid(nx, nt, dx, dt, units: UnitsLedger = NATURAL, k=1.0, omega=1.0,
                         amplitude=1.0, rho_mean=2.0) -> CoupledFieldGrid:
    """Degenerate case I travelling wave: B_i = psi_i = 0.

    B_r**2 = A**2 (1 + cos(theta)) and psi_r**2 = rho_mean + beta cos(theta)
    with beta = -(hbar c**2 / 2) A**2 k**2 / omega**2, so the real equation
    holds exactly in the continuum.
    """
    x = dx * np.arange(nx)
    t = dt * np.arange(nt)
    T, X = np.meshgrid(t, x, indexing="ij")
    theta = k * X - omega * T
    beta = -0.5 * units.coupling * amplitude**2 * k * k / (omega * omega)
    if rho_mean <= abs(beta):
        raise DomainError("rho_mean must exceed the density oscillation amplitude", "rho_mean")
    B_r = amplitude * math.sqrt(2.0) * np.cos(0.5 * theta)
    psi_r = np.sqrt(rho_mean + beta * np.cos(theta))
    zero = np.zeros_like(B_r)
    return CoupledFieldGrid.from_components(B_r, zero, psi_r, zero, dx, dt, units)


def export_grid(grid: CoupledFieldGrid, path, stride=1):
    """Write one row per (time, space) point: t, x, B_r, B_i, P, Q."""
    stride = max(1, int(stride))
    x = grid.x
    rows = []
    for n in range(0, grid.nt, stride):
        t = grid.t0 + n * grid.dt
        for j in range(grid.nx):
            rows.append((t, x[j], grid.B_r[n, j], grid.B_i[n, j], grid.P[n, j], grid.Q[n, j]))
    return write_table(path, GRID_COLUMNS, rows)
