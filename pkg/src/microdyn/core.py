"""Domain types, units bookkeeping and intrinsic plane-wave fields.

A particle carries transverse intrinsic fields travelling with it along x:
E along y, B along z, both oscillating as cos(k0 x - omega0 t + phase0).
All quantities are in consistent natural units; the default ledger sets
hbar = c = 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import DomainError, RangeError

__all__ = [
    "UnitsLedger",
    "NATURAL",
    "SI_HBAR",
    "ParticleState",
    "make_particle",
    "Branch",
    "HomogeneousField",
    "InhomogeneousField",
    "ExternalField",
    "affine_field",
    "quadratic_field",
    "constant_product_field",
    "InteractionResult",
    "Trajectory",
    "CoupledFieldGrid",
    "intrinsic_fields_at",
    "energy_density",
]

TWO_PI = 2.0 * math.pi
SI_HBAR = 1.054e-34


@dataclass(frozen=True)
class UnitsLedger:
    """Scale factors linking field energy density to mechanics.

    With ``hbar = c = 1`` every scaled operation reduces to its bare form.
    """

    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}", name)

    @property
    def coupling(self) -> float:
        """hbar * c**2, the factor multiplying squared-field energy terms."""
        return self.hbar * self.c**2


NATURAL = UnitsLedger()


@dataclass(frozen=True)
class ParticleState:
    """Intrinsic state of one extended particle.

    ``E0`` and ``omega0`` are derived, so they can never disagree with
    ``u0``, ``B0`` and ``k0``.
    """

    rho0: float
    u0: float
    k0: float
    B0: float
    phase0: float = 0.0

    @property
    def E0(self) -> float:
        return self.u0 * self.B0

    @property
    def omega0(self) -> float:
        return self.u0 * self.k0

    def phase(self, x, t):
        return self.k0 * x - self.omega0 * t + self.phase0


def make_particle(rho0, u0, k0, B0, phase0=0.0) -> ParticleState:
    checks = (("rho0", rho0, True), ("u0", u0, True), ("k0", k0, True), ("B0", B0, False))
    for name, value, strict in checks:
        value = float(value)
        bad = not math.isfinite(value) or (value <= 0 if strict else value < 0)
        if bad:
            bound = "> 0" if strict else ">= 0"
            raise DomainError(f"{name} must be {bound}, got {value!r}", name)
    if not math.isfinite(phase0):
        raise DomainError(f"phase0 must be finite, got {phase0!r}", "phase0")
    return ParticleState(
        rho0=float(rho0), u0=float(u0), k0=float(k0), B0=float(B0),
        phase0=float(phase0) % TWO_PI,
    )


class Branch(enum.IntEnum):
    """Selects one of the two symmetric degenerate solutions.

    PLUS is the real-part solution, MINUS the imaginary-part one.
    """

    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return int(self)

    @property
    def opposite(self) -> "Branch":
        return Branch(-int(self))

    @property
    def symbol(self) -> str:
        return "+" if self is Branch.PLUS else "-"

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, Branch):
            return value
        text = str(value).strip().lower()
        if text in ("+", "+1", "1", "plus"):
            return cls.PLUS
        if text in ("-", "-1", "minus"):
            return cls.MINUS
        raise DomainError(f"unknown branch {value!r}", "branch")


def _check_tau(tau):
    if not (math.isfinite(tau) and tau > 0):
        raise DomainError(f"tau must be > 0, got {tau!r}", "tau")


@dataclass(frozen=True)
class HomogeneousField:
    """Uniform external field switched on linearly over ``tau``.

    The field vector is (0, -sin(theta), cos(theta)) * b_ext.
    """

    b_ext: float
    theta: float = 0.0
    tau: float = 1.0

    def __post_init__(self):
        _check_tau(self.tau)
        if not (math.isfinite(self.b_ext) and self.b_ext >= 0):
            raise DomainError(f"b_ext must be >= 0, got {self.b_ext!r}", "b_ext")

    @property
    def vector(self) -> np.ndarray:
        return self.b_ext * np.array([0.0, -math.sin(self.theta), math.cos(self.theta)])


@dataclass(frozen=True)
class InhomogeneousField:
    """Static field magnitude B_E(z) with its gradient, valid on ``z_range``.

    ``description`` is a plain dict identifying the profile family and its
    parameters; it is what gets written to run metadata.
    """

    profile: Callable
    gradient: Callable
    tau: float = 1.0
    z_range: tuple = (-1.0, 1.0)
    description: dict = field(default_factory=dict, compare=False)
    check_gradient: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        _check_tau(self.tau)
        z_min, z_max = self.z_range
        if not (z_min < z_max):
            raise DomainError(f"z_range must be increasing, got {self.z_range!r}", "z_range")
        object.__setattr__(self, "z_range", (float(z_min), float(z_max)))
        if self.check_gradient:
            self._verify_gradient()

    def _verify_gradient(self, rtol=1e-6, samples=201):
        z_min, z_max = self.z_range
        width = z_max - z_min
        h = 1e-5 * width
        z = np.linspace(z_min + h, z_max - h, samples)
        b = np.asarray(self.profile(z), dtype=float) * np.ones_like(z)
        g = np.asarray(self.gradient(z), dtype=float) * np.ones_like(z)
        fd = (np.asarray(self.profile(z + h)) - np.asarray(self.profile(z - h))) / (2 * h)
        scale = max(np.max(np.abs(g)), np.max(np.abs(b)) / width, np.finfo(float).tiny)
        err = np.abs(fd - g)
        if np.any(err > rtol * scale):
            worst = int(np.argmax(err))
            raise DomainError(
                f"gradient does not match profile derivative at z={z[worst]:.6g}: "
                f"finite difference {fd[worst]:.10g} vs gradient {g[worst]:.10g}",
                "gradient",
            )

    def contains(self, z) -> bool:
        return self.z_range[0] <= z <= self.z_range[1]

    def require(self, z):
        if not self.contains(z):
            raise RangeError(f"z={z!r} outside field range {self.z_range}", "z")

    def scaled(self, s: float) -> "InhomogeneousField":
        """Return the field with the whole profile multiplied by ``s``."""
        profile, gradient = self.profile, self.gradient
        desc = dict(self.description)
        desc["scale"] = desc.get("scale", 1.0) * s
        return InhomogeneousField(
            profile=lambda z: s * profile(z),
            gradient=lambda z: s * gradient(z),
            tau=self.tau,
            z_range=self.z_range,
            description=desc,
            check_gradient=False,
        )


ExternalField = Union[HomogeneousField, InhomogeneousField]


def affine_field(b0, gradient, z_range=(-1.0, 1.0), tau=1.0) -> InhomogeneousField:
    """B_E(z) = b0 + gradient * z."""
    return InhomogeneousField(
        profile=lambda z: b0 + gradient * z,
        gradient=lambda z: gradient + 0.0 * z,
        tau=tau,
        z_range=z_range,
        description={"profile": "affine", "b0": b0, "gradient": gradient},
    )


def quadratic_field(b0, gradient, curvature, z_range=(-1.0, 1.0), tau=1.0) -> InhomogeneousField:
    """B_E(z) = b0 + gradient * z + curvature * z**2."""
    return InhomogeneousField(
        profile=lambda z: b0 + gradient * z + curvature * z * z,
        gradient=lambda z: gradient + 2.0 * curvature * z,
        tau=tau,
        z_range=z_range,
        description={"profile": "quadratic", "b0": b0, "gradient": gradient,
                     "curvature": curvature},
    )


def constant_product_field(b0, product, z_range=(-1.0, 1.0), tau=1.0) -> InhomogeneousField:
    """B_E(z) = sqrt(b0**2 + 2 * product * z), so B_E * dB_E/dz == product.

    Requires b0**2 + 2 * product * z > 0 over the whole range.
    """
    if min(b0 * b0 + 2 * product * z for z in z_range) <= 0:
        raise DomainError("profile becomes imaginary inside z_range", "z_range")
    return InhomogeneousField(
        profile=lambda z: np.sqrt(b0 * b0 + 2.0 * product * z),
        gradient=lambda z: product / np.sqrt(b0 * b0 + 2.0 * product * z),
        tau=tau,
        z_range=z_range,
        description={"profile": "constant_product", "b0": b0, "product": product},
    )


@dataclass(frozen=True)
class InteractionResult:
    """Branch-resolved changes produced by a homogeneous-field interaction."""

    delta_phi_em: float
    delta_phi_k: float
    delta_rho: float
    delta_u: float
    branch: Branch

    @property
    def delta_phi_total(self) -> float:
        return self.delta_phi_em + self.delta_phi_k


@dataclass
class Trajectory:
    """Samples of (t, x, z, u_x, u_z), one row per time level."""

    samples: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float).reshape(-1, 5)
        if len(self.samples) > 1 and np.any(np.diff(self.samples[:, 0]) <= 0):
            raise DomainError("trajectory times must be strictly increasing", "samples")

    t = property(lambda self: self.samples[:, 0])
    x = property(lambda self: self.samples[:, 1])
    z = property(lambda self: self.samples[:, 2])
    u_x = property(lambda self: self.samples[:, 3])
    u_z = property(lambda self: self.samples[:, 4])

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1]


@dataclass
class CoupledFieldGrid:
    """Space-time grid for the coupled field/mass-amplitude system.

    Arrays are indexed (time, space).  The mass amplitude enters the field
    equations only through P = psi_r**2 - psi_i**2 and Q = psi_r * psi_i,
    so those are what the grid stores; the individual components are kept
    when the grid was built from them.
    """

    dx: float
    dt: float
    B_r: np.ndarray
    B_i: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    units: UnitsLedger = NATURAL
    x0: float = 0.0
    t0: float = 0.0
    psi_r: Optional[np.ndarray] = None
    psi_i: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (self.dx > 0):
            raise DomainError(f"dx must be > 0, got {self.dx!r}", "dx")
        if not (self.dt > 0):
            raise DomainError(f"dt must be > 0, got {self.dt!r}", "dt")
        arrays = [np.asarray(a, dtype=float) for a in (self.B_r, self.B_i, self.P, self.Q)]
        shape = arrays[0].shape
        if len(shape) != 2 or any(a.shape != shape for a in arrays):
            raise DomainError("B_r, B_i, P, Q must be 2-D arrays of equal shape", "shape")
        self.B_r, self.B_i, self.P, self.Q = arrays

    @classmethod
    def from_components(cls, B_r, B_i, psi_r, psi_i, dx, dt, units=NATURAL, x0=0.0, t0=0.0):
        psi_r = np.asarray(psi_r, dtype=float)
        psi_i = np.asarray(psi_i, dtype=float)
        return cls(dx=dx, dt=dt, B_r=B_r, B_i=B_i, P=psi_r**2 - psi_i**2, Q=psi_r * psi_i,
                   units=units, x0=x0, t0=t0, psi_r=psi_r, psi_i=psi_i)

    @property
    def nt(self) -> int:
        return self.B_r.shape[0]

    @property
    def nx(self) -> int:
        return self.B_r.shape[1]

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nt)

    def relabeled(self) -> "CoupledFieldGrid":
        """Swap real and imaginary labels of both B and psi."""
        swap = None
        if self.psi_r is not None and self.psi_i is not None:
            swap = (self.psi_i, self.psi_r)
        return CoupledFieldGrid(
            dx=self.dx, dt=self.dt, B_r=self.B_i, B_i=self.B_r, P=-self.P, Q=self.Q,
            units=self.units, x0=self.x0, t0=self.t0,
            psi_r=swap[0] if swap else None, psi_i=swap[1] if swap else None,
        )

    def scaled(self, alpha: float) -> "CoupledFieldGrid":
        """Multiply every component (B and psi) by ``alpha``."""
        a2 = alpha * alpha
        return CoupledFieldGrid(
            dx=self.dx, dt=self.dt, B_r=alpha * self.B_r, B_i=alpha * self.B_i,
            P=a2 * self.P, Q=a2 * self.Q, units=self.units, x0=self.x0, t0=self.t0,
            psi_r=None if self.psi_r is None else alpha * self.psi_r,
            psi_i=None if self.psi_i is None else alpha * self.psi_i,
        )


def intrinsic_fields_at(state: ParticleState, x, t):
    """Physical (real-part) intrinsic fields at (x, t).

    Returns ``(E, B)`` with E along y and B along z.  Array-valued x or t
    broadcast; the vector axis is then the last one.
    """
    c = np.cos(state.phase(np.asarray(x, dtype=float), np.asarray(t, dtype=float)))
    zero = np.zeros_like(c)
    E = np.stack([zero, state.E0 * c, zero], axis=-1)
    B = np.stack([zero, zero, state.B0 * c], axis=-1)
    return E, B


def energy_density(E, B, units: UnitsLedger = NATURAL, mode: str = "natural", u=None):
    """Field energy density.

    ``mode="natural"``: (hbar/2) * (E**2 + c**2 B**2).
    ``mode="intrinsic"``: (1/2) * (E**2 / u**2 + B**2), which needs the
    particle speed ``u``; ``units`` is ignored in this mode.
    """
    E2 = np.sum(np.square(np.asarray(E, dtype=float)), axis=-1)
    B2 = np.sum(np.square(np.asarray(B, dtype=float)), axis=-1)
    if mode == "natural":
        out = 0.5 * units.hbar * (E2 + units.c**2 * B2)
    elif mode == "intrinsic":
        if u is None or not u > 0:
            raise DomainError("intrinsic mode needs a positive speed u", "u")
        out = 0.5 * (E2 / (u * u) + B2)
    else:
        raise DomainError(f"unknown energy density mode {mode!r}", "mode")
    return float(out) if np.ndim(out) == 0 else out
