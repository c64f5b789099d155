"""Field-theoretic model of magnetic interactions of neutral massive particles.

Submodules:

- ``core``: domain types, units, intrinsic plane-wave fields, energy density
- ``homogeneous``: ramped uniform field, energy redistribution, phase shifts
- ``stern_gerlach``: forces in inhomogeneous fields and beam trajectories
- ``coupled``: the nonlinear real/imaginary field system on a 1-D grid
- ``harness``: configuration files, batch experiments, scaling fits, CLI
"""

__version__ = "0.1.0"

from .core import (
    NATURAL,
    Branch,
    CoupledFieldGrid,
    HomogeneousField,
    InhomogeneousField,
    InteractionResult,
    ParticleState,
    Trajectory,
    UnitsLedger,
    affine_field,
    constant_product_field,
    energy_density,
    intrinsic_fields_at,
    make_particle,
    quadratic_field,
)
from .errors import (
    ConfigError,
    DimensionError,
    DivergenceError,
    DomainError,
    EscapeError,
    MicrodynError,
    RangeError,
    SolverError,
    StabilityError,
)
from .homogeneous import fringe_shift, interact
from .stern_gerlach import BeamSpec, MagnetGeometry, integrate_trajectory, run_beam
from .coupled import evolve, initial_levels, residual, verify_degenerate_cases
