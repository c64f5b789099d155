"""Observed convergence orders for the three discretized solvers.

    python3 scripts/convergence_study.py [--levels N]

Prints error and order per refinement level for the density integrator
(manufactured source), the coupled residual (manufactured solution) and
the coupled time stepper (time-dependent forcing with a closed form).
"""
import argparse
import math

import numpy as np

from microdyn.core import HomogeneousField, make_particle
from microdyn.coupled import evolve, initial_levels, manufactured_grid, residual
from microdyn.homogeneous import delta_rho_numeric


def density_error(n):
    state = make_particle(1.0, 1.3, 1.0, 1.0)
    field = HomogeneousField(1.0, 0.0, 1.2)
    exact = math.sin(state.u0 * field.tau) * (1 - math.cos(field.tau))
    return abs(delta_rho_numeric(state, field, n, lambda x, t: np.sin(x) * np.cos(t)) - exact)


def residual_error(n):
    dx = 2 * math.pi / n
    norms = residual(manufactured_grid(n, 24, dx, dx / 2)).norms
    return max(norms["real_max"], norms["imag_max"])


def evolution_error(n):
    x = 2 * math.pi * np.arange(n) / n
    steps = n // 4
    dt = 1.0 / steps

    def b_r(x, t):
        return np.sqrt(2 + np.cos(x) * np.cos(t))

    P, Q = initial_levels(b_r, np.zeros(n), x, dt)
    grid = evolve(b_r, np.zeros(n), P, Q, x, dt, steps)
    return float(np.max(np.abs(grid.P[-1] - 0.5 * np.cos(x) * (1 - math.cos(1.0)))))


STUDIES = {
    "density integrator": density_error,
    "coupled residual": residual_error,
    "coupled evolution": evolution_error,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--levels", type=int, default=5, help="refinement levels from n = 32")
    args = parser.parse_args()
    sizes = [32 * 2**i for i in range(args.levels)]
    for name, fn in STUDIES.items():
        print(f"\n{name}")
        print(f"{'n':>6}  {'error':>12}  order")
        previous = None
        for n in sizes:
            err = fn(n)
            order = "" if previous is None else f"{math.log2(previous / err):.3f}"
            print(f"{n:>6}  {err:12.4e}  {order}")
            previous = err


if __name__ == "__main__":
    main()
