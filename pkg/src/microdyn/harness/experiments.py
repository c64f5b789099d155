"""Scenario runners: compute, then write a data table and a metadata file.

Data columns per scenario:

    homogeneous     b_e, delta_phi_em_plus, delta_phi_k_plus, delta_rho,
                    delta_u_plus, delta_u_minus, delta_phase_plus
    interferometer  b_e, delta_u_plus, delta_u_minus, delta_phase_plus,
                    delta_phase_minus, delta_phase_exact_plus, delta_phase_exact_minus
    stern-gerlach   index, branch, z_entry, z_detector, u_z_detector, escaped
    coupled         t, x, B_r, B_i, P, Q
    compare         scale_s, mean_deflection_md, mean_deflection_qm
"""
from __future__ import annotations

import copy
import math
import platform
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..core import Branch
from ..coupled import GRID_COLUMNS, evolve, initial_levels, residual, stability_limit
from ..homogeneous import fringe_shift, interact
from ..stern_gerlach import BeamSpec, run_beam
from ..tables import write_table
from .config import ExperimentConfig, config_sections, render_ini, validate
from .fitting import fit_line, fit_scaling

HEADERS = {
    "homogeneous": ("b_e", "delta_phi_em_plus", "delta_phi_k_plus", "delta_rho",
                    "delta_u_plus", "delta_u_minus", "delta_phase_plus"),
    "interferometer": ("b_e", "delta_u_plus", "delta_u_minus", "delta_phase_plus",
                       "delta_phase_minus", "delta_phase_exact_plus", "delta_phase_exact_minus"),
    "stern-gerlach": ("index", "branch", "z_entry", "z_detector", "u_z_detector", "escaped"),
    "coupled": GRID_COLUMNS,
    "compare": ("scale_s", "mean_deflection_md", "mean_deflection_qm"),
}


@dataclass
class RunResult:
    scenario: str
    data_path: Path
    metadata_path: Path
    summary: dict


def _homogeneous(cfg: ExperimentConfig):
    state, units = cfg.particle_state(), cfg.units
    rows = []
    for b in cfg.sweep.values:
        field = cfg.homogeneous_field(b)
        plus = interact(state, field, Branch.PLUS, units, cfg.numerics.resolution)
        minus = interact(state, field, Branch.MINUS, units, cfg.numerics.resolution)
        phase = fringe_shift(state, field, cfg.interferometer.path_length, Branch.PLUS)
        rows.append((b, plus.delta_phi_em, plus.delta_phi_k, plus.delta_rho,
                     plus.delta_u, minus.delta_u, phase.delta_phase))
    worst = max(abs(r[1] + r[2]) for r in rows)
    return rows, {"max_abs_energy_balance": worst, "points": len(rows)}


def _interferometer(cfg: ExperimentConfig):
    state = cfg.particle_state()
    rows = []
    for b in cfg.sweep.values:
        field = cfg.homogeneous_field(b)
        p = fringe_shift(state, field, cfg.interferometer.path_length, Branch.PLUS)
        m = fringe_shift(state, field, cfg.interferometer.path_length, Branch.MINUS)
        rows.append((b, p.delta_u, m.delta_u, p.delta_phase, m.delta_phase,
                     p.delta_phase_exact, m.delta_phase_exact))
    summary = {"points": len(rows)}
    if len(rows) >= 2 and len({r[0] for r in rows}) >= 2:
        slope, intercept, r2 = fit_line([r[0] for r in rows], [r[3] for r in rows])
        summary.update(phase_slope=slope, phase_intercept=intercept, phase_r_squared=r2,
                       expected_slope=-state.omega0 * cfg.interferometer.path_length
                       / (state.u0**2 * math.sqrt(state.rho0)))
    return rows, summary


def _stern_gerlach(cfg: ExperimentConfig):
    beam = BeamSpec(cfg.beam.n_particles, cfg.particle_state(), cfg.beam.policy,
                    cfg.numerics.seed, cfg.geometry.z_entry, cfg.beam.z_spread)
    result = run_beam(beam, cfg.magnet(), cfg.beam.force_law, cfg.numerics.dt, cfg.units)
    rows = [(h.index, h.branch.sign, h.z_entry, h.z, h.u_z, h.escaped) for h in result.hits]
    summary = {
        "count_plus": result.counts["+"], "count_minus": result.counts["-"],
        "mean_z_plus": result.mean_z["+"], "mean_z_minus": result.mean_z["-"],
        "mean_deflection_plus": result.mean_deflection["+"],
        "mean_deflection_minus": result.mean_deflection["-"],
        "separation": result.separation, "escaped": result.n_escaped,
    }
    return rows, summary


def _coupled(cfg: ExperimentConfig):
    c, units = cfg.coupled, cfg.units
    k = c.wavenumber
    length = c.periods * 2.0 * math.pi / k
    x = length * np.arange(c.nx) / c.nx
    dx = x[1] - x[0]
    B_r = c.br_mean + c.br_amp * np.sin(k * x)
    B_i = c.bi_amp * np.cos(k * x)
    steps = max(2, math.ceil(c.t_end / stability_limit(dx, units, c.safety)))
    dt = c.t_end / steps
    P_levels, Q_levels = initial_levels(B_r, B_i, x, dt, units, bc=c.bc)
    grid = evolve(B_r, B_i, P_levels, Q_levels, x, dt, steps, units, bc=c.bc, safety=c.safety)

    rows = []
    for n in range(0, grid.nt, c.output_stride):
        t = n * dt
        for j in range(grid.nx):
            rows.append((t, x[j], grid.B_r[n, j], grid.B_i[n, j], grid.P[n, j], grid.Q[n, j]))
    norms = residual(grid).norms
    summary = {"steps": steps, "dt": dt, "dx": dx, **{f"residual_{k_}": v for k_, v in norms.items()}}
    if c.bc == "periodic":
        m, a, b = c.br_mean, c.br_amp, c.bi_amp
        lap_s = -2 * m * a * k * k * np.sin(k * x) + 2 * k * k * (a * a + b * b) * np.cos(2 * k * x)
        lap_c = -m * b * k * k * np.cos(k * x) - 2 * a * b * k * k * np.sin(2 * k * x)
        scale = -0.5 * units.coupling * c.t_end**2 / 2
        summary["oracle_error_P"] = float(np.max(np.abs(grid.P[-1] - scale * lap_s)))
        summary["oracle_error_Q"] = float(np.max(np.abs(grid.Q[-1] - scale * lap_c)))
    return rows, summary


def compare_deflections(cfg: ExperimentConfig, scales):
    """Mean plus-branch detector deflection under both force laws, per scale."""
    state, units = cfg.particle_state(), cfg.units
    base = cfg.inhomogeneous_field()
    out = []
    for s in scales:
        geometry = cfg.magnet(base.scaled(s))
        beam = BeamSpec(cfg.beam.n_particles, state, "fixed+", cfg.numerics.seed,
                        cfg.geometry.z_entry, cfg.beam.z_spread)
        md = run_beam(beam, geometry, "md", cfg.numerics.dt, units)
        qm = run_beam(beam, geometry, "qm", cfg.numerics.dt, units)
        out.append((s, md.mean_deflection["+"], qm.mean_deflection["+"]))
    return out


def _compare(cfg: ExperimentConfig):
    rows = compare_deflections(cfg, cfg.sweep.values)
    summary = {"points": len(rows)}
    if len(rows) >= 3:
        md = fit_scaling([(r[0], r[1]) for r in rows])
        qm = fit_scaling([(r[0], r[2]) for r in rows])
        summary.update(exponent_md=md.exponent, r_squared_md=md.r_squared,
                       exponent_qm=qm.exponent, r_squared_qm=qm.r_squared,
                       exponent_gap=md.exponent - qm.exponent)
    return rows, summary


RUNNERS = {
    "homogeneous": _homogeneous,
    "interferometer": _interferometer,
    "stern-gerlach": _stern_gerlach,
    "coupled": _coupled,
    "compare": _compare,
}


def _text(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_experiment(cfg: ExperimentConfig, out_dir=None, seed=None) -> RunResult:
    """Run one scenario and write ``<scenario>.csv`` plus ``<scenario>.meta.ini``.

    Computation finishes before anything is written.
    """
    cfg = copy.deepcopy(cfg)
    if seed is not None:
        cfg.numerics.seed = int(seed)
    if out_dir is not None:
        cfg.output.path = str(out_dir)
    validate(cfg)

    start = time.perf_counter()
    rows, summary = RUNNERS[cfg.scenario](cfg)
    wall = time.perf_counter() - start

    out = Path(cfg.output.path)
    out.mkdir(parents=True, exist_ok=True)
    data_path = out / f"{cfg.scenario}.csv"
    meta_path = out / f"{cfg.scenario}.meta.ini"
    write_table(data_path, HEADERS[cfg.scenario], rows)

    sections = config_sections(cfg)
    sections["run"] = {
        "scenario": cfg.scenario,
        "seed": str(cfg.numerics.seed),
        "data_file": data_path.name,
        "package_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "wall_time_s": repr(wall),
    }
    sections["summary"] = {k: _text(v) for k, v in summary.items()}
    meta_path.write_text(render_ini(sections))
    return RunResult(cfg.scenario, data_path, meta_path, summary)
