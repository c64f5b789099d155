import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microdyn.core import (Branch, UnitsLedger, affine_field, constant_product_field, make_particle,
                           quadratic_field)
from microdyn.errors import DomainError, EscapeError, RangeError
from microdyn.stern_gerlach import (
    BeamSpec,
    MagnetGeometry,
    branch_kinetic_density_change_z,
    force_md,
    force_qm_baseline,
    integrate_trajectory,
    kinetic_density_change_z,
    run_beam,
)

from conftest import positive

branches = st.sampled_from([Branch.PLUS, Branch.MINUS])


def test_kinetic_density_change_examples():
    assert kinetic_density_change_z(affine_field(0.0, 0.0), 0.0) == 0.0
    assert kinetic_density_change_z(affine_field(2.0, 0.0), 0.3) == 2.0
    assert kinetic_density_change_z(affine_field(1.0, 1.0, (-5, 5)), 3.0) == 8.0
    with pytest.raises(RangeError):
        kinetic_density_change_z(affine_field(1.0, 0.0), 2.0)


def test_force_examples():
    f = affine_field(1.0, 2.0, (-1, 1))
    assert force_md(f, 0.0, Branch.PLUS) == 2.0
    assert force_qm_baseline(f, 0.0, Branch.PLUS) == 1.0
    g = affine_field(2.0, 0.5, (-1, 1))
    assert force_md(g, 0.0, Branch.MINUS) == -1.0
    assert force_qm_baseline(g, 0.0, Branch.MINUS) == -0.25
    h = affine_field(1.0, 1.0, (-1, 1))
    assert force_qm_baseline(h, 0.0, Branch.PLUS) == 0.5
    assert force_md(affine_field(3.0, 0.0), 0.2, Branch.PLUS) == 0.0


def test_force_uses_units():
    f = affine_field(1.0, 2.0)
    assert force_md(f, 0.0, Branch.PLUS, UnitsLedger(2.0, 3.0)) == 36.0
    assert force_qm_baseline(f, 0.0, Branch.PLUS, UnitsLedger(2.0, 3.0)) == 2.0


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-0.9, 0.9), branches, positive)
def test_forces_are_odd_in_branch(b0, g, z, branch, hbar):
    f = affine_field(b0, g)
    units = UnitsLedger(hbar, 1.0)
    assert force_md(f, z, branch, units) == -force_md(f, z, branch.opposite, units)
    assert force_qm_baseline(f, z, branch, units) == -force_qm_baseline(f, z, branch.opposite, units)


@given(st.floats(0.1, 2), st.floats(-1, 1), st.floats(0.1, 10), st.floats(-0.9, 0.9))
def test_amplitude_scaling_quadratic_vs_linear(b0, g, s, z):
    f = affine_field(b0, g)
    fs = f.scaled(s)
    md, mds = force_md(f, z, Branch.PLUS), force_md(fs, z, Branch.PLUS)
    qm, qms = force_qm_baseline(f, z, Branch.PLUS), force_qm_baseline(fs, z, Branch.PLUS)
    assert mds == pytest.approx(s * s * md, rel=1e-12, abs=1e-300)
    assert qms == pytest.approx(s * qm, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("branch", [Branch.PLUS, Branch.MINUS])
def test_force_is_minus_gradient_of_branch_kinetic_change(branch):
    f = quadratic_field(1.0, 0.4, 0.7)
    z = 0.31
    errs = []
    for h in (0.02, 0.01, 0.005, 0.0025):
        fd = -(branch_kinetic_density_change_z(f, z + h, branch)
               - branch_kinetic_density_change_z(f, z - h, branch)) / (2 * h)
        errs.append(abs(fd - force_md(f, z, branch)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 2) < 0.05), orders
    assert errs[-1] < 1e-5


def _geometry(field, length=1.0, drift=0.0):
    return MagnetGeometry(length, drift, field)


@pytest.mark.parametrize("law, field", [
    ("md", constant_product_field(1.0, 0.2)),
    ("qm", affine_field(1.0, 0.3)),
])
@pytest.mark.parametrize("branch", [Branch.PLUS, Branch.MINUS])
def test_constant_force_parabola(law, field, branch):
    state = make_particle(1.5, 2.0, 1.0, 1.0)
    geo = _geometry(field, 1.2, 0.8)
    force = {"md": force_md, "qm": force_qm_baseline}[law](field, 0.0, branch)
    a = force / state.rho0
    T, Td = geo.length_x / state.u0, geo.drift_x / state.u0
    traj = integrate_trajectory(state, geo, branch, law, dt=0.01)
    exit_row = traj.samples[-2]
    assert exit_row[2] == pytest.approx(0.5 * a * T * T, rel=1e-10)
    assert exit_row[4] == pytest.approx(a * T, rel=1e-10)
    assert traj.final[2] == pytest.approx(0.5 * a * T * T + a * T * Td, rel=1e-10)
    np.testing.assert_array_equal(traj.u_x, state.u0)


def _linear_profile_exact(branch, z0, a, rho0, t):
    # z'' = sign a^2 z / rho0
    k = a / math.sqrt(rho0)
    if branch is Branch.PLUS:
        return z0 * math.cosh(k * t), z0 * k * math.sinh(k * t)
    return z0 * math.cos(k * t), -z0 * k * math.sin(k * t)


@pytest.mark.parametrize("branch", [Branch.PLUS, Branch.MINUS])
def test_linear_profile_matches_refined_reference_and_closed_form(branch):
    state = make_particle(1.0, 1.0, 1.0, 1.0)
    geo = _geometry(affine_field(0.0, 0.8, (-2, 2)), 1.0)
    coarse = integrate_trajectory(state, geo, branch, "md", dt=1e-2, z_entry=0.3).final
    fine = integrate_trajectory(state, geo, branch, "md", dt=1e-3, z_entry=0.3).final
    assert coarse[2] == pytest.approx(fine[2], rel=1e-8)
    z, w = _linear_profile_exact(branch, 0.3, 0.8, 1.0, 1.0)
    assert fine[2] == pytest.approx(z, rel=1e-12)
    assert fine[4] == pytest.approx(w, rel=1e-11)


def test_rk4_fourth_order_on_affine_profile():
    # z'' = (g/rho0)(b0 + g z) with z(0) = 0 gives z = (b0/g)(cosh(k t) - 1)
    state = make_particle(1.0, 1.0, 1.0, 1.0)
    b0, g = 1.0, 0.3
    geo = _geometry(affine_field(b0, g), 1.0)
    exact = b0 / g * (math.cosh(g) - 1)
    errs = [abs(integrate_trajectory(state, geo, Branch.PLUS, dt=1.0 / n).final[2] - exact)
            for n in (8, 16, 32, 64)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 3.9), orders


def test_step_is_never_larger_than_requested():
    state = make_particle(1.0, 3.0, 1.0, 1.0)
    traj = integrate_trajectory(state, _geometry(affine_field(1.0, 0.1), 1.0), Branch.PLUS, dt=0.07)
    assert traj.metadata["step"] <= 0.07
    assert traj.metadata["steps_in_magnet"] == math.ceil((1 / 3) / 0.07)


def test_zero_field_beam_goes_straight():
    state = make_particle(1.0, 1.0, 1.0, 1.0)
    beam = BeamSpec(20, state, "phase", seed=3)
    result = run_beam(beam, _geometry(affine_field(0.0, 0.0), 1.0, 1.0))
    assert all(h.z == 0.0 and h.u_z == 0.0 for h in result.hits)
    assert result.separation == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_phase_policy_counts_are_binomial(seed):
    beam = BeamSpec(1000, make_particle(1, 1, 1, 1), "phase", seed=seed)
    plus = sum(b is Branch.PLUS for b, _ in beam.draw())
    assert abs(plus - 500) <= 3 * math.sqrt(1000 * 0.25)


def test_paired_fixed_branch_runs_are_mirror_images():
    state = make_particle(1.0, 1.0, 1.0, 1.0)
    geo = _geometry(constant_product_field(1.0, 0.15), 1.0, 1.0)
    plus = run_beam(BeamSpec(10, state, "fixed+", z_entry=0.0), geo)
    minus = run_beam(BeamSpec(10, state, "fixed-", z_entry=0.0), geo)
    dp, dm = plus.mean_deflection["+"], minus.mean_deflection["-"]
    assert dp > 0
    assert abs(dp + dm) <= 1e-9 * abs(dp)
    assert math.isnan(plus.separation)


def test_phase_beam_separates_into_two_spots():
    state = make_particle(1.0, 1.0, 1.0, 1.0)
    geo = _geometry(constant_product_field(1.0, 0.15), 1.0, 1.0)
    result = run_beam(BeamSpec(200, state, "phase", seed=7), geo)
    assert result.counts["+"] + result.counts["-"] == 200
    assert result.separation == pytest.approx(2 * result.mean_deflection["+"], rel=1e-12)
    assert result.metadata["unique_trajectories"] == 2


def test_run_beam_is_deterministic():
    state = make_particle(1.0, 1.0, 1.0, 1.0)
    geo = _geometry(affine_field(1.0, 0.2), 1.0, 0.5)
    beam = BeamSpec(100, state, "phase", seed=42, z_spread=0.05)
    a, b = run_beam(beam, geo), run_beam(beam, geo)
    assert [(h.branch, h.z, h.u_z) for h in a.hits] == [(h.branch, h.z, h.u_z) for h in b.hits]


def test_escape_is_reported():
    state = make_particle(1.0, 0.5, 1.0, 1.0)
    geo = _geometry(affine_field(1.0, 2.0, (-0.1, 0.1)), 2.0)
    with pytest.raises(EscapeError) as info:
        integrate_trajectory(state, geo, Branch.PLUS)
    last = info.value.last_sample
    assert -0.1 <= last[2] <= 0.1
    result = run_beam(BeamSpec(5, state, "fixed+"), geo)
    assert result.n_escaped == 5
    assert math.isnan(result.mean_z["+"])


def test_input_validation():
    state = make_particle(1, 1, 1, 1)
    with pytest.raises(DomainError):
        MagnetGeometry(0.0, 1.0, affine_field(1, 0))
    with pytest.raises(DomainError):
        MagnetGeometry(1.0, -1.0, affine_field(1, 0))
    with pytest.raises(DomainError):
        BeamSpec(0, state)
    with pytest.raises(DomainError):
        BeamSpec(1, state, "random")
    with pytest.raises(DomainError):
        integrate_trajectory(state, _geometry(affine_field(1, 0)), Branch.PLUS, "classical")
    with pytest.raises(DomainError):
        integrate_trajectory(state, _geometry(affine_field(1, 0)), Branch.PLUS, dt=0.0)
    with pytest.raises(RangeError):
        integrate_trajectory(state, _geometry(affine_field(1, 0)), Branch.PLUS, z_entry=3.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.3), st.floats(0.5, 2.0), branches)
def test_deflection_sign_follows_branch_for_constant_product(product, rho0, branch):
    state = make_particle(rho0, 1.0, 1.0, 1.0)
    geo = _geometry(constant_product_field(1.0, product), 1.0)
    z = integrate_trajectory(state, geo, branch, dt=0.05).final[2]
    assert math.copysign(1, z) == branch.sign
    assert z == pytest.approx(branch.sign * 0.5 * product / rho0, rel=1e-12)
