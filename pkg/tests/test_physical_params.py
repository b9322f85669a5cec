import math

import numpy as np
import pytest

from oinlsim.grid_fields import make_grid
from oinlsim.physical_params import (HBAR, AtomSpecies, BeamConfig,
                                     ProtocolConfig, decoherence_budget,
                                     match_gaussian_to_trap, oinl_coefficient,
                                     optical_potential, rabi_field,
                                     scale_to_dimensionless,
                                     trap_frequency_from_doughnut)


@pytest.fixture(scope="module")
def si_grid():
    # 30 um box sampled around the beam axis, coordinates in meters
    return make_grid(256, 256, 30e-6, 30e-6)


def test_rubidium_couplings(species):
    assert species.kappa_s == pytest.approx(
        4 * np.pi * HBAR**2 * 5.4e-9 / 1.45e-25, rel=1e-12)
    assert species.kappa_a < 0


def test_species_invariants():
    with pytest.raises(ValueError):
        AtomSpecies(mass=-1, a_s=5e-9, a_a=0, wavelength0=780e-9, gamma=3.8e7)
    with pytest.raises(ValueError, match="a_s \\+ a_a"):
        AtomSpecies(mass=1e-25, a_s=1e-9, a_a=-2e-9, wavelength0=780e-9,
                    gamma=3.8e7)


def test_beam_invariants():
    with pytest.raises(ValueError, match="delta > 0"):
        BeamConfig("doughnut", 1e10, -1e15, 10e-6)
    with pytest.raises(ValueError, match="delta < 0"):
        BeamConfig("gaussian", 1e10, 1e15, 10e-6)
    with pytest.raises(ValueError, match="profile"):
        BeamConfig("bessel", 1e10, 1e15, 10e-6)
    with pytest.raises(ValueError, match="nonzero"):
        BeamConfig("doughnut", 1e10, 0.0, 10e-6)


def test_low_intensity_warning():
    beam = BeamConfig("gaussian", 1e14, -1e15, 10e-6)  # ratio 0.01
    with pytest.warns(UserWarning, match="low-intensity"):
        assert not beam.check_low_intensity(threshold=1e-3)
    quiet = BeamConfig("gaussian", 1e12, -1e15, 10e-6)
    assert quiet.check_low_intensity()


def test_protocol_invariants():
    with pytest.raises(ValueError):
        ProtocolConfig(n_atoms=0, l_z=20e-6, t_imprint=1e-5)
    with pytest.raises(ValueError):
        ProtocolConfig(n_atoms=1e5, l_z=20e-6, t_imprint=-1e-5)


# --- rabi_field -----------------------------------------------------------

def test_doughnut_node_on_axis(doughnut, si_grid):
    field = rabi_field(doughnut, si_grid)
    i0 = np.argmin(np.abs(si_grid.x))
    j0 = np.argmin(np.abs(si_grid.y))
    assert field[i0, j0] == 0


def test_gaussian_peak_on_axis(si_grid):
    beam = BeamConfig("gaussian", 2e10, -1e15, 10e-6)
    field = rabi_field(beam, si_grid)
    i0 = np.argmin(np.abs(si_grid.x))
    j0 = np.argmin(np.abs(si_grid.y))
    assert field[i0, j0] == pytest.approx(2e10, rel=1e-12)


def test_doughnut_intensity_max(doughnut, si_grid):
    # independent oracle: 1D maximization of r^2 exp(-2 r^2 / w^2)
    from scipy.optimize import minimize_scalar
    w = doughnut.waist
    opt = minimize_scalar(lambda r: -(r**2 / w**2) * np.exp(-2 * r**2 / w**2),
                          bounds=(0, 3 * w), method="bounded",
                          options={"xatol": 1e-13})
    r_star = opt.x
    assert r_star == pytest.approx(w / np.sqrt(2), rel=1e-6)
    peak_expected = -opt.fun * abs(doughnut.omega0)**2

    intensity = np.abs(rabi_field(doughnut, si_grid))**2
    # the grid max sits within one cell of the ring radius
    radius = np.sqrt(si_grid.r2_mesh())
    on_ring = np.abs(radius - r_star) < si_grid.dx
    assert intensity.max() == pytest.approx(peak_expected, rel=1e-3)
    assert intensity.max() == pytest.approx(intensity[on_ring].max(), rel=1e-12)
    assert peak_expected == pytest.approx(abs(doughnut.omega0)**2 * np.exp(-1) / 2,
                                          rel=1e-9)


# --- optical_potential ----------------------------------------------------

def test_potential_zero_field(si_grid):
    zero = np.zeros(si_grid.shape, dtype=complex)
    assert np.all(optical_potential(zero, 1e15) == 0)


def test_potential_requires_detuning(si_grid):
    with pytest.raises(ValueError):
        optical_potential(np.ones(si_grid.shape, dtype=complex), 0.0)


def test_matched_gaussian_center_offset(species, doughnut, si_grid):
    omega = trap_frequency_from_doughnut(doughnut, species.mass)
    beam, delta_v = match_gaussian_to_trap(omega, doughnut.waist, -1e12,
                                           species.mass)
    v = optical_potential(rabi_field(beam, si_grid), beam.delta)
    i0 = np.argmin(np.abs(si_grid.x))
    j0 = np.argmin(np.abs(si_grid.y))
    assert v[i0, j0] == pytest.approx(delta_v, rel=1e-12)
    assert delta_v < 0


def test_doughnut_harmonic_near_axis(species, doughnut, si_grid):
    # quadratic least-squares fit over r < w/10 reproduces M omega^2/2
    omega = trap_frequency_from_doughnut(doughnut, species.mass)
    v = optical_potential(rabi_field(doughnut, si_grid), doughnut.delta)
    r2 = si_grid.r2_mesh()
    mask = r2 < (doughnut.waist / 10)**2
    coeff = np.sum(v[mask] * r2[mask]) / np.sum(r2[mask]**2)
    assert coeff == pytest.approx(0.5 * species.mass * omega**2, rel=0.02)
    residual = np.linalg.norm(v[mask] - coeff * r2[mask])
    assert residual / np.linalg.norm(v[mask]) < 0.01


def test_matched_gaussian_curvature(species, doughnut, si_grid):
    omega = trap_frequency_from_doughnut(doughnut, species.mass)
    beam, delta_v = match_gaussian_to_trap(omega, doughnut.waist, -3e12,
                                           species.mass)
    v = optical_potential(rabi_field(beam, si_grid), beam.delta) - delta_v
    r2 = si_grid.r2_mesh()
    mask = r2 < (doughnut.waist / 10)**2
    coeff = np.sum(v[mask] * r2[mask]) / np.sum(r2[mask]**2)
    assert coeff == pytest.approx(0.5 * species.mass * omega**2, rel=0.02)
    residual = np.linalg.norm(v[mask] - coeff * r2[mask])
    assert residual / np.linalg.norm(v[mask]) < 0.01


# --- oinl_coefficient -----------------------------------------------------

def test_oinl_zero_field(species, si_grid):
    zero = np.zeros(si_grid.shape, dtype=complex)
    assert np.all(oinl_coefficient(zero, 1e12, species) == 0)


def test_oinl_scalar_value(species):
    # |Omega|^2/Delta^2 = 0.001 with rubidium parameters
    rabi = np.array([[math.sqrt(0.001) * 1e12 + 0j]])
    kappa = oinl_coefficient(rabi, 1e12, species)[0, 0]
    assert kappa == pytest.approx(-4.8171e-50, rel=1e-3)


def test_oinl_nonpositive_and_proportional(species, doughnut, si_grid):
    rabi = rabi_field(doughnut, si_grid)
    kappa = oinl_coefficient(rabi, doughnut.delta, species)
    assert kappa.max() <= 0
    intensity = np.abs(rabi)**2
    rng = np.random.default_rng(7)
    idx = rng.integers(0, si_grid.nx, size=50), rng.integers(0, si_grid.ny,
                                                             size=50)
    nonzero = intensity[idx] > 0
    ratios = kappa[idx][nonzero] / intensity[idx][nonzero]
    assert np.allclose(ratios, ratios[0], rtol=1e-12)


# --- trap frequency and matching ------------------------------------------

def test_trap_frequency_anchor(species, doughnut):
    omega = trap_frequency_from_doughnut(doughnut, species.mass)
    assert omega / (2 * np.pi) == pytest.approx(576.0, rel=0.01)


def test_trap_frequency_scalings(species, doughnut):
    omega = trap_frequency_from_doughnut(doughnut, species.mass)
    quad = BeamConfig("doughnut", 2 * abs(doughnut.omega0), doughnut.delta,
                      doughnut.waist)
    assert trap_frequency_from_doughnut(quad, species.mass) == \
        pytest.approx(2 * omega, rel=1e-12)
    wide = BeamConfig("doughnut", doughnut.omega0, doughnut.delta,
                      2 * doughnut.waist)
    assert trap_frequency_from_doughnut(wide, species.mass) == \
        pytest.approx(omega / 2, rel=1e-12)


def test_trap_frequency_rejects_gaussian(species):
    beam = BeamConfig("gaussian", 1e10, -1e15, 10e-6)
    with pytest.raises(ValueError):
        trap_frequency_from_doughnut(beam, species.mass)


def test_complex_rabi_amplitude_uses_modulus(species, doughnut):
    rotated = BeamConfig("doughnut", 3.15e10 * np.exp(0.8j), 1.1e15, 10e-6)
    assert trap_frequency_from_doughnut(rotated, species.mass) == \
        pytest.approx(trap_frequency_from_doughnut(doughnut, species.mass),
                      rel=1e-12)
    assert rotated.intensity_ratio == pytest.approx(doughnut.intensity_ratio,
                                                    rel=1e-12)


def test_derive_trap_bundle(species, doughnut):
    from oinlsim.physical_params import derive_trap
    trap = derive_trap(species, doughnut)
    assert trap.omega_perp / (2 * np.pi) == pytest.approx(576.0, rel=0.01)
    assert trap.delta_v == pytest.approx(-4.7564e-29, rel=1e-3)
    assert trap.mu is None


def test_delta_v_value_and_detuning_independence(species, doughnut):
    omega = trap_frequency_from_doughnut(doughnut, species.mass)
    expected = -species.mass * omega**2 * doughnut.waist**2 / 4
    for delta_g in (-1e12, -5e13):
        _, delta_v = match_gaussian_to_trap(omega, doughnut.waist, delta_g,
                                            species.mass)
        assert delta_v == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(-4.7564e-29, rel=1e-3)


def test_match_gaussian_zero_trap(species):
    beam, delta_v = match_gaussian_to_trap(0.0, 10e-6, -1e12, species.mass)
    assert abs(beam.omega0) == 0
    assert delta_v == 0


def test_match_gaussian_requires_negative_detuning(species):
    with pytest.raises(ValueError):
        match_gaussian_to_trap(3000.0, 10e-6, 1e12, species.mass)


def test_potential_difference_is_quartic(species, doughnut, scaled, grid256):
    # beyond the constant offset the matched potentials differ at O(r^4);
    # the density-weighted mismatch over the cloud stays below 2% of mu
    v_do = scaled.doughnut_potential(grid256)
    v_ga = scaled.gaussian_potential(grid256)
    deviation = np.abs(v_do - v_ga + scaled.delta_v_t)
    mu_t = np.sqrt(scaled.g_self * scaled.n_atoms / np.pi)
    r_tf = np.sqrt(2 * mu_t)
    r2 = grid256.r2_mesh()
    inside = r2 < r_tf**2
    # quartic scaling: deviation at R/2 is ~1/16 of the edge value
    near = r2 < (r_tf / 2)**2
    assert deviation[near].max() < 0.08 * deviation[inside].max()
    assert deviation[inside].max() < 0.05 * mu_t
    tf_density = np.maximum(0.0, mu_t - 0.5 * r2) / scaled.g_self
    weighted = np.sum(tf_density * deviation) / np.sum(tf_density)
    assert weighted < 0.02 * mu_t


# --- decoherence budget ---------------------------------------------------

def test_budget_reference_point(species):
    beam = BeamConfig("gaussian", math.sqrt(0.001) * 1e12, -1e12, 10e-6)
    budget = decoherence_budget(beam, 10e-6, species.gamma)
    assert budget.value == pytest.approx(0.38, rel=1e-9)
    assert not budget.flagged
    assert not budget.ratio_above_limit


def test_budget_zero_time(species):
    beam = BeamConfig("gaussian", 1e11, -1e12, 10e-6)
    assert decoherence_budget(beam, 0.0, species.gamma).value == 0


def test_budget_flags(species):
    hot = BeamConfig("gaussian", math.sqrt(0.002) * 1e12, -1e12, 10e-6)
    budget = decoherence_budget(hot, 10e-6, species.gamma)
    assert budget.flagged  # 0.76 > 0.5
    assert budget.ratio_above_limit  # 0.002 > 0.001


def test_budget_monotonicity(species):
    rng = np.random.default_rng(3)
    for _ in range(20):
        om = rng.uniform(1e9, 1e11)
        t = rng.uniform(1e-6, 1e-4)
        beam = BeamConfig("gaussian", om, -1e13, 10e-6)
        bigger_om = BeamConfig("gaussian", om * rng.uniform(1.01, 4), -1e13,
                               10e-6)
        base = decoherence_budget(beam, t, species.gamma).value
        assert decoherence_budget(bigger_om, t, species.gamma).value > base
        assert decoherence_budget(beam, t * 1.7, species.gamma).value > base


# --- scaling ---------------------------------------------------------------

def test_scaled_lengths(scaled):
    assert scaled.length_scale == pytest.approx(4.4809e-7, rel=1e-4)
    assert scaled.delta_v_t == pytest.approx(-scaled.waist_t**2 / 4, rel=1e-12)
    assert scaled.t_imprint_t == pytest.approx(0.036223, rel=1e-4)


def test_round_trip_identity(scaled):
    rng = np.random.default_rng(11)
    for x in rng.uniform(1e-9, 1e3, size=25):
        assert scaled.length_t(scaled.length_si(x)) == pytest.approx(x, rel=1e-12)
        assert scaled.time_t(scaled.time_si(x)) == pytest.approx(x, rel=1e-12)
        assert scaled.energy_t(scaled.energy_si(x)) == pytest.approx(x, rel=1e-12)


def test_coupling_convention_reproduces_tf_radius(scaled, species):
    # downstream consistency: the dimensionless coupling must reproduce the
    # SI Thomas-Fermi radius of analytics
    from oinlsim.analytics import tf_ground_state
    mu_t = np.sqrt(scaled.g_self * scaled.n_atoms / np.pi)
    r_tf_t = np.sqrt(2 * mu_t)
    tf = tf_ground_state(species, scaled.omega_perp, scaled.n_atoms,
                         scaled.protocol.l_z)
    assert r_tf_t * scaled.length_scale == pytest.approx(tf.r_tf, rel=1e-12)


def test_gaussian_beam_from_ratio(scaled):
    beam = scaled.gaussian_beam(0.001)
    assert beam.intensity_ratio == pytest.approx(0.001, rel=1e-12)
    assert beam.delta < 0
    # matching keeps |Omega0|^2/|Delta| fixed whatever the ratio
    other = scaled.gaussian_beam(0.0025)
    assert abs(beam.omega0)**2 / abs(beam.delta) == pytest.approx(
        abs(other.omega0)**2 / abs(other.delta), rel=1e-12)
