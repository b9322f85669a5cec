"""The three-step measurement protocol: pi/2 pulse, phase imprint, pi/2 pulse.

Three fidelity modes produce the trapped-atom signal N_minus:

    tf_analytic           closed form over the Thomas-Fermi profile
    integral_exact_ground relaxed ground state + frozen-phase quadrature
    full_numeric          relaxed ground state + full two-component
                          propagation between the pulses

The pulses are instantaneous unitaries (the transfer is assumed near
perfect); the pulse duration in the protocol config is bookkeeping only.
During the full-numeric imprint the - component keeps the exact doughnut
potential with its light-induced coupling set to zero (the cloud sits on
the beam node, where the coupling is negligible), while the + component
feels the exact matched gaussian potential including its constant offset,
plus the light-induced coupling with the full beam envelope. All collisional
terms stay on in both components.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytics
from .gpe_solver import (Couplings, GroundStateResult, PairPotentials,
                         SolverSettings, ground_state_imaginary, propagate)
from .grid_fields import (ComplexField2D, Grid2D, TwoComponentState,
                          atom_number, make_grid)
from .physical_params import HBAR, ScaledSystem, decoherence_budget

MODE_TF = "tf_analytic"
MODE_INTEGRAL = "integral_exact_ground"
MODE_NUMERIC = "full_numeric"
MODES = (MODE_TF, MODE_INTEGRAL, MODE_NUMERIC)

DEFAULT_GRID_SIZE = 256
DEFAULT_BOX = 24.0  # oscillator lengths per side, ~5x the TF diameter margin


@dataclass(frozen=True)
class InterferometerResult:
    """Signal and diagnostics of one protocol run."""

    mode: str
    intensity_ratio: float
    n_minus: float
    fraction: float
    epsilon: float          # peak TF imprint phase at this ratio
    phi_v: float            # offset phase entering the interference formula
    phi_s: float            # Stokes phase actually applied
    budget: float           # gamma_dec * T exposure
    budget_flagged: bool
    diagnostics: dict = field(default_factory=dict)


def raman_apply(state: TwoComponentState, phi_s: float) -> TwoComponentState:
    """One pi/2 pulse: the pointwise unitary

        psi_minus' = (exp(-i phi_s) psi_minus - psi_plus) / sqrt(2)
        psi_plus'  = (psi_minus + exp(i phi_s) psi_plus) / sqrt(2)

    Total density is preserved pointwise (the 2x2 matrix is unitary).
    """
    if state.psi_minus.grid.shape != state.psi_plus.grid.shape:
        raise ValueError("components live on different grids")
    pm = state.psi_minus.values
    pp = state.psi_plus.values
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    phase = cmath.exp(-1j * phi_s)
    new_m = (phase * pm - pp) * inv_sqrt2
    new_p = (pm + np.conj(phase) * pp) * inv_sqrt2
    grid = state.grid
    return TwoComponentState(ComplexField2D(new_m, grid),
                             ComplexField2D(new_p, grid), state.time)


def compensation_phase(delta_v: float, t_imprint: float) -> float:
    """Stokes phase cancelling the offset-induced interference phase.

    The + component acquires phi_v = -delta_V*T/hbar relative to the -
    component; the pulses contribute 2*phi_s. Cancellation (zero signal
    without the light-induced coupling) therefore needs

        phi_s = -phi_v/2 = delta_V*T/(2*hbar).
    """
    return delta_v * t_imprint / (2 * HBAR)


def imprint_analytic(state: TwoComponentState, phi_oinl: np.ndarray,
                     phi_v: float, mu_phase: float = 0.0
                     ) -> TwoComponentState:
    """Frozen-motion imprint: local phases only, densities untouched.

        psi_minus -> psi_minus * exp(-i mu_phase)
        psi_plus  -> psi_plus  * exp(-i mu_phase) * exp(+i (phi_v + phi_oinl))

    ``mu_phase`` = mu*T/hbar is common to both components and drops out of
    every observable; it is kept for comparisons against propagated states.
    """
    common = cmath.exp(-1j * mu_phase)
    grid = state.grid
    new_m = state.psi_minus.values * common
    new_p = state.psi_plus.values * (common * np.exp(1j * (phi_v + phi_oinl)))
    return TwoComponentState(ComplexField2D(new_m, grid),
                             ComplexField2D(new_p, grid), state.time)


def default_grid(size: int = DEFAULT_GRID_SIZE, box: float = DEFAULT_BOX) -> Grid2D:
    return make_grid(size, size, box, box)


def compute_ground_state(scaled: ScaledSystem, mode: str, grid: Grid2D,
                         settings: SolverSettings | None = None,
                         initial="tf", rng_seed: int = 0) -> GroundStateResult:
    """Ground state of the initial (single-component) condensate.

    Analytic modes assume the doughnut imposes an exactly harmonic trap;
    the full-numeric mode keeps the exact beam shape.
    """
    if mode == MODE_NUMERIC:
        v = scaled.doughnut_potential(grid)
    elif mode == MODE_INTEGRAL:
        v = scaled.harmonic_potential(grid)
    else:
        raise ValueError(f"mode {mode!r} does not use a grid ground state")
    return ground_state_imaginary(v, scaled.g_self, scaled.n_atoms, grid,
                                  settings=settings, initial=initial,
                                  rng_seed=rng_seed)


def _phases_for(scaled: ScaledSystem, phi_s: float | None):
    """(phi_v, phi_s) actually applied; phi_s=None auto-compensates."""
    phi_v = -scaled.delta_v_t * scaled.t_imprint_t
    if phi_s is None:
        phi_s = -0.5 * phi_v
    return phi_v, phi_s


def _budget(scaled: ScaledSystem, ratio: float):
    if ratio <= 0:
        return 0.0, False, False
    beam = scaled.gaussian_beam(ratio)
    beam.check_low_intensity()  # warns when the linearized couplings degrade
    budget = decoherence_budget(beam, scaled.protocol.t_imprint,
                                scaled.species.gamma)
    return budget.value, budget.flagged, budget.ratio_above_limit


def run_interferometer(scaled: ScaledSystem, intensity_ratio: float,
                       mode: str, *, grid: Grid2D | None = None,
                       settings: SolverSettings | None = None,
                       ground_state: GroundStateResult | None = None,
                       phi_s: float | None = None,
                       full_beam_profile: bool = False,
                       rng_seed: int = 0) -> InterferometerResult:
    """Run the full protocol in one mode and extract N_minus.

    ``phi_s`` overrides the protocol config; None picks the config value,
    which itself defaults to auto-compensation. ``full_beam_profile``
    applies only to the integral mode (the closed form always assumes a
    uniform imprint beam over the cloud; the full-numeric mode always keeps
    the exact envelope). A precomputed ``ground_state`` (from
    ``compute_ground_state`` with the same mode and grid) is reused as is.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if intensity_ratio < 0:
        raise ValueError("intensity ratio must be nonnegative")
    if phi_s is None:
        phi_s = scaled.protocol.phi_s  # may still be None = auto

    settings = settings or SolverSettings()
    if ground_state is not None:
        if grid is not None and ground_state.psi.grid.shape != grid.shape:
            raise ValueError("precomputed ground state does not match the "
                             "requested grid")
        grid = ground_state.psi.grid
    phi_v, phi_s = _phases_for(scaled, phi_s)
    eps = analytics.epsilon_parameter(
        intensity_ratio, scaled.protocol.t_imprint, scaled.species,
        scaled.omega_perp, scaled.n_atoms, scaled.protocol.l_z)
    budget_value, budget_flagged, ratio_flagged = _budget(scaled,
                                                          intensity_ratio)
    n_atoms = scaled.n_atoms
    diagnostics: dict = {"ratio_above_limit": ratio_flagged}

    if mode == MODE_TF:
        fraction = analytics.trapped_fraction_tf(eps, 2 * phi_s + phi_v)
        n_minus = fraction * n_atoms
        diagnostics["norm_drift"] = 0.0
    else:
        if grid is None:
            grid = default_grid()
        if ground_state is None:
            ground_state = compute_ground_state(scaled, mode, grid, settings,
                                                rng_seed=rng_seed)
        diagnostics["mu"] = ground_state.mu
        diagnostics["ground_iterations"] = ground_state.iterations

        if mode == MODE_INTEGRAL:
            density = ground_state.psi.density()
            g_opt = scaled.oinl_field(grid, intensity_ratio,
                                      full_profile=full_beam_profile)
            phi_oinl, _ = analytics.phase_fields(density, g_opt,
                                                 scaled.delta_v_t,
                                                 scaled.t_imprint_t)
            n_minus = analytics.trapped_fraction_integral(
                density, phi_oinl, phi_s, phi_v, grid.cell_area,
                expected_atoms=n_atoms)
            diagnostics["norm_drift"] = 0.0
        else:  # MODE_NUMERIC
            state = TwoComponentState(
                ground_state.psi.copy(),
                ComplexField2D(np.zeros(grid.shape, dtype=np.complex128),
                               grid))
            state = raman_apply(state, phi_s)
            potentials = PairPotentials(
                v_minus=scaled.doughnut_potential(grid),
                v_plus=scaled.gaussian_potential(grid))
            couplings = Couplings(
                g_self=scaled.g_self, g_cross=scaled.g_cross,
                g_opt_minus=None,
                g_opt_plus=scaled.oinl_field(grid, intensity_ratio,
                                             full_profile=True))
            state, info = propagate(state, potentials, couplings,
                                    scaled.t_imprint_t, settings)
            state = raman_apply(state, phi_s)
            n_minus = atom_number(state.psi_minus)
            diagnostics["steps"] = info.steps
            diagnostics["norm_drift"] = max(info.norm_drift_minus,
                                            info.norm_drift_plus)

        fraction = n_minus / n_atoms

    if not -1e-9 <= fraction <= 1 + 1e-9:
        raise RuntimeError(f"trapped fraction {fraction} outside [0, 1]")
    fraction = min(max(fraction, 0.0), 1.0)
    n_minus = fraction * n_atoms

    return InterferometerResult(
        mode=mode, intensity_ratio=intensity_ratio, n_minus=n_minus,
        fraction=fraction, epsilon=eps, phi_v=phi_v, phi_s=phi_s,
        budget=budget_value, budget_flagged=budget_flagged,
        diagnostics=diagnostics)
