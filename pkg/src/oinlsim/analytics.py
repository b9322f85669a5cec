"""Closed-form Thomas-Fermi layer: ground-state profile, the peak imprint
phase, and the trapped-atom fraction in both closed and quadrature form.

Interference bookkeeping. During the imprint the + component evolves in the
gaussian beam while the - component stays in the doughnut beam. Relative to
the - component, the + component acquires the local phase

    phi_oinl(x) = -kappa_opt(x) * n_+(x) * T / hbar   (>= 0, light-induced)
    phi_v       = -delta_V * T / hbar                 (constant offset)

both written here so that a phase factor exp(+i*(phi_v + phi_oinl)) acts on
the + component: the energy of a component is lowered by a negative
potential offset, which advances its phase. (delta_V < 0 for the matched
red-detuned gaussian beam, so phi_v > 0.) The second pi/2 pulse converts the
relative phase into a trapped population

    N_minus = integral n(x) sin^2[(phi_oinl + 2 phi_s + phi_v)/2] d^2x,

which vanishes identically when the Stokes phase is set to the compensation
value phi_s = -phi_v/2 and the light-induced term is absent. With the
Thomas-Fermi profile and a uniform imprint beam the integral evaluates in
closed form, see ``trapped_fraction_tf``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grid_fields import Grid2D
from .physical_params import HBAR, AtomSpecies

# Below this the closed-form fraction switches to its series expansion: the
# direct formula subtracts O(1) terms to produce an O(eps^2) result, losing
# ~1e-16/eps^4 in relative accuracy, while the eps^4 series truncation error
# is ~eps^4/500. Both are below 1e-8 at the crossover.
_EPS_SERIES_CUTOFF = 5e-2


@dataclass(frozen=True)
class TFGroundState:
    """Inverted-parabola ground state of the matched harmonic trap."""

    r_tf: float          # m
    peak_density: float  # 1/m^2 (planar density, normalized to N)
    mu: float            # J
    n_atoms: float
    omega_perp: float    # rad/s
    mass: float          # kg

    def density(self, r) -> np.ndarray:
        """Planar density n(r) = n0 * max(0, 1 - r^2/R^2), r in meters."""
        r = np.asarray(r, dtype=float)
        return self.peak_density * np.maximum(0.0, 1.0 - (r / self.r_tf)**2)

    def density_field(self, grid: Grid2D, length_scale: float) -> np.ndarray:
        """Density sampled on a dimensionless grid, in oscillator units
        (``length_scale`` is the oscillator length in meters); the samples
        integrate to N up to the Riemann-sum error of the grid."""
        r_si = np.sqrt(grid.r2_mesh()) * length_scale
        return self.density(r_si) * length_scale**2


def tf_ground_state(species: AtomSpecies, omega_perp: float, n_atoms: float,
                    l_z: float) -> TFGroundState:
    """Thomas-Fermi radius, chemical potential and profile.

    R_TF = 2 * sqrt(hbar/(M omega)) * [(a_s + a_a) N / L_z]^{1/4}
    mu   = M omega^2 R_TF^2 / 2
    n0   = 2 N / (pi R_TF^2)
    """
    a_sum = species.a_s + species.a_a
    if a_sum <= 0:
        raise ValueError("a_s + a_a must be positive for a TF ground state")
    if omega_perp <= 0:
        raise ValueError("omega_perp must be positive")
    a_ho = math.sqrt(HBAR / (species.mass * omega_perp))
    r_tf = 2 * a_ho * (a_sum * n_atoms / l_z)**0.25
    mu = 0.5 * species.mass * omega_perp**2 * r_tf**2
    peak = 2 * n_atoms / (math.pi * r_tf**2)
    return TFGroundState(r_tf=r_tf, peak_density=peak, mu=mu,
                         n_atoms=n_atoms, omega_perp=omega_perp,
                         mass=species.mass)


def epsilon_parameter(intensity_ratio: float, t_imprint: float,
                      species: AtomSpecies, omega_perp: float,
                      n_atoms: float, l_z: float) -> float:
    """Peak imprint phase of the light-induced coupling over the TF profile:

    eps = (|Omega0_G|^2/Delta_G^2) * gamma * T * (lambda0/2pi)^3
          * (M omega / 2 hbar) * sqrt(N / ((a_s + a_a) L_z))

    This equals phi_oinl at the trap center for half the atoms in the +
    component, and controls the closed-form fraction below.
    """
    if intensity_ratio < 0 or t_imprint < 0:
        raise ValueError("intensity ratio and imprint time must be nonnegative")
    return (intensity_ratio * species.gamma * t_imprint
            * (species.wavelength0 / (2 * math.pi))**3
            * species.mass * omega_perp / (2 * HBAR)
            * math.sqrt(n_atoms / ((species.a_s + species.a_a) * l_z)))


def trapped_fraction_tf(eps: float, phase_offset: float = 0.0) -> float:
    """Closed-form trapped fraction for the TF profile and a uniform beam.

    With c = 2*phi_s + phi_v (zero when compensated),

        N_-/N = 1/2 - sin(eps + c)/eps - (cos(eps + c) - cos(c))/eps^2,

    the exact evaluation of the interference integral over the inverted
    parabola. The eps -> 0 limit is removable (leading behavior eps^2/8 at
    c = 0); below the cancellation cutoff the expansion

        (1 - cos c)/2 + eps sin(c)/3 + eps^2 cos(c)/8 - eps^3 sin(c)/30
            - eps^4 cos(c)/144 + eps^5 sin(c)/840 + eps^6 cos(c)/5760

    is used instead (truncation below 1e-13 at the crossover).
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    c = phase_offset
    if eps < _EPS_SERIES_CUTOFF:
        sin_c, cos_c = math.sin(c), math.cos(c)
        return ((1.0 - cos_c) / 2.0 + eps * sin_c / 3.0
                + eps**2 * cos_c / 8.0 - eps**3 * sin_c / 30.0
                - eps**4 * cos_c / 144.0 + eps**5 * sin_c / 840.0
                + eps**6 * cos_c / 5760.0)
    return (0.5 - math.sin(eps + c) / eps
            - (math.cos(eps + c) - math.cos(c)) / eps**2)


def phase_fields(density: np.ndarray, g_opt: np.ndarray, delta_v_t: float,
                 t_imprint_t: float) -> tuple[np.ndarray, float]:
    """Imprinted phases from a frozen density, in oscillator units.

    ``density`` is the pre-pulse ground-state density (normalized to N); the
    + component carries half of it after the first pi/2 pulse, so

        phi_oinl(x) = -g_opt(x) * density(x)/2 * T    (>= 0 since g_opt <= 0)
        phi_v       = -delta_v_t * T

    Returns (phi_oinl field, phi_v).
    """
    phi_oinl = -np.asarray(g_opt) * (0.5 * np.asarray(density)) * t_imprint_t
    phi_v = -delta_v_t * t_imprint_t
    return phi_oinl, float(phi_v)


def trapped_fraction_integral(density: np.ndarray, phi_oinl: np.ndarray,
                              phi_s: float, phi_v: float, cell_area: float,
                              expected_atoms: float | None = None,
                              renormalize: bool = False) -> float:
    """Quadrature of N_- = sum n(x) sin^2[(phi_oinl + 2 phi_s + phi_v)/2] dA.

    ``density`` must be normalized to the atom count; pass ``expected_atoms``
    to have that checked (warning plus optional renormalization on mismatch).
    Returns the absolute number of trapped atoms.
    """
    density = np.asarray(density, dtype=float)
    if expected_atoms is not None:
        total = float(np.sum(density) * cell_area)
        if not math.isclose(total, expected_atoms, rel_tol=1e-6):
            warnings.warn(
                f"density integrates to {total:.6g}, expected "
                f"{expected_atoms:.6g}", stacklevel=2)
            if renormalize:
                density = density * (expected_atoms / total)
    half_angle = 0.5 * (phi_oinl + 2.0 * phi_s + phi_v)
    return float(np.sum(density * np.sin(half_angle)**2) * cell_area)
