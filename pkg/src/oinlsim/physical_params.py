"""Physical inputs of the interference scheme and their derived quantities.

All laser and trap frequencies in this package are angular rates (rad/s);
in particular detunings and the spontaneous-emission rate gamma are angular.
This matters: the light-induced coupling below is linear in gamma, so a
2*pi slip would change every signal curve by 6.28x. The convention is fixed
by the cross-check that the bundled rubidium doughnut beam (Omega0 =
3.15e10 rad/s, Delta = 1.1e15 rad/s, w = 10 um) gives a transverse trap
frequency of 2*pi*576 Hz.

Beam geometry (transverse plane, r^2 = x^2 + y^2):

    doughnut:  Omega(x,y) = Omega0 * exp(-r^2/w^2) * (x + i y)/w
    gaussian:  Omega(x,y) = Omega0 * exp(-r^2/w^2)

The axial plane-wave factor exp(i k_L z) is a global phase in the transverse
plane and is dropped; only |Omega|^2 enters the potentials and couplings.

    V(x)      = hbar |Omega(x)|^2 / Delta
    g_3D(x)   = -2*pi*hbar*gamma * (|Omega(x)|^2/Delta^2) * (lambda0/2pi)^3

The second line is the local light-induced (photon-exchange) interaction
coefficient; it is attractive (<= 0) for any detuning sign.

2D reduction: the cloud is treated as homogeneous over an axial length L_z,
so every 3D interaction coefficient is divided by L_z and the planar wave
function is normalized to the atom number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
import numpy as np

from .grid_fields import Grid2D

HBAR = 1.054571817e-34  # J s (CODATA 2018)

DOUGHNUT = "doughnut"
GAUSSIAN = "gaussian"

# Operating ceiling on |Omega0|^2/Delta^2 for a tolerable spontaneous-emission
# budget over a ~10 us interaction; runs above it are flagged, not rejected.
INTENSITY_RATIO_LIMIT = 1e-3
# Validity ceiling for the low-intensity expansion of the couplings.
LOW_INTENSITY_WARN = 1e-2


@dataclass(frozen=True)
class AtomSpecies:
    """Atomic inputs: mass, scattering lengths, dipole transition."""

    mass: float         # kg
    a_s: float          # m, symmetric scattering length
    a_a: float          # m, antisymmetric scattering length
    wavelength0: float  # m, dipole-transition wavelength
    gamma: float        # rad/s, spontaneous-emission rate (angular)

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.wavelength0 <= 0:
            raise ValueError("transition wavelength must be positive")
        if self.gamma <= 0:
            raise ValueError("spontaneous rate gamma must be positive")
        if self.a_s + self.a_a <= 0:
            raise ValueError("a_s + a_a must be positive (repulsive net "
                             "interaction is required for a Thomas-Fermi "
                             "ground state)")

    @property
    def kappa_s(self) -> float:
        """Symmetric collisional coupling 4*pi*hbar^2*a_s/M (J m^3)."""
        return 4 * np.pi * HBAR**2 * self.a_s / self.mass

    @property
    def kappa_a(self) -> float:
        """Antisymmetric collisional coupling 4*pi*hbar^2*a_a/M (J m^3)."""
        return 4 * np.pi * HBAR**2 * self.a_a / self.mass

    @classmethod
    def rubidium87(cls) -> "AtomSpecies":
        return cls(mass=1.45e-25, a_s=5.4e-9, a_a=-0.05e-9,
                   wavelength0=780e-9, gamma=3.8e7)


@dataclass(frozen=True)
class BeamConfig:
    """One trapping/imprinting laser beam.

    ``omega0`` may be complex (only its modulus enters observables);
    ``delta`` is signed: a doughnut beam traps for delta > 0 (atoms are
    low-field seekers on the axis node), a gaussian beam for delta < 0.
    """

    profile: str
    omega0: complex     # rad/s, peak Rabi amplitude
    delta: float        # rad/s, signed detuning
    waist: float        # m
    k_laser: float = 0.0  # 1/m, informational only

    def __post_init__(self):
        if self.profile not in (DOUGHNUT, GAUSSIAN):
            raise ValueError(f"unknown beam profile {self.profile!r}")
        if self.waist <= 0:
            raise ValueError("waist must be positive")
        if self.delta == 0:
            raise ValueError("detuning must be nonzero")
        if self.profile == DOUGHNUT and self.delta <= 0:
            raise ValueError("doughnut beam requires delta > 0 to trap")
        if self.profile == GAUSSIAN and self.delta >= 0:
            raise ValueError("gaussian beam requires delta < 0 to trap")

    @property
    def intensity_ratio(self) -> float:
        """|Omega0|^2 / Delta^2, the small parameter of the scheme."""
        return abs(self.omega0)**2 / self.delta**2

    def check_low_intensity(self, threshold: float = LOW_INTENSITY_WARN) -> bool:
        """Warn (and return False) when outside the low-intensity regime."""
        if self.intensity_ratio > threshold:
            warnings.warn(
                f"intensity ratio {self.intensity_ratio:.3g} exceeds the "
                f"low-intensity threshold {threshold:.3g}; the linearized "
                "couplings are unreliable", stacklevel=2)
            return False
        return True


@dataclass(frozen=True)
class ProtocolConfig:
    """Interferometer bookkeeping: atom number, axial extent, timings."""

    n_atoms: float      # dimensionless
    l_z: float          # m, homogeneous axial length of the cloud
    t_imprint: float    # s, imprint duration between the two pulses
    t_pulse: float = 0.0   # s, pi/2 pulse duration (bookkeeping only)
    phi_s: float | None = None  # rad; None = auto-compensate the offset phase

    def __post_init__(self):
        if self.n_atoms <= 0:
            raise ValueError("atom number must be positive")
        if self.l_z <= 0:
            raise ValueError("axial length L_z must be positive")
        if self.t_imprint < 0:
            raise ValueError("imprint time must be nonnegative")


@dataclass
class DerivedTrap:
    """Trap quantities derived from the beam pair."""

    omega_perp: float   # rad/s
    delta_v: float      # J, constant offset of the matched gaussian potential
    mu: float | None = None  # J, filled in by the solver or the TF formulas

    def __post_init__(self):
        if self.omega_perp <= 0:
            raise ValueError("omega_perp must be positive")


def derive_trap(species: AtomSpecies, doughnut: BeamConfig) -> DerivedTrap:
    """Trap frequency and matched-beam offset implied by the doughnut beam."""
    omega_perp = trap_frequency_from_doughnut(doughnut, species.mass)
    delta_v = -species.mass * omega_perp**2 * doughnut.waist**2 / 4
    return DerivedTrap(omega_perp=omega_perp, delta_v=delta_v)


def rabi_field(beam: BeamConfig, grid: Grid2D,
               length_scale: float = 1.0) -> np.ndarray:
    """Sample the transverse Rabi amplitude Omega(x, y) on a grid.

    ``length_scale`` converts grid coordinates to meters (pass the oscillator
    length for a dimensionless grid, 1.0 for an SI grid).
    """
    x = grid.x_mesh * length_scale
    y = grid.y_mesh * length_scale
    r2 = x**2 + y**2
    envelope = np.exp(-r2 / beam.waist**2)
    if beam.profile == DOUGHNUT:
        return beam.omega0 * envelope * (x + 1j * y) / beam.waist
    if beam.profile == GAUSSIAN:
        return beam.omega0 * envelope + 0j
    raise ValueError(f"unknown beam profile {beam.profile!r}")


def optical_potential(rabi: np.ndarray, delta: float) -> np.ndarray:
    """Dipole potential V = hbar |Omega|^2 / Delta (J); sign follows Delta."""
    if delta == 0:
        raise ValueError("detuning must be nonzero")
    return HBAR * (rabi.real**2 + rabi.imag**2) / delta


def oinl_coefficient(rabi: np.ndarray, delta: float,
                     species: AtomSpecies) -> np.ndarray:
    """Local light-induced interaction coefficient (J m^3), everywhere <= 0:

        kappa_opt(x) = -2*pi*hbar*gamma * (|Omega(x)|^2/Delta^2) * (lambda0/2pi)^3
    """
    if delta == 0:
        raise ValueError("detuning must be nonzero")
    local_ratio = (rabi.real**2 + rabi.imag**2) / delta**2
    return (-2 * np.pi * HBAR * species.gamma
            * (species.wavelength0 / (2 * np.pi))**3) * local_ratio


def trap_frequency_from_doughnut(beam: BeamConfig, mass: float) -> float:
    """Harmonic frequency of the doughnut core:
    M*omega^2/2 = hbar*|Omega0|^2/(w^2*Delta)  =>  omega = sqrt(2 hbar |Omega0|^2 / (M w^2 Delta)).
    """
    if beam.profile != DOUGHNUT:
        raise ValueError("trap frequency derivation requires a doughnut beam")
    if beam.delta <= 0:
        raise ValueError("doughnut detuning must be positive")
    return math.sqrt(2 * HBAR * abs(beam.omega0)**2
                     / (mass * beam.waist**2 * beam.delta))


def match_gaussian_to_trap(omega_perp: float, waist: float, delta_gauss: float,
                           mass: float) -> tuple[BeamConfig, float]:
    """Gaussian beam producing the same harmonic curvature as the doughnut.

    Matching condition M*omega^2/2 = -2*hbar*|Omega0_G|^2/(w^2*Delta_G) gives
    |Omega0_G|^2 = -M*omega^2*w^2*Delta_G/(4*hbar). Returns the beam and the
    constant potential offset delta_V = hbar|Omega0_G|^2/Delta_G =
    -M*omega^2*w^2/4, which is independent of the chosen detuning.
    """
    if delta_gauss >= 0:
        raise ValueError("gaussian detuning must be negative")
    omega0_sq = -mass * omega_perp**2 * waist**2 * delta_gauss / (4 * HBAR)
    beam = BeamConfig(GAUSSIAN, math.sqrt(omega0_sq), delta_gauss, waist)
    delta_v = HBAR * omega0_sq / delta_gauss
    return beam, delta_v


@dataclass(frozen=True)
class DecoherenceBudget:
    """Spontaneous-emission exposure gamma*|Omega0/Delta|^2*T of one run."""

    value: float
    threshold: float
    intensity_ratio: float

    @property
    def flagged(self) -> bool:
        return self.value > self.threshold

    @property
    def ratio_above_limit(self) -> bool:
        return self.intensity_ratio > INTENSITY_RATIO_LIMIT


def decoherence_budget(beam: BeamConfig, t_imprint: float, gamma: float,
                       threshold: float = 0.5) -> DecoherenceBudget:
    """gamma_dec * T with gamma_dec = gamma*|Omega0|^2/Delta^2 at the beam peak."""
    value = gamma * beam.intensity_ratio * t_imprint
    return DecoherenceBudget(value=value, threshold=threshold,
                             intensity_ratio=beam.intensity_ratio)


@dataclass(frozen=True)
class ScaledSystem:
    """All solver inputs in harmonic-oscillator units.

    Unit system: length a_ho = sqrt(hbar/(M*omega_perp)), time 1/omega_perp,
    energy hbar*omega_perp. 2D interaction coefficients are the 3D ones
    divided by L_z and made dimensionless, which reduces to

        g_self = 4*pi*(a_s + a_a)/L_z     (own-component collisions)
        g_cross = 4*pi*(a_s - a_a)/L_z    (cross-component collisions)

    The light-induced coupling on the grid is
    g_opt(x) = -oinl_prefactor * (|Omega(x)|^2/Delta^2).
    """

    species: AtomSpecies
    doughnut: BeamConfig
    protocol: ProtocolConfig
    omega_perp: float       # rad/s
    length_scale: float     # m   (a_ho)
    time_scale: float       # s   (1/omega_perp)
    energy_scale: float     # J   (hbar*omega_perp)
    delta_v: float          # J
    n_atoms: float
    waist_t: float          # w / a_ho
    g_self: float
    g_cross: float
    oinl_prefactor: float   # dimensionless, positive
    delta_v_t: float        # delta_v / (hbar*omega_perp) = -waist_t^2/4
    t_imprint_t: float      # omega_perp * T

    # unit round trips -------------------------------------------------

    def length_si(self, x: float) -> float:
        return x * self.length_scale

    def length_t(self, x_si: float) -> float:
        return x_si / self.length_scale

    def time_si(self, t: float) -> float:
        return t * self.time_scale

    def time_t(self, t_si: float) -> float:
        return t_si / self.time_scale

    def energy_si(self, e: float) -> float:
        return e * self.energy_scale

    def energy_t(self, e_si: float) -> float:
        return e_si / self.energy_scale

    # dimensionless potential / coupling fields ------------------------

    def harmonic_potential(self, grid: Grid2D) -> np.ndarray:
        """Ideal matched trap r^2/2 (used by the analytic modes)."""
        return 0.5 * grid.r2_mesh()

    def doughnut_potential(self, grid: Grid2D) -> np.ndarray:
        """Exact doughnut potential (r^2/2) * exp(-2 r^2 / w^2)."""
        r2 = grid.r2_mesh()
        return 0.5 * r2 * np.exp(-2 * r2 / self.waist_t**2)

    def gaussian_potential(self, grid: Grid2D,
                           include_offset: bool = True) -> np.ndarray:
        """Exact matched gaussian potential delta_V * exp(-2 r^2 / w^2);
        with ``include_offset=False`` the constant delta_V is subtracted."""
        r2 = grid.r2_mesh()
        v = self.delta_v_t * np.exp(-2 * r2 / self.waist_t**2)
        if not include_offset:
            v = v - self.delta_v_t
        return v

    def oinl_field(self, grid: Grid2D, intensity_ratio: float,
                   full_profile: bool = True) -> np.ndarray:
        """Dimensionless light-induced coupling of the imprint beam.

        ``intensity_ratio`` is the peak |Omega0|^2/Delta^2. With
        ``full_profile`` the gaussian envelope exp(-2 r^2/w^2) is kept;
        otherwise the beam is treated as uniform over the cloud (valid for
        w much larger than the cloud radius).
        """
        peak = -self.oinl_prefactor * intensity_ratio
        if full_profile:
            return peak * np.exp(-2 * grid.r2_mesh() / self.waist_t**2)
        return np.full(grid.shape, peak)

    def gaussian_beam(self, intensity_ratio: float) -> BeamConfig:
        """The matched imprint beam realizing a given |Omega0|^2/Delta^2.

        The matching condition fixes |Omega0|^2/|Delta| = M*omega^2*w^2/(4*hbar),
        so the requested ratio determines the detuning uniquely:
        Delta = -M*omega^2*w^2/(4*hbar*ratio).
        """
        if intensity_ratio <= 0:
            raise ValueError("intensity ratio must be positive")
        delta = (-self.species.mass * self.omega_perp**2
                 * self.doughnut.waist**2 / (4 * HBAR * intensity_ratio))
        beam, _ = match_gaussian_to_trap(self.omega_perp, self.doughnut.waist,
                                         delta, self.species.mass)
        return beam


def scale_to_dimensionless(species: AtomSpecies, doughnut: BeamConfig,
                           protocol: ProtocolConfig) -> ScaledSystem:
    """Derive the trap from the doughnut beam and scale everything."""
    omega_perp = trap_frequency_from_doughnut(doughnut, species.mass)
    a_ho = math.sqrt(HBAR / (species.mass * omega_perp))
    energy_scale = HBAR * omega_perp
    delta_v = -species.mass * omega_perp**2 * doughnut.waist**2 / 4
    g_self = 4 * np.pi * (species.a_s + species.a_a) / protocol.l_z
    g_cross = 4 * np.pi * (species.a_s - species.a_a) / protocol.l_z
    oinl_prefactor = (2 * np.pi * species.gamma
                      * (species.wavelength0 / (2 * np.pi))**3
                      / (protocol.l_z * omega_perp * a_ho**2))
    return ScaledSystem(
        species=species,
        doughnut=doughnut,
        protocol=protocol,
        omega_perp=omega_perp,
        length_scale=a_ho,
        time_scale=1.0 / omega_perp,
        energy_scale=energy_scale,
        delta_v=delta_v,
        n_atoms=protocol.n_atoms,
        waist_t=doughnut.waist / a_ho,
        g_self=g_self,
        g_cross=g_cross,
        oinl_prefactor=oinl_prefactor,
        delta_v_t=delta_v / energy_scale,
        t_imprint_t=omega_perp * protocol.t_imprint,
    )
