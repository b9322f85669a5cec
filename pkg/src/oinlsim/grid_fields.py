"""Uniform periodic 2D grid, complex field storage and condensate observables.

Everything in this module is dimensionless: lengths in harmonic-oscillator
units, energies in units of the trap quantum, wave functions normalized so
that sum(|psi|^2)*dx*dy equals the atom number. SI values enter only through
``physical_params`` and the I/O layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(eq=False)
class Grid2D:
    """Periodic rectangular grid with standard FFT wave-number ordering."""

    nx: int
    ny: int
    lx: float
    ly: float

    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)
    kx: np.ndarray = field(init=False, repr=False)
    ky: np.ndarray = field(init=False, repr=False)
    x_mesh: np.ndarray = field(init=False, repr=False)
    y_mesh: np.ndarray = field(init=False, repr=False)
    k2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("box lengths must be positive")
        if not (_is_power_of_two(self.nx) and _is_power_of_two(self.ny)):
            raise ValueError(
                f"grid counts must be powers of two, got {self.nx}x{self.ny}")
        # cell-centered-free convention: x[0] = -L/2, periodic wrap at +L/2
        self.x = -self.lx / 2 + self.dx * np.arange(self.nx)
        self.y = -self.ly / 2 + self.dy * np.arange(self.ny)
        self.kx = 2 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)
        self.ky = 2 * np.pi * np.fft.fftfreq(self.ny, d=self.dy)
        self.x_mesh, self.y_mesh = np.meshgrid(self.x, self.y, indexing="ij")
        kxm, kym = np.meshgrid(self.kx, self.ky, indexing="ij")
        self.k2 = kxm**2 + kym**2

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def r2_mesh(self) -> np.ndarray:
        return self.x_mesh**2 + self.y_mesh**2


def make_grid(nx: int, ny: int, lx: float, ly: float) -> Grid2D:
    """Build a periodic grid; counts must be powers of two."""
    return Grid2D(nx, ny, lx, ly)


@dataclass(eq=False)
class ComplexField2D:
    """Complex samples on a grid. ``values`` is always C-contiguous complex128."""

    values: np.ndarray
    grid: Grid2D

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}")

    def density(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2

    def copy(self) -> "ComplexField2D":
        return ComplexField2D(self.values.copy(), self.grid)

    def normalized_to(self, n_atoms: float) -> "ComplexField2D":
        current = atom_number(self)
        if current <= 0:
            raise ValueError("cannot normalize a zero field")
        return ComplexField2D(self.values * np.sqrt(n_atoms / current), self.grid)


@dataclass(eq=False)
class TwoComponentState:
    """Pair of wave functions (psi_minus, psi_plus) sharing one grid."""

    psi_minus: ComplexField2D
    psi_plus: ComplexField2D
    time: float = 0.0

    def __post_init__(self):
        if self.psi_minus.grid is not self.psi_plus.grid:
            if self.psi_minus.grid.shape != self.psi_plus.grid.shape:
                raise ValueError("components live on different grids")

    @property
    def grid(self) -> Grid2D:
        return self.psi_minus.grid

    def copy(self) -> "TwoComponentState":
        return TwoComponentState(self.psi_minus.copy(), self.psi_plus.copy(),
                                 self.time)


def atom_number(psi: ComplexField2D) -> float:
    """Riemann-sum norm: sum |psi|^2 dx dy."""
    v = psi.values
    return float(np.vdot(v, v).real * psi.grid.cell_area)


def overlap(a: ComplexField2D, b: ComplexField2D) -> complex:
    """<a|b> = sum conj(a) b dx dy."""
    return complex(np.vdot(a.values, b.values) * a.grid.cell_area)


def _check_same_grid(psi: ComplexField2D, v: np.ndarray):
    if v.shape != psi.grid.shape:
        raise ValueError(f"potential shape {v.shape} does not match grid "
                         f"{psi.grid.shape}")


def _hamiltonian_terms(psi: ComplexField2D, v: np.ndarray, g: float,
                       g_opt: np.ndarray | None):
    """Return (kinetic, potential, interaction) pieces of <H> bookkeeping.

    kinetic   = sum |grad psi|^2 / 2 dA          (spectral)
    potential = sum V n dA
    interaction = sum (g + g_opt) n^2 dA          (NOT halved)
    """
    grid = psi.grid
    _check_same_grid(psi, v)
    dA = grid.cell_area
    psi_hat = np.fft.fft2(psi.values)
    kinetic = 0.5 * np.sum(grid.k2 * (psi_hat.real**2 + psi_hat.imag**2)) \
        * dA / (grid.nx * grid.ny)
    n = psi.density()
    potential = np.sum(v * n) * dA
    g_eff = g if g_opt is None else g + g_opt
    interaction = np.sum(g_eff * n * n) * dA
    return float(kinetic), float(potential), float(interaction)


def gp_energy(psi: ComplexField2D, v: np.ndarray, g: float,
              g_opt: np.ndarray | None = None) -> float:
    """Mean-field energy functional
    E = sum[ |grad psi|^2/2 + V|psi|^2 + (g + g_opt)|psi|^4/2 ] dA."""
    kin, pot, inter = _hamiltonian_terms(psi, v, g, g_opt)
    return kin + pot + 0.5 * inter


def chemical_potential(psi: ComplexField2D, v: np.ndarray, g: float,
                       g_opt: np.ndarray | None = None) -> float:
    """mu = sum[ |grad psi|^2/2 + V|psi|^2 + (g + g_opt)|psi|^4 ] dA / N."""
    n_atoms = atom_number(psi)
    if n_atoms <= 0:
        raise ValueError("chemical potential of a zero-norm field is undefined")
    kin, pot, inter = _hamiltonian_terms(psi, v, g, g_opt)
    return (kin + pot + inter) / n_atoms


def spectral_gradient(psi: ComplexField2D) -> tuple[np.ndarray, np.ndarray]:
    """(d/dx, d/dy) psi via the Fourier representation; exact for on-grid modes."""
    grid = psi.grid
    psi_hat = np.fft.fft2(psi.values)
    dx_psi = np.fft.ifft2(1j * grid.kx[:, None] * psi_hat)
    dy_psi = np.fft.ifft2(1j * grid.ky[None, :] * psi_hat)
    return dx_psi, dy_psi


def dump_field(psi: ComplexField2D, path: str):
    """Debugging dump. ``.npy`` suffix stores the raw complex array; anything
    else writes CSV rows ``x,y,re,im`` in x-major order."""
    if str(path).endswith(".npy"):
        np.save(path, psi.values)
        return
    grid = psi.grid
    with open(path, "w") as fh:
        fh.write("x,y,re_psi,im_psi\n")
        for i in range(grid.nx):
            for j in range(grid.ny):
                z = psi.values[i, j]
                fh.write(f"{grid.x[i]:.12g},{grid.y[j]:.12g},"
                         f"{z.real:.12g},{z.imag:.12g}\n")
