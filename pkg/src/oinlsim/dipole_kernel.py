"""Diagnostics for the microscopic dipole-radiation kernel.

The field radiated by an oscillating dipole at distance R, angle theta from
the dipole axis, splits into three pieces with different range:

    near         (3 cos^2 theta - 1) / R^3
    intermediate -i k (3 cos^2 theta - 1) / R^2
    far          -k^2 (cos^2 theta - 1) / R

with an overall propagation phase exp(i k R). The near and intermediate
terms share an angular factor that integrates to zero over the sphere, while
the far term has a fixed sign for every theta, which is why a large cloud of
light-driven dipoles always feels a net (attractive) coupling. These
functions only evaluate and average the kernel; no self-consistent field
solve is attempted here (the propagation modules use the local macroscopic
coupling instead, see ``physical_params.oinl_coefficient``).
"""

from __future__ import annotations

from dataclasses import dataclass
import cmath
import math

import numpy as np

DEFAULT_QUADRATURE_NODES = 64


@dataclass(frozen=True)
class KernelTerms:
    """The three kernel terms (1/m^3) and the propagation phase factor."""

    near: complex
    intermediate: complex
    far: complex
    phase: complex  # exp(i k R)

    @property
    def total(self) -> complex:
        return self.phase * (self.near + self.intermediate + self.far)


def kernel_eval(r: float, theta: float, k_laser: float) -> KernelTerms:
    """Evaluate all kernel terms at separation ``r`` (> 0) and angle ``theta``."""
    if r <= 0:
        raise ValueError("kernel is singular at r <= 0")
    angular_near = 3 * math.cos(theta)**2 - 1
    angular_far = math.cos(theta)**2 - 1
    return KernelTerms(
        near=angular_near / r**3 + 0j,
        intermediate=-1j * k_laser * angular_near / r**2,
        far=-k_laser**2 * angular_far / r + 0j,
        phase=cmath.exp(1j * k_laser * r),
    )


def _angular_average(angular_factor, nodes: int) -> float:
    """Gauss-Legendre quadrature of integral_0^pi f(theta) sin(theta) dtheta."""
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    u, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * np.pi * (u + 1.0)           # map [-1, 1] -> [0, pi]
    jacobian = 0.5 * np.pi
    return float(np.sum(w * angular_factor(theta) * np.sin(theta)) * jacobian)


def near_field_angular_average(nodes: int = DEFAULT_QUADRATURE_NODES) -> float:
    """integral_0^pi (3 cos^2 theta - 1) sin(theta) dtheta; exactly 0 analytically."""
    return _angular_average(lambda t: 3 * np.cos(t)**2 - 1, nodes)


def far_field_angular_average(nodes: int = DEFAULT_QUADRATURE_NODES) -> float:
    """integral_0^pi (cos^2 theta - 1) sin(theta) dtheta = -4/3.

    Nonzero for any density distribution; after the overall minus sign of the
    far term this is what makes the averaged interaction attractive.
    """
    return _angular_average(lambda t: np.cos(t)**2 - 1, nodes)


def kernel_table(klr_values, theta_values) -> list[dict]:
    """Magnitude table of the three terms, with lengths in units of 1/k.

    Rows are dicts with keys ``klr``, ``theta``, ``near``, ``intermediate``,
    ``far``; the magnitudes are the terms evaluated at k = 1, i.e. scaled by
    k^3 relative to SI.
    """
    rows = []
    for klr in klr_values:
        for theta in theta_values:
            terms = kernel_eval(float(klr), float(theta), 1.0)
            rows.append({
                "klr": float(klr),
                "theta": float(theta),
                "near": abs(terms.near),
                "intermediate": abs(terms.intermediate),
                "far": abs(terms.far),
            })
    return rows
