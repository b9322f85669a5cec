"""Pure-numpy implementations of the split-step hot kernels.

These mirror the compiled versions in ``_core.pyx``; both mutate the wave
functions in place. Densities are always taken from the arrays as they are
on entry, so the two components see a consistent snapshot.
"""

import numpy as np


def local_phase_pair(psi_m, psi_p, v_m, v_p, g_self, g_cross,
                     g_opt_m, g_opt_p, dt):
    """Apply exp(-i*dt*(V + g_self*n_own + g_cross*n_other [+ g_opt*n_own]))
    to both components of a two-component state, in place."""
    n_m = psi_m.real**2 + psi_m.imag**2
    n_p = psi_p.real**2 + psi_p.imag**2
    theta_m = v_m + g_self * n_m + g_cross * n_p
    theta_p = v_p + g_self * n_p + g_cross * n_m
    if g_opt_m is not None:
        theta_m = theta_m + g_opt_m * n_m
    if g_opt_p is not None:
        theta_p = theta_p + g_opt_p * n_p
    psi_m *= np.exp(theta_m * (-1j * dt))
    psi_p *= np.exp(theta_p * (-1j * dt))


def local_decay(psi, v, g, dtau, factor_out=None):
    """Apply the non-unitary factor exp(-dtau*(V + g*n)) in place
    (imaginary-time local half step), with n taken from psi on entry.

    When ``factor_out`` is given, the factor is also written there so the
    caller can reapply it after the kinetic step; keeping the density frozen
    across the whole step makes the splitting symmetric and the relaxation
    fixed point second-order accurate in dtau.
    """
    n = psi.real**2 + psi.imag**2
    factor = np.exp((v + g * n) * (-dtau))
    psi *= factor
    if factor_out is not None:
        factor_out[:] = factor
