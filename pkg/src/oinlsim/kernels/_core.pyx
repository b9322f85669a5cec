# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-step hot kernels.

Fuses the density evaluation, phase accumulation and complex rotation of the
local (potential + nonlinear) step into a single pass over the grid; the
numpy fallback in ``_reference.py`` needs several temporaries per call.
"""

from libc.math cimport cos, sin, exp


def local_phase_pair(double complex[:, ::1] psi_m, double complex[:, ::1] psi_p,
                     double[:, ::1] v_m, double[:, ::1] v_p,
                     double g_self, double g_cross,
                     object g_opt_m, object g_opt_p, double dt):
    """In-place exp(-i*dt*(V + g_self*n_own + g_cross*n_other [+ g_opt*n_own]))
    on both components. ``g_opt_m``/``g_opt_p`` are 2D arrays or None."""
    cdef double[:, ::1] gm = g_opt_m if g_opt_m is not None else None
    cdef double[:, ::1] gp = g_opt_p if g_opt_p is not None else None
    cdef bint has_gm = gm is not None
    cdef bint has_gp = gp is not None
    cdef Py_ssize_t nx = psi_m.shape[0], ny = psi_m.shape[1]
    cdef Py_ssize_t i, j
    cdef double complex zm, zp
    cdef double n_m, n_p, theta, c, s, re, im

    for i in range(nx):
        for j in range(ny):
            zm = psi_m[i, j]
            zp = psi_p[i, j]
            n_m = zm.real * zm.real + zm.imag * zm.imag
            n_p = zp.real * zp.real + zp.imag * zp.imag

            theta = v_m[i, j] + g_self * n_m + g_cross * n_p
            if has_gm:
                theta += gm[i, j] * n_m
            theta *= dt
            c = cos(theta)
            s = sin(theta)
            # z * (cos(theta) - i sin(theta))
            re = zm.real * c + zm.imag * s
            im = zm.imag * c - zm.real * s
            psi_m[i, j].real = re
            psi_m[i, j].imag = im

            theta = v_p[i, j] + g_self * n_p + g_cross * n_m
            if has_gp:
                theta += gp[i, j] * n_p
            theta *= dt
            c = cos(theta)
            s = sin(theta)
            re = zp.real * c + zp.imag * s
            im = zp.imag * c - zp.real * s
            psi_p[i, j].real = re
            psi_p[i, j].imag = im


def local_decay(double complex[:, ::1] psi, double[:, ::1] v,
                double g, double dtau, object factor_out=None):
    """In-place exp(-dtau*(V + g*n)) (imaginary-time local half step).

    When ``factor_out`` is a 2D array the factor is stored there so the
    caller can reapply it after the kinetic step (density frozen across the
    step keeps the splitting symmetric).
    """
    cdef double[:, ::1] fout = factor_out if factor_out is not None else None
    cdef bint store = fout is not None
    cdef Py_ssize_t nx = psi.shape[0], ny = psi.shape[1]
    cdef Py_ssize_t i, j
    cdef double complex z
    cdef double n, f

    for i in range(nx):
        for j in range(ny):
            z = psi[i, j]
            n = z.real * z.real + z.imag * z.imag
            f = exp(-dtau * (v[i, j] + g * n))
            psi[i, j].real = z.real * f
            psi[i, j].imag = z.imag * f
            if store:
                fout[i, j] = f
