"""Backend parity: the compiled kernels must match the numpy reference."""

import numpy as np
import pytest

from oinlsim.kernels import BACKEND, available_backends


def _random_pair(rng, n=96):
    psi_m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    psi_p = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    v_m = rng.standard_normal((n, n))
    v_p = rng.standard_normal((n, n))
    g_opt = -np.abs(rng.standard_normal((n, n)))
    return (np.ascontiguousarray(psi_m), np.ascontiguousarray(psi_p),
            np.ascontiguousarray(v_m), np.ascontiguousarray(v_p),
            np.ascontiguousarray(g_opt))


def test_backend_selected():
    assert BACKEND in ("python", "compiled")
    assert "python" in available_backends()


def test_reference_phase_semantics():
    # one explicit point against the closed-form phase
    ref = available_backends()["python"]
    psi_m = np.array([[1.0 + 0j]])
    psi_p = np.array([[2.0 + 0j]])
    v_m = np.array([[0.5]])
    v_p = np.array([[-0.25]])
    ref.local_phase_pair(psi_m, psi_p, v_m, v_p, 0.3, 0.1, None, None, 0.01)
    theta_m = 0.01 * (0.5 + 0.3 * 1.0 + 0.1 * 4.0)
    theta_p = 0.01 * (-0.25 + 0.3 * 4.0 + 0.1 * 1.0)
    assert psi_m[0, 0] == pytest.approx(np.exp(-1j * theta_m), rel=1e-14)
    assert psi_p[0, 0] == pytest.approx(2 * np.exp(-1j * theta_p), rel=1e-14)


def test_reference_decay_semantics():
    ref = available_backends()["python"]
    psi = np.array([[2.0 + 0j]])
    factor = np.empty((1, 1))
    ref.local_decay(psi, np.array([[1.5]]), 0.25, 0.1, factor)
    expected = np.exp(-0.1 * (1.5 + 0.25 * 4.0))
    assert psi[0, 0] == pytest.approx(2 * expected, rel=1e-14)
    assert factor[0, 0] == pytest.approx(expected, rel=1e-14)


@pytest.mark.skipif("compiled" not in available_backends(),
                    reason="compiled kernels not built")
@pytest.mark.parametrize("with_gm,with_gp", [(False, False), (True, False),
                                             (False, True), (True, True)])
def test_phase_pair_parity(with_gm, with_gp):
    backends = available_backends()
    rng = np.random.default_rng(42)
    psi_m, psi_p, v_m, v_p, g_opt = _random_pair(rng)
    gm = g_opt if with_gm else None
    gp = 0.5 * g_opt if with_gp else None

    m1, p1 = psi_m.copy(), psi_p.copy()
    m2, p2 = psi_m.copy(), psi_p.copy()
    backends["python"].local_phase_pair(m1, p1, v_m, v_p, 0.31, 0.17, gm, gp,
                                        0.013)
    backends["compiled"].local_phase_pair(m2, p2, v_m, v_p, 0.31, 0.17, gm, gp,
                                          0.013)
    assert np.max(np.abs(m1 - m2)) < 1e-14
    assert np.max(np.abs(p1 - p2)) < 1e-14


@pytest.mark.skipif("compiled" not in available_backends(),
                    reason="compiled kernels not built")
def test_decay_parity():
    backends = available_backends()
    rng = np.random.default_rng(43)
    psi, _, v, _, _ = _random_pair(rng)
    f1 = np.empty(psi.shape)
    f2 = np.empty(psi.shape)
    p1, p2 = psi.copy(), psi.copy()
    backends["python"].local_decay(p1, v, 0.4, 0.02, f1)
    backends["compiled"].local_decay(p2, v, 0.4, 0.02, f2)
    assert np.max(np.abs(p1 - p2)) < 1e-14
    assert np.max(np.abs(f1 - f2)) < 1e-15
    # factor_out optional on both backends
    backends["python"].local_decay(p1, v, 0.4, 0.02)
    backends["compiled"].local_decay(p2, v, 0.4, 0.02)
    assert np.max(np.abs(p1 - p2)) < 1e-14


def test_norm_preserved_by_phase_kernel():
    rng = np.random.default_rng(44)
    psi_m, psi_p, v_m, v_p, g_opt = _random_pair(rng)
    n0 = np.sum(np.abs(psi_m)**2 + np.abs(psi_p)**2)
    from oinlsim.kernels import local_phase_pair
    local_phase_pair(psi_m, psi_p, v_m, v_p, 0.3, 0.2, None, g_opt, 0.05)
    n1 = np.sum(np.abs(psi_m)**2 + np.abs(psi_p)**2)
    assert n1 == pytest.approx(n0, rel=1e-13)
