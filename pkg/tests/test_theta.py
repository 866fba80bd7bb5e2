import numpy as np
import pytest

import nctheta as nc
from nctheta.errors import (BadTau, DivergentIntegral, GridMismatch)
from nctheta.heisenberg import GaussianVector
from nctheta.theta import (HermitianFormContext, b_product_arrays,
                           theta_coefficients)

# sum_n exp(-pi n^2), computed with 40-digit summation (mpmath), frozen.
THETA_I_0 = 1.086434811213308014575316
# square of the value above
THETA_I_0_SQ = 1.180340599016096226045338


def test_theta_value_at_origin():
    assert nc.classical_theta(1j, 0.0) == pytest.approx(THETA_I_0, abs=1e-12)


def test_theta_matches_extended_precision_oracle():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    rng = np.random.default_rng(0)
    for _ in range(5):
        tau = complex(rng.normal() * 0.3, 0.6 + rng.uniform(0, 1.5))
        z = complex(rng.normal(), rng.normal() * 0.8)
        oracle = mp.nsum(
            lambda n: mp.e ** (1j * mp.pi * tau * n**2 + 2j * mp.pi * n * z),
            [-mp.inf, mp.inf])
        ours = nc.classical_theta(tau, z)
        assert ours == pytest.approx(complex(oracle), rel=1e-12, abs=1e-12)


def test_theta_zero_and_periodicity():
    assert abs(nc.classical_theta(1j, (1 + 1j) / 2)) < 1e-12
    rng = np.random.default_rng(1)
    for _ in range(10):
        z = complex(rng.normal(), rng.normal() * 0.5)
        assert nc.classical_theta(1j, z + 1) == pytest.approx(
            nc.classical_theta(1j, z), rel=1e-12, abs=1e-12)


def test_theta_quasi_periodicity():
    rng = np.random.default_rng(2)
    for _ in range(10):
        tau = complex(rng.normal() * 0.2, 0.8 + rng.uniform(0, 1))
        z = complex(rng.normal(), rng.normal() * 0.5)
        lhs = nc.classical_theta(tau, z + tau)
        rhs = np.exp(-1j * np.pi * tau - 2j * np.pi * z) * nc.classical_theta(tau, z)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_theta_bad_tau():
    with pytest.raises(BadTau):
        nc.classical_theta(1.0 - 0.5j, 0.0)


def test_b_factor_values():
    assert nc.b_factor(0.0, 0) == pytest.approx(THETA_I_0, abs=1e-12)
    # independent series oracle for b(0.3, 1)
    n = np.arange(-30, 31)
    series = np.sum(np.exp(-np.pi * n**2 + 2j * np.pi * n * (-0.3 + 0.5j)))
    expected = np.exp(-np.pi / 2 - 1j * np.pi * 0.3) * series
    assert nc.b_factor(0.3, 1) == pytest.approx(expected, rel=1e-13)
    # theta zero: half-integer torus coordinate with odd integer shift
    assert abs(nc.b_factor(0.5, 1)) < 1e-14
    assert abs(nc.b_factor(0.5, 3)) < 1e-14
    assert abs(nc.b_factor(0.5, 2)) > 1e-3


def test_b_factor_lift_sign_contract():
    # shifting the torus coordinate by a full period flips odd-m factors
    rng = np.random.default_rng(3)
    for _ in range(10):
        r = rng.uniform(-1, 1)
        m = int(rng.integers(-4, 5))
        assert nc.b_factor(r + 1.0, m) == pytest.approx(
            (-1) ** m * nc.b_factor(r, m), rel=1e-12, abs=1e-14)


def test_b_factor_large_shift_no_overflow():
    # peak-shifted evaluation: the naive series peak exp(pi m^2/4) would
    # overflow doubles near |m| = 30 while the factor itself underflows
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        val = nc.b_factor(0.3, 40)
        assert val == 0.0 or abs(val) < 1e-300
        vals, norms = b_product_arrays(np.array([[0.3, 0.1]]),
                                       np.array([[40, -52]]))
        assert np.all(np.isfinite(norms))
        assert norms[0] > 1e-3  # not a structural zero, just tiny
    # moderate values still match the direct series
    n = np.arange(-40, 41)
    direct = np.exp(-np.pi / 2 * 36 - 1j * np.pi * 6 * 0.3) * np.sum(
        np.exp(-np.pi * n**2 + 2j * np.pi * n * (-0.3 + 3j)))
    assert nc.b_factor(0.3, 6) == pytest.approx(direct, rel=1e-12)


def test_b_product_structural_zero_detection():
    r = np.array([[0.5, 0.2], [0.3, 0.2]])
    m = np.array([[1, 0], [1, 0]])
    vals, norms = b_product_arrays(r, m)
    assert abs(vals[0]) < 1e-14 and norms[0] < 1e-12
    assert norms[1] > 1e-3


def test_hermitian_form_values(inst_1_0):
    emb, omega = inst_1_0
    ctx = HermitianFormContext(omega)
    zero = emb.point([0, 0])
    assert nc.hermitian_form(ctx, zero, zero) == 0
    rng = np.random.default_rng(4)
    for _ in range(20):
        g = emb.point(rng.integers(-4, 5, 2))
        h = emb.point(rng.integers(-4, 5, 2))
        hg = nc.hermitian_form(ctx, g, g)
        assert hg.imag == pytest.approx(0.0, abs=1e-12)
        assert hg.real == pytest.approx(g.w1[0] ** 2 + g.w2[0] ** 2, rel=1e-12) \
            or (g.w1[0] == 0 and g.w2[0] == 0)
        assert nc.hermitian_form(ctx, g, h) == pytest.approx(
            np.conj(nc.hermitian_form(ctx, h, g)), abs=1e-12)


def test_hermitian_form_positivity(inst_2_0):
    emb, omega = inst_2_0
    ctx = HermitianFormContext(omega)
    assert np.max(np.abs(ctx.im_inv @ omega.imag - np.eye(2))) < 1e-10
    rng = np.random.default_rng(5)
    for _ in range(30):
        k = rng.integers(-4, 5, 4)
        g = emb.point(k)
        val = nc.hermitian_form(ctx, g, g)
        assert val.imag == pytest.approx(0.0, abs=1e-10)
        if np.any(k != 0):
            assert val.real > 0
    assert nc.hermitian_form(ctx, emb.point([0] * 4), emb.point([0] * 4)) == 0


def _quadrature_gaussian(M, v, L, step):
    p = M.shape[0]
    ax = np.arange(-L, L + step / 2, step)
    if p == 1:
        integrand = np.exp(-M[0, 0] * ax**2 + v[0] * ax)
        return np.trapezoid(integrand, dx=step)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    quad = M[0, 0] * X**2 + (M[0, 1] + M[1, 0]) * X * Y + M[1, 1] * Y**2
    integrand = np.exp(-quad + v[0] * X + v[1] * Y)
    return np.trapezoid(np.trapezoid(integrand, dx=step), dx=step)


def test_gaussian_integral_against_quadrature():
    rng = np.random.default_rng(6)
    for trial in range(50):
        p = 1 if trial % 2 == 0 else 2
        a = rng.normal(size=(p, p))
        re = a @ a.T + 0.6 * np.eye(p)
        im = rng.normal(size=(p, p))
        im = (im + im.T) / 2
        M = re + 1j * im
        v = 0.8 * (rng.normal(size=p) + 1j * rng.normal(size=p))
        closed = nc.gaussian_integral(M, v)
        quad = _quadrature_gaussian(M, v, L=9.0, step=0.02 if p == 1 else 0.06)
        assert closed == pytest.approx(quad, rel=1e-8)


def test_gaussian_integral_divergent():
    with pytest.raises(DivergentIntegral):
        nc.gaussian_integral(np.array([[-1.0 + 0.5j]]), np.array([0j]))


def test_inner_product_diagonal_normalization(inst_1_2):
    emb, omega = inst_1_2
    f = GaussianVector.pure(omega, emb.q)
    val = nc.inner_product_closed(f, f, emb.point([0, 0, 0, 0]))
    norm = 1.0 / np.sqrt(2.0 * float(omega.imag[0, 0]))
    assert val == pytest.approx(norm * THETA_I_0_SQ, rel=1e-12)


def test_inner_product_worked_value():
    emb = nc.canonical_embedding(1, 0, theta=[0.5])
    f = GaussianVector.pure(np.array([[1j]]))
    # index (2, 0) has continuous blocks (1, 0)
    val = nc.inner_product_closed(f, f, emb.point([2, 0]))
    assert val == pytest.approx(np.exp(-np.pi / 2) / np.sqrt(2.0), rel=1e-12)


def _sampled_pair(emb, f, g, L, step, N, Lg, Ng):
    fs = nc.sample_on_grid(f, L, step, N)
    gs = nc.sample_on_grid(g, Lg, step, Ng)
    return fs, gs


def test_quadrature_matches_closed_p1q0(inst_1_0):
    emb, omega = inst_1_0
    f = GaussianVector.pure(omega)
    fs, gs = _sampled_pair(emb, f, f, 5.0, 0.05, 1, 7.5, 1)
    for k in [(0, 0), (1, 0), (0, 2), (-2, 1), (2, -2)]:
        h = emb.point(k)
        quad = nc.inner_product_quadrature(fs, gs, h)
        closed = nc.inner_product_closed(f, f, h)
        assert quad == pytest.approx(closed, rel=1e-8), k


def test_quadrature_matches_closed_p1q2(inst_1_2):
    emb, omega = inst_1_2
    f = GaussianVector.pure(omega, emb.q)
    fs, gs = _sampled_pair(emb, f, f, 5.0, 0.05, 7, 7.5, 12)
    rng = np.random.default_rng(7)
    for _ in range(20):
        k = rng.integers(-2, 3, 4)
        h = emb.point(k)
        quad = nc.inner_product_quadrature(fs, gs, h)
        closed = nc.inner_product_closed(f, f, h)
        assert quad == pytest.approx(closed, rel=1e-6), k


def test_quadrature_general_vectors(inst_1_2):
    # non-centered family members (after operator action) still agree
    emb, omega = inst_1_2
    base = GaussianVector.pure(omega, emb.q)
    f = nc.apply_heisenberg(emb.point([1, 0, 1, 0]), base)
    g = nc.apply_heisenberg(emb.point([0, 1, 0, 1]), base)
    fs, gs = _sampled_pair(emb, f, g, 5.0, 0.05, 7, 7.5, 12)
    for k in [(0, 0, 0, 0), (1, 1, 0, 0), (0, 0, 1, -1), (-1, 0, -1, 1)]:
        h = emb.point(k)
        quad = nc.inner_product_quadrature(fs, gs, h)
        closed = nc.inner_product_closed(f, g, h)
        assert quad == pytest.approx(closed, rel=1e-6), k


def test_quadrature_zero_vector(inst_1_0):
    emb, omega = inst_1_0
    f = GaussianVector.pure(omega)
    zero = GaussianVector(p=1, q=0, omega=omega, ell=[0], c0=0.0, n0=[], mu=[])
    fs = nc.sample_on_grid(zero, 5.0, 0.05, 1)
    gs = nc.sample_on_grid(f, 7.5, 0.05, 1)
    assert nc.inner_product_quadrature(fs, gs, emb.point([1, 0])) == 0


def test_quadrature_grid_mismatch(inst_1_0):
    emb, omega = inst_1_0
    f = GaussianVector.pure(omega)
    fs = nc.sample_on_grid(f, 5.0, 0.05, 1)
    gs_small = nc.sample_on_grid(f, 5.5, 0.05, 1)
    with pytest.raises(GridMismatch):
        # shift 0.5*3 = 1.5 exceeds the 0.5 margin
        nc.inner_product_quadrature(fs, gs_small, emb.point([3, 0]))
    gs_step = nc.sample_on_grid(f, 7.5, 0.075, 1)
    with pytest.raises(GridMismatch):
        nc.inner_product_quadrature(fs, gs_step, emb.point([1, 0]))


def test_quantum_theta_center_coefficients(inst_1_0, inst_1_2):
    emb, omega = inst_1_0
    th = nc.quantum_theta(emb, GaussianVector.pure(omega), 2)
    assert th.coeff((0, 0)) == pytest.approx(1.0, rel=1e-12)
    emb2, omega2 = inst_1_2
    th2 = nc.quantum_theta(emb2, GaussianVector.pure(omega2, 2), 2)
    assert th2.coeff((0, 0, 0, 0)) == pytest.approx(THETA_I_0_SQ, rel=1e-12)


def test_quantum_theta_requires_centered_member(inst_1_0):
    emb, omega = inst_1_0
    off = GaussianVector(p=1, q=0, omega=omega, ell=[0.5], c0=1.0, n0=[], mu=[])
    with pytest.raises(ValueError):
        nc.quantum_theta(emb, off, 2)


def test_quantum_theta_matches_quadrature(inst_1_2):
    emb, omega = inst_1_2
    f = GaussianVector.pure(omega, emb.q)
    th = nc.quantum_theta(emb, f, 2)
    norm = np.sqrt(2.0 * float(omega.imag[0, 0]))
    fs, gs = _sampled_pair(emb, f, f, 5.0, 0.05, 7, 7.5, 12)
    rng = np.random.default_rng(8)
    for _ in range(10):
        k = rng.integers(-2, 3, 4)
        quad = norm * nc.inner_product_quadrature(fs, gs, emb.point(k))
        assert th.coeff(tuple(k)) == pytest.approx(quad, rel=1e-6, abs=1e-12)


def test_quantum_theta_coefficient_formula(inst_1_2):
    # inner-product route equals the b-product/Hermitian-form formula
    emb, omega = inst_1_2
    ctx = HermitianFormContext(omega)
    th = nc.quantum_theta(emb, GaussianVector.pure(omega, emb.q), 3)
    K, coeffs = th.as_arrays()
    closed, _ = theta_coefficients(ctx, emb, K)
    assert np.max(np.abs(coeffs - closed)) < 1e-12
    keep = np.abs(closed) > 1e-13
    phases = np.abs(np.angle(coeffs[keep] / closed[keep]))
    assert np.max(phases) < 1e-10


def test_quantum_theta_decay_certificate(inst_1_0):
    emb, omega = inst_1_0
    th = nc.quantum_theta(emb, GaussianVector.pure(omega), 4)
    cert = nc.decay_certificate(th)
    assert cert["valid"] and cert["slope"] < 0
    # the fitted envelope must dominate the mass actually dropped between
    # the truncation ball and a larger one
    wide = nc.quantum_theta(emb, GaussianVector.pure(omega), 6)
    dropped = sum(abs(c) for k, c in wide.coeffs.items()
                  if max(abs(x) for x in k) > 4)
    assert dropped <= cert["tail_bound"]
    # fast-decaying instance reaches certificate level 1e-10 at R = 4
    emb_fast = nc.canonical_embedding(1, 0, theta=[2.0])
    th_fast = nc.quantum_theta(emb_fast, GaussianVector.pure(omega), 4)
    cert_fast = nc.decay_certificate(th_fast)
    assert cert_fast["valid"] and cert_fast["tail_bound"] < 1e-10
