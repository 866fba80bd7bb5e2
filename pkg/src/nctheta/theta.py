"""Theta series, Gaussian integrals and the quantum theta coefficients.

The inner product of two Gaussian family members against a translated
one factorizes into a product of one-dimensional theta-type lattice sums
(the b-factors) and a p-dimensional complex Gaussian integral.  Written
through the Hermitian form H on complex coordinates x = Omega w1 + w2,
the diagonal coefficients become b-products times exp(-(pi/2) H(x, x)),
which is exactly the coefficient family of the quantum theta element.

All series lengths are chosen deterministically from a geometric tail
majorant at tail_eps = 1e-15; nothing adapts to observed terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (BadTau, DimensionMismatch, DivergentIntegral,
                     GridMismatch)
from .heisenberg import GaussianVector, SampledVector, iter_ball
from .lattice import EmbeddingMap, LatticePoint, QuantumElement, _readonly

TAIL_EPS = 1e-15

# A one-dimensional lattice sum with max |Im z| = m/2 peaks at height
# about exp(pi m^2 / 4); magnitudes are compared on that scale when
# looking for structural zeros of the b-factor.
STRUCTURAL_ZERO_TOL = 1e-12


def _series_halfwidth(a: float, b: float, tail_eps: float) -> int:
    """Smallest N with sum_{|n|>N} exp(-pi a n^2 + 2 pi b n) < tail_eps.

    Deterministic: derived from the geometric majorant only, never from
    observed partial sums.
    """
    if a <= 0.0:
        raise BadTau("Im tau must be positive")
    log_tail = math.log(tail_eps)
    n = max(1, math.ceil(b / a) + 1)
    while True:
        log_ratio = -math.pi * a * (2 * n + 3) + 2 * math.pi * b
        if log_ratio < 0.0:
            ratio = math.exp(log_ratio)
            log_head = -math.pi * a * (n + 1) ** 2 + 2 * math.pi * b * (n + 1)
            if log_head + math.log(2.0 / (1.0 - ratio)) < log_tail:
                return n
        n += 1


def classical_theta(tau: complex, z: complex, tail_eps: float = TAIL_EPS) -> complex:
    """Jacobi theta series sum_n exp(i pi tau n^2 + 2 pi i n z), Im tau > 0."""
    tau = complex(tau)
    z = complex(z)
    if tau.imag <= 0.0:
        raise BadTau(f"Im tau must be positive, got {tau}")
    N = _series_halfwidth(tau.imag, abs(z.imag), tail_eps)
    n = np.arange(-N, N + 1)
    return complex(np.sum(np.exp(1j * np.pi * tau * n**2 + 2j * np.pi * n * z)))


def _shifted_lattice_sums(c1: np.ndarray, c0: np.ndarray,
                          tail_eps: float = TAIL_EPS):
    """Elementwise sum_n exp(-pi n^2 + c1 n + c0), evaluated peak-first.

    The summation index is recentered on the magnitude peak
    n0 = round(Re c1 / 2 pi), so the summed core stays O(1) and the
    overall scale exp(-pi n0^2 + c1 n0 + c0) is applied once; naive
    summation would overflow already for |Re c1| around 60 pi while the
    product with c0 is tiny.  Returns (values, core_magnitudes, n0).
    """
    c1 = np.asarray(c1, dtype=complex)
    c0 = np.asarray(c0, dtype=complex)
    n0 = np.round(c1.real / (2.0 * np.pi))
    rem = c1 - 2.0 * np.pi * n0
    bmax = float(np.max(np.abs(rem.real))) / (2.0 * np.pi) if c1.size else 0.0
    N = _series_halfwidth(1.0, bmax, tail_eps)
    j = np.arange(-N, N + 1, dtype=float)
    terms = np.exp(-np.pi * j[:, None] ** 2 + rem.ravel()[None, :] * j[:, None])
    core = terms.sum(axis=0).reshape(c1.shape)
    scale = np.exp(-np.pi * n0**2 + c1 * n0 + c0)
    return scale * core, np.abs(core), n0


def b_factor(r: float, m: int, tail_eps: float = TAIL_EPS) -> complex:
    """Lattice-sector factor e^{-pi m^2/2 - i pi m r} theta(i, -r + i m/2)."""
    r = float(r)
    m = int(m)
    vals, _, _ = _shifted_lattice_sums(
        np.array([-np.pi * m - 2j * np.pi * r]),
        np.array([-np.pi / 2 * m * m - 1j * np.pi * m * r]), tail_eps)
    return complex(vals[0])


def b_product_arrays(r: np.ndarray, m: np.ndarray, tail_eps: float = TAIL_EPS):
    """Componentwise b-factor products over (n, q) block arrays.

    Returns (products, min_normalized) where min_normalized is the
    smallest per-component magnitude rescaled by the natural peak height
    exp(pi m^2/4); values near zero signal a structural theta zero
    rather than ordinary Gaussian decay.
    """
    r = np.asarray(r, dtype=float)
    m = np.asarray(m, dtype=float)
    npts, q = r.shape
    if q == 0:
        return np.ones(npts, dtype=complex), np.full(npts, np.inf)
    c1 = -np.pi * m - 2j * np.pi * r
    c0 = -np.pi / 2 * m * m - 1j * np.pi * m * r
    b, core_mag, n0 = _shifted_lattice_sums(c1, c0, tail_eps)
    # |b| e^{pi m^2/4} = |core| e^{-pi (n0 + m/2)^2}, always overflow-free
    normalized = core_mag * np.exp(-np.pi * (n0 + m / 2.0) ** 2)
    return b.prod(axis=1), normalized.min(axis=1)


@dataclass(frozen=True, eq=False)
class HermitianFormContext:
    """Quadratic form Omega with cached inverse of its imaginary part."""

    omega: np.ndarray
    im_inv: np.ndarray = None

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=complex)
        p = omega.shape[0] if omega.ndim == 2 else (1 if omega.size else 0)
        omega = omega.reshape(p, p)
        if p and np.max(np.abs(omega - omega.T)) > 1e-12:
            raise ValueError("Omega must be symmetric")
        if p and np.min(np.linalg.eigvalsh(omega.imag)) <= 0.0:
            raise ValueError("Im Omega must be positive definite")
        im_inv = np.linalg.inv(omega.imag) if p else np.zeros((0, 0))
        if p and np.max(np.abs(im_inv @ omega.imag - np.eye(p))) > 1e-10:
            raise ValueError("Im Omega is too ill-conditioned to invert")
        object.__setattr__(self, "omega", _readonly(omega))
        object.__setattr__(self, "im_inv", _readonly(im_inv))

    @property
    def p(self) -> int:
        return self.omega.shape[0]


def complex_coordinates(ctx: HermitianFormContext, w1: np.ndarray,
                        w2: np.ndarray) -> np.ndarray:
    """x = Omega w1 + w2, vectorized over leading axes."""
    return np.asarray(w1) @ ctx.omega + np.asarray(w2)


def hermitian_form(ctx: HermitianFormContext, g: LatticePoint,
                   h: LatticePoint) -> complex:
    """Sesquilinear H(g, h) = x_g^T (Im Omega)^{-1} conj(x_h) on the
    continuous blocks; H(h, h) is real and nonnegative."""
    if g.p != ctx.p or h.p != ctx.p:
        raise DimensionMismatch("lattice points do not match the form dimension")
    if ctx.p == 0:
        return 0j
    xg = complex_coordinates(ctx, g.w1, g.w2)
    xh = complex_coordinates(ctx, h.w1, h.w2)
    return complex(xg @ ctx.im_inv @ np.conj(xh))


def hermitian_pairing_arrays(ctx: HermitianFormContext, xg: np.ndarray,
                             xh: np.ndarray) -> np.ndarray:
    """H on precomputed complex coordinates, broadcasting over rows."""
    if ctx.p == 0:
        shape = np.broadcast_shapes(np.shape(xg)[:-1], np.shape(xh)[:-1])
        return np.zeros(shape, dtype=complex)
    return np.sum((xg @ ctx.im_inv) * np.conj(xh), axis=-1)


def gaussian_integral(M: np.ndarray, v: np.ndarray) -> complex:
    """Closed form of the p-dimensional integral of exp(-s^T M s + v.s).

    M is complex symmetric with Re M positive definite; the value is
    pi^{p/2} det(M)^{-1/2} exp(v^T M^{-1} v / 4).  The inverse square
    root of the determinant is accumulated eigenvalue by eigenvalue with
    principal half-arguments, which tracks the branch continuously from
    the real positive definite case.
    """
    M = np.asarray(M, dtype=complex)
    v = np.asarray(v, dtype=complex)
    p = M.shape[0] if M.ndim == 2 else 0
    if p == 0:
        return 1.0 + 0j
    if np.min(np.linalg.eigvalsh(M.real)) <= 0.0:
        raise DivergentIntegral("Re M must be positive definite")
    lam = np.linalg.eigvals(M)
    det_inv_sqrt = np.exp(-0.5 * np.sum(np.log(lam)))
    return complex(np.pi ** (p / 2) * det_inv_sqrt
                   * np.exp(v @ np.linalg.solve(M, v) / 4.0))


def inner_product_closed(f: GaussianVector, g: GaussianVector,
                         h: LatticePoint, tail_eps: float = TAIL_EPS) -> complex:
    """<f, pi_h g>: integral over R^p and sum over Z^q in closed form.

    The continuous part is a complex Gaussian integral; each lattice
    component contributes a theta-type series evaluated deterministically
    to tail_eps.
    """
    if f.p != g.p or f.q != g.q:
        raise DimensionMismatch("vectors live on different spaces")
    if h.p != f.p or h.q != f.q:
        raise DimensionMismatch("lattice point does not match the vectors")
    p, q = f.p, f.q
    og_bar = np.conj(g.omega)
    lg_bar = np.conj(g.ell)
    mug_bar = np.conj(g.mu)
    # Continuous sector.
    M = -1j * np.pi * (f.omega - og_bar)
    v = 2j * np.pi * (f.ell - lg_bar - og_bar @ h.w1 - h.w2)
    const = np.exp(-1j * np.pi * (h.w1 @ h.w2 + h.w1 @ og_bar @ h.w1)
                   - 2j * np.pi * (lg_bar @ h.w1)) if p else 1.0
    cont = const * gaussian_integral(M, v)
    # Lattice sector, one peak-shifted theta series per component.
    latt = 1.0 + 0j
    if q:
        af = f.n0.astype(float)
        ag = g.n0.astype(float)
        mm = h.m.astype(float)
        beta = f.mu - mug_bar - h.r
        c1 = np.pi * (af + ag - mm) + 2j * np.pi * beta
        c0 = -np.pi / 2 * (af**2 + (mm - ag) ** 2)
        sums, _, _ = _shifted_lattice_sums(c1, c0, tail_eps)
        latt = np.prod(sums) * np.exp(
            -2j * np.pi * (mug_bar @ mm) - 1j * np.pi * (mm @ h.r))
    return complex(f.c0 * np.conj(g.c0) * cont * latt)


def inner_product_quadrature(fs: SampledVector, gs: SampledVector,
                             h: LatticePoint) -> complex:
    """Brute-force <f, pi_h g>: trapezoid rule over the grid of fs times a
    finite lattice sum, with pi_h applied by index shifts and explicit
    phases.

    The grid of gs must extend that of fs by at least the translation,
    with the same step, and every continuous shift must land on the grid.
    Error model: O(exp(-c L^2)) domain truncation plus O(exp(-pi N^2))
    lattice truncation; the step error is spectrally small for these
    integrands.
    """
    p, q = fs.p, fs.q
    if (p, q) != (gs.p, gs.q) or (h.p, h.q) != (p, q):
        raise GridMismatch("incompatible dimensions")
    if abs(fs.grid_step - gs.grid_step) > 1e-12:
        raise GridMismatch("grids must share one step")
    step = fs.grid_step
    ns_f = len(fs.s_axis)
    ns_g = len(gs.s_axis)
    offsets = []
    for j in range(p):
        off = (gs.grid_radius - fs.grid_radius + h.w1[j]) / step
        if abs(off - round(off)) > 1e-9:
            raise GridMismatch(f"shift {h.w1[j]} is not a multiple of the step")
        off = int(round(off))
        if off < 0 or off + ns_f > ns_g:
            raise GridMismatch("g grid does not cover the shifted domain")
        offsets.append(off)
    nn_f = 2 * fs.lattice_radius + 1
    for l in range(q):
        off = gs.lattice_radius - fs.lattice_radius + int(h.m[l])
        if off < 0 or off + nn_f > 2 * gs.lattice_radius + 1:
            raise GridMismatch("g lattice range does not cover the shifted range")
        offsets.append(off)
    shape = fs.values.shape
    sel = tuple(slice(off, off + (ns_f if ax < p else nn_f))
                for ax, off in enumerate(offsets))
    g_shift = gs.values[sel]
    expo = np.zeros(shape)
    for j in range(p):
        ax_shape = [1] * (p + q)
        ax_shape[j] = ns_f
        expo = expo + h.w2[j] * fs.s_axis.reshape(ax_shape)
    for l in range(q):
        ax_shape = [1] * (p + q)
        ax_shape[p + l] = nn_f
        expo = expo + h.r[l] * fs.n_axis.reshape(ax_shape)
    phase = np.exp(-2j * np.pi * expo
                   - 1j * np.pi * (h.w1 @ h.w2 + h.m @ h.r))
    weights = np.ones(shape)
    for j in range(p):
        ax_shape = [1] * (p + q)
        ax_shape[j] = ns_f
        w = np.ones(ns_f)
        w[0] = w[-1] = 0.5
        weights = weights * w.reshape(ax_shape)
    total = np.sum(fs.values * np.conj(g_shift) * phase * weights)
    return complex(total * step**p)


def quantum_theta(emb: EmbeddingMap, f: GaussianVector, R: int,
                  tail_eps: float = TAIL_EPS, drop_tol: float = 1e-300) -> QuantumElement:
    """Quantum theta element: normalized diagonal inner products on a ball.

    Coefficient at index k is sqrt(2^p det Im Omega) <f, pi_{Phi k} f>
    for |k|_inf <= R, evaluated independently per k and merged in sorted
    order.  Requires the centered family member (ell = 0, n0 = 0, mu = 0).
    """
    if R < 1:
        raise ValueError("truncation radius must be >= 1")
    if f.p != emb.p or f.q != emb.q:
        raise DimensionMismatch("vector does not match the embedding")
    if (np.any(f.ell != 0) or np.any(f.n0 != 0) or np.any(f.mu != 0)):
        raise ValueError("quantum theta requires the centered family member")
    norm = math.sqrt((2 ** emb.p) * float(np.linalg.det(f.omega.imag))) \
        if emb.p else 1.0
    coeffs = {}
    for k in iter_ball(emb.d, R):
        coeffs[k] = norm * inner_product_closed(f, f, emb.point(np.array(k)),
                                                tail_eps)
    return QuantumElement(embedding=emb, coeffs=coeffs, radius=R,
                          drop_tol=drop_tol)


def theta_coefficients(ctx: HermitianFormContext, emb: EmbeddingMap,
                       indices: np.ndarray, tail_eps: float = TAIL_EPS):
    """Closed coefficient formula b-product * exp(-(pi/2) H(x, x)) on an
    (n, d) array of indices.

    Returns (coefficients, min_normalized_b) where the second array
    feeds structural-zero (degeneracy) detection.
    """
    W1, W2, M, Rr = emb.blocks(indices)
    x = complex_coordinates(ctx, W1, W2)
    hvals = hermitian_pairing_arrays(ctx, x, x).real
    bt, min_norm = b_product_arrays(Rr, M, tail_eps)
    return bt * np.exp(-np.pi / 2 * hvals), min_norm


def decay_certificate(element: QuantumElement, tail_eps: float = TAIL_EPS,
                      safety: float = 0.95) -> dict:
    """Envelope |c_k| <= C exp(-rate |k|^2) and a bound on the dropped tail.

    The amplitude is the largest stored magnitude and the rate is the
    worst per-point Rayleigh rate over the stored support, shrunk by a
    safety factor, so the envelope stays valid along the slowest decay
    direction when extrapolated outside the ball.  The least-squares
    slope of the log-magnitude plot is reported as the decay diagnostic.
    """
    K, c = element.as_arrays()
    mags = np.abs(c)
    mask = mags > 0
    r2 = np.sum(K.astype(float) ** 2, axis=1)
    if np.sum(mask) < 2 or np.ptp(r2[mask]) == 0:
        return {"valid": False, "reason": "not enough support for a fit"}
    x = r2[mask]
    y = np.log(mags[mask])
    slope = float(np.polyfit(x, y, 1)[0])
    log_c = float(np.max(y))
    nonzero = x > 0
    rate = safety * float(np.min((log_c - y[nonzero]) / x[nonzero])) \
        if np.any(nonzero) else 0.0
    d = element.embedding.d
    R = element.radius
    tail = 0.0
    j = R + 1
    while j < R + 1000:
        count = (2 * j + 1) ** d - (2 * j - 1) ** d
        term = count * math.exp(min(log_c - rate * j * j, 700.0))
        tail += term
        if term < 1e-30:
            break
        j += 1
    return {
        "valid": bool(rate > 0),
        "rate": float(rate),
        "log_amplitude": log_c,
        "slope": slope,
        "tail_bound": float(tail),
    }
