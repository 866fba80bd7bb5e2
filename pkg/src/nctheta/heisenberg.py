"""Module vectors and the operator calculus acting on them.

The ambient space is S(R^p x Z^q).  The closed Gaussian family

    f(s, n) = c0 * exp(i pi s^T Omega s + 2 pi i ell.s)
                 * exp(-(pi/2) |n - n0|^2 + 2 pi i mu.n)

is stable under the Heisenberg operators of lattice points, so every
operation here returns another family member (possibly with a degree-one
polynomial prefactor, for connections).  SampledVector holds plain grid
evaluations and serves as the brute-force oracle representation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GridTooLarge, SingularEmbedding
from .lattice import EmbeddingMap, LatticePoint, _readonly

SYM_TOL = 1e-12
GRID_BUDGET = 10_000_000


@dataclass(frozen=True, eq=False)
class GaussianVector:
    """Member of the closed Gaussian family on R^p x Z^q.

    Omega is complex symmetric with positive definite imaginary part;
    ell is a linear phase over the continuous variables, n0 an integer
    lattice center and mu a (complex) linear phase over the lattice
    variables.  c0 collects all constant factors.
    """

    p: int
    q: int
    omega: np.ndarray
    ell: np.ndarray
    c0: complex
    n0: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=complex).reshape(self.p, self.p)
        ell = np.asarray(self.ell, dtype=complex).reshape(self.p)
        n0 = np.asarray(self.n0).reshape(self.q)
        mu = np.asarray(self.mu, dtype=complex).reshape(self.q)
        if self.p:
            if np.max(np.abs(omega - omega.T)) > SYM_TOL:
                raise ValueError("Omega must be symmetric")
            if np.min(np.linalg.eigvalsh(omega.imag)) <= 0.0:
                raise ValueError("Im Omega must be positive definite")
        if self.q and not np.allclose(n0, np.round(n0), atol=SYM_TOL):
            raise ValueError("lattice center n0 must be integral")
        object.__setattr__(self, "omega", _readonly(omega))
        object.__setattr__(self, "ell", _readonly(ell))
        object.__setattr__(self, "c0", complex(self.c0))
        object.__setattr__(self, "n0", _readonly(np.round(np.asarray(n0, dtype=float)).astype(int)))
        object.__setattr__(self, "mu", _readonly(mu))

    @classmethod
    def pure(cls, omega, q: int = 0) -> "GaussianVector":
        """The centered member exp(i pi s^T Omega s - (pi/2)|n|^2)."""
        omega = np.asarray(omega, dtype=complex)
        p = omega.shape[0] if omega.ndim == 2 else (1 if omega.size == 1 else 0)
        omega = omega.reshape(p, p)
        return cls(p=p, q=q, omega=omega, ell=np.zeros(p), c0=1.0 + 0j,
                   n0=np.zeros(q, dtype=int), mu=np.zeros(q))

    def evaluate(self, s, n) -> complex:
        """Pointwise value at s in R^p, n in Z^q."""
        s = np.asarray(s, dtype=float).reshape(self.p)
        n = np.asarray(n, dtype=float).reshape(self.q)
        expo = 1j * np.pi * s @ self.omega @ s + 2j * np.pi * self.ell @ s
        dn = n - self.n0
        expo += -np.pi / 2 * dn @ dn + 2j * np.pi * self.mu @ n
        return self.c0 * complex(np.exp(expo))


def apply_heisenberg(h: LatticePoint, f: GaussianVector) -> GaussianVector:
    """Heisenberg (phase-space translation) operator of h acting on f.

    Pointwise this is

        (pi_h f)(s, n) = exp(2 pi i (w2.s + r.n) + i pi (w1.w2 + m.r))
                         * f(s + w1, n + m),

    which stays inside the family: Omega is unchanged, ell picks up
    Omega w1 + w2, the lattice center shifts to n0 - m, mu picks up r,
    and all constant factors flow into c0.
    """
    if h.p != f.p or h.q != f.q:
        raise DimensionMismatch("lattice point and vector dimensions differ")
    half = h.w1 @ h.w2 + h.m @ h.r
    const = np.exp(
        1j * np.pi * (h.w1 @ f.omega @ h.w1 + half)
        + 2j * np.pi * (f.ell @ h.w1 + f.mu @ h.m))
    return GaussianVector(
        p=f.p, q=f.q, omega=f.omega,
        ell=f.ell + f.omega @ h.w1 + h.w2,
        c0=f.c0 * complex(const),
        n0=f.n0 - h.m,
        mu=f.mu + h.r)


def apply_generator(emb: EmbeddingMap, j: int, f: GaussianVector) -> GaussianVector:
    """Action of the j-th algebra generator (0-based), i.e. the Heisenberg
    operator of the j-th embedding column."""
    if not 0 <= j < emb.d:
        raise DimensionMismatch(f"generator index {j} out of range for d={emb.d}")
    e = np.zeros(emb.d, dtype=int)
    e[j] = 1
    return apply_heisenberg(emb.point(e), f)


def connection_matrix(emb: EmbeddingMap) -> np.ndarray:
    """Inverse of the upper square block of Phi; the rows drive the connections."""
    xt = emb.x_tilde
    B = np.linalg.inv(xt)
    if np.max(np.abs(B @ xt - np.eye(emb.d))) > 1e-10:
        raise SingularEmbedding("connection matrix residual exceeds 1e-10")
    return B


@dataclass(frozen=True, eq=False)
class LinearGaussian:
    """A Gaussian family member times a degree-one polynomial prefactor:

        (coef_s . s + coef_n . n + const) * base(s, n).
    """

    coef_s: np.ndarray
    coef_n: np.ndarray
    const: complex
    base: GaussianVector

    def evaluate(self, s, n) -> complex:
        s = np.asarray(s, dtype=float).reshape(self.base.p)
        n = np.asarray(n, dtype=float).reshape(self.base.q)
        poly = self.coef_s @ s + self.coef_n @ n + self.const
        return complex(poly * self.base.evaluate(s, n))

    def plus(self, other: "LinearGaussian") -> "LinearGaussian":
        """Sum of two prefactors over the same base vector."""
        if other.base is not self.base:
            raise DimensionMismatch("prefactor sums require an identical base")
        return LinearGaussian(coef_s=self.coef_s + other.coef_s,
                              coef_n=self.coef_n + other.coef_n,
                              const=self.const + other.const, base=self.base)


def _connection_row(emb: EmbeddingMap, brow: np.ndarray, f: GaussianVector) -> LinearGaussian:
    p, q = emb.p, emb.q
    two_pi_i = 2j * np.pi
    coef_s = -two_pi_i * brow[:p] + two_pi_i * (brow[p:2 * p] @ f.omega)
    coef_n = -two_pi_i * brow[2 * p:]
    const = two_pi_i * (brow[p:2 * p] @ f.ell)
    return LinearGaussian(coef_s=coef_s, coef_n=coef_n, const=complex(const), base=f)


def apply_connection(emb: EmbeddingMap, j: int, f: GaussianVector) -> LinearGaussian:
    """The j-th connection (0-based) acting on f.

    With B the inverse square block, row j acts as
    -2 pi i (sum_k B[j,k] s_k + sum_l B[j,2p+l] n_l) plus the derivative
    part sum_k B[j,p+k] d/ds_k; on the Gaussian family the derivative
    contributes the linear prefactor 2 pi i ((Omega s)_k + ell_k).
    """
    if not 0 <= j < emb.d:
        raise DimensionMismatch(f"connection index {j} out of range for d={emb.d}")
    if f.p != emb.p or f.q != emb.q:
        raise DimensionMismatch("vector does not match embedding dimensions")
    B = connection_matrix(emb)
    return _connection_row(emb, B[j], f)


def connection_combination(emb: EmbeddingMap, weights, f: GaussianVector) -> LinearGaussian:
    """Complex combination sum_j weights[j] * (connection_j f) in closed form."""
    w = np.asarray(weights, dtype=complex)
    if w.shape != (emb.d,):
        raise DimensionMismatch(f"weights must have length {emb.d}")
    B = connection_matrix(emb)
    return _connection_row(emb, w @ B, f)


def heisenberg_on_linear(h: LatticePoint, lg: LinearGaussian) -> LinearGaussian:
    """Heisenberg operator applied to a polynomial-prefactor vector.

    The operator shifts the polynomial argument: P(s, n) becomes
    P(s + w1, n + m) while the base transforms as usual.
    """
    base = apply_heisenberg(h, lg.base)
    const = lg.const + lg.coef_s @ h.w1 + lg.coef_n @ h.m
    return LinearGaussian(coef_s=lg.coef_s, coef_n=lg.coef_n,
                          const=complex(const), base=base)


@dataclass(frozen=True, eq=False)
class SampledVector:
    """Dense evaluation on {-L, -L+step, ..., L}^p x {-N, ..., N}^q."""

    p: int
    q: int
    grid_radius: float
    grid_step: float
    lattice_radius: int
    values: np.ndarray

    def __post_init__(self):
        ratio = 2.0 * self.grid_radius / self.grid_step
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("step must divide 2L evenly")
        values = np.asarray(self.values, dtype=complex)
        if not np.all(np.isfinite(values.real)) or not np.all(np.isfinite(values.imag)):
            raise ValueError("sampled values must be finite")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def s_axis(self) -> np.ndarray:
        npts = int(round(2.0 * self.grid_radius / self.grid_step)) + 1
        return -self.grid_radius + self.grid_step * np.arange(npts)

    @property
    def n_axis(self) -> np.ndarray:
        return np.arange(-self.lattice_radius, self.lattice_radius + 1)

    def to_csv(self, path):
        """Debug export: one row per grid point (s..., n..., re, im)."""
        s_ax, n_ax = self.s_axis, self.n_axis
        with open(path, "w") as fh:
            fh.write(",".join([f"s{i+1}" for i in range(self.p)]
                              + [f"n{i+1}" for i in range(self.q)]
                              + ["re", "im"]) + "\n")
            for idx in np.ndindex(self.values.shape):
                coords = [f"{s_ax[idx[i]]:.17g}" for i in range(self.p)]
                coords += [str(int(n_ax[idx[self.p + i]])) for i in range(self.q)]
                v = self.values[idx]
                fh.write(",".join(coords + [f"{v.real:.17g}", f"{v.imag:.17g}"]) + "\n")


def sample_on_grid(f: GaussianVector, grid_radius: float, step: float,
                   lattice_radius: int, budget: int = GRID_BUDGET) -> SampledVector:
    """Evaluate a Gaussian family member on a regular grid.

    Raises GridTooLarge when the total point count exceeds the budget.
    """
    if grid_radius <= 0 or step <= 0 or lattice_radius <= 0:
        raise ValueError("grid parameters must be positive")
    ratio = 2.0 * grid_radius / step
    if abs(ratio - round(ratio)) > 1e-9:
        raise ValueError("step must divide 2L evenly")
    ns = int(round(ratio)) + 1
    nn = 2 * lattice_radius + 1
    total = (ns ** f.p) * (nn ** f.q)
    if total > budget:
        raise GridTooLarge(f"grid with {total} points exceeds budget {budget}")
    s_ax = -grid_radius + step * np.arange(ns)
    n_ax = np.arange(-lattice_radius, lattice_radius + 1)
    axes = [s_ax] * f.p + [n_ax.astype(float)] * f.q
    if axes:
        mesh = np.meshgrid(*axes, indexing="ij")
    else:
        mesh = []
    expo = np.zeros((ns,) * f.p + (nn,) * f.q, dtype=complex)
    for a in range(f.p):
        expo += 2j * np.pi * f.ell[a] * mesh[a]
        for b in range(f.p):
            expo += 1j * np.pi * f.omega[a, b] * mesh[a] * mesh[b]
    for a in range(f.q):
        dn = mesh[f.p + a] - f.n0[a]
        expo += -np.pi / 2 * dn * dn + 2j * np.pi * f.mu[a] * mesh[f.p + a]
    values = f.c0 * np.exp(expo)
    return SampledVector(p=f.p, q=f.q, grid_radius=grid_radius, grid_step=step,
                         lattice_radius=lattice_radius, values=values)


def iter_ball(d: int, radius: int):
    """Lexicographic iterator over integer vectors with |k|_inf <= radius."""
    return itertools.product(range(-radius, radius + 1), repeat=d)
