"""Lattice embeddings into phase space and the twisted group algebra.

A real (2p+2q) x (2p+q) matrix Phi embeds Z^d, d = 2p+q, as a lattice D
inside R^p x R^p* x Z^q x T^q.  Composing the Heisenberg operators of two
lattice points produces a unit-modulus bicharacter alpha on D; finite
formal sums over D with the alpha-twisted product are the truncated
elements of the deformed torus algebra that this package manipulates.

Block convention for rows of Phi: the first p rows are the translation
part (R^p), the next p rows the modulation part (R^p*), then q integer
rows (Z^q) and q torus rows (T^q).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularEmbedding, SingularQ, ZeroTheta

INT_TOL = 1e-12
DET_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EmbeddingMap:
    """Embedding matrix Phi of shape (2p+2q, 2p+q).

    Invariants checked at construction: the q integer rows are integral
    to 1e-12, and the upper square block (first 2p+q rows) is invertible,
    with |det| > 1e-10 after row-norm scaling.
    """

    p: int
    q: int
    phi: np.ndarray

    def __post_init__(self):
        p, q = self.p, self.q
        if p < 0 or q < 0 or p + q < 1:
            raise ValueError("need p >= 0, q >= 0 and p + q >= 1")
        phi = np.asarray(self.phi, dtype=float)
        if phi.shape != (2 * p + 2 * q, 2 * p + q):
            raise DimensionMismatch(
                f"phi must be {(2 * p + 2 * q, 2 * p + q)}, got {phi.shape}")
        int_rows = phi[2 * p:2 * p + q]
        if q and np.max(np.abs(int_rows - np.round(int_rows))) > INT_TOL:
            raise ValueError("integer-block rows of phi are not integral")
        object.__setattr__(self, "phi", _readonly(phi))
        xt = self.x_tilde
        norms = np.linalg.norm(xt, axis=1)
        if np.any(norms == 0.0) or abs(np.linalg.det(xt / norms[:, None])) <= DET_TOL:
            raise SingularEmbedding("upper square block of phi is numerically singular")

    @property
    def d(self) -> int:
        return 2 * self.p + self.q

    @property
    def x_tilde(self) -> np.ndarray:
        """The square (2p+q) x (2p+q) block whose inverse drives the connections."""
        return self.phi[: self.d]

    def point(self, index) -> "LatticePoint":
        """Map an integer vector to its lattice point with block decomposition."""
        k = np.asarray(index)
        if k.shape != (self.d,):
            raise DimensionMismatch(f"index must have length {self.d}, got {k.shape}")
        if not np.allclose(k, np.round(k), atol=INT_TOL):
            raise ValueError("lattice index must be integral")
        k = np.round(k).astype(int)
        h = self.phi @ k
        p, q = self.p, self.q
        m = h[2 * p:2 * p + q]
        return LatticePoint(
            index=_readonly(k),
            w1=_readonly(h[:p]),
            w2=_readonly(h[p:2 * p]),
            m=_readonly(np.round(m).astype(int)),
            r=_readonly(h[2 * p + q:]),
        )

    def blocks(self, indices: np.ndarray):
        """Vectorized block decomposition for an (n, d) array of integer indices.

        Returns (w1, w2, m, r) with shapes (n, p), (n, p), (n, q), (n, q).
        """
        K = np.asarray(indices, dtype=float)
        if K.ndim != 2 or K.shape[1] != self.d:
            raise DimensionMismatch(f"indices must be (n, {self.d})")
        H = K @ self.phi.T
        p, q = self.p, self.q
        m = np.round(H[:, 2 * p:2 * p + q]).astype(int)
        return H[:, :p], H[:, p:2 * p], m, H[:, 2 * p + q:]


@dataclass(frozen=True, eq=False)
class LatticePoint:
    """A point h = Phi k of the lattice, split into (w1, w2, m, r) blocks."""

    index: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    m: np.ndarray
    r: np.ndarray

    @property
    def p(self) -> int:
        return len(self.w1)

    @property
    def q(self) -> int:
        return len(self.m)


def canonical_embedding(p: int, q: int, theta=None, Q=None, Delta=None) -> EmbeddingMap:
    """Block-diagonal embedding diag(Theta, I_p, Q, Delta).

    Theta = diag(theta) and the identity fill the 2p continuous rows; the
    integer matrix Q and the real matrix Delta fill the 2q lattice/torus
    rows.  Raises ZeroTheta for a vanishing theta_j and SingularQ for
    det Q = 0.
    """
    theta = np.zeros(0) if theta is None else np.asarray(theta, dtype=float)
    if theta.shape != (p,):
        raise DimensionMismatch(f"theta must have length {p}")
    if p and np.any(theta == 0.0):
        raise ZeroTheta("every theta_j must be nonzero")
    if q:
        Q = np.asarray(Q, dtype=float)
        Delta = np.asarray(Delta, dtype=float)
        if Q.shape != (q, q) or Delta.shape != (q, q):
            raise DimensionMismatch(f"Q and Delta must be {q}x{q}")
        if np.max(np.abs(Q - np.round(Q))) > INT_TOL:
            raise ValueError("Q must be an integer matrix")
        if round(abs(np.linalg.det(Q))) < 1:
            raise SingularQ("Q must be invertible over the rationals")
    phi = np.zeros((2 * p + 2 * q, 2 * p + q))
    if p:
        phi[:p, :p] = np.diag(theta)
        phi[p:2 * p, p:2 * p] = np.eye(p)
    if q:
        phi[2 * p:2 * p + q, 2 * p:] = Q
        phi[2 * p + q:, 2 * p:] = Delta
    return EmbeddingMap(p=p, q=q, phi=phi)


def lattice_point(emb: EmbeddingMap, index) -> LatticePoint:
    """Alias for EmbeddingMap.point."""
    return emb.point(index)


def _check_same_dims(x: LatticePoint, y: LatticePoint):
    if x.p != y.p or x.q != y.q:
        raise DimensionMismatch("lattice points from different embeddings")


def cocycle_exponent(x: LatticePoint, y: LatticePoint) -> float:
    """Antisymmetric pairing S(x, y) with alpha(x, y) = exp(i pi S(x, y))."""
    _check_same_dims(x, y)
    return float(x.w1 @ y.w2 + x.m @ y.r - y.w1 @ x.w2 - y.m @ x.r)


def cocycle(x: LatticePoint, y: LatticePoint) -> complex:
    """Unit-modulus bicharacter alpha measuring operator non-commutativity.

    Fixed so that composing the Heisenberg operators of x and y equals
    alpha(x, y) times the operator of x + y; see apply_heisenberg.
    """
    return complex(np.exp(1j * np.pi * cocycle_exponent(x, y)))


def cocycle_exponent_arrays(xblocks, yblocks) -> np.ndarray:
    """Vectorized cocycle exponent over block tuples (w1, w2, m, r).

    Each block may be a single vector or an (n, len) array; the two sides
    broadcast against each other along the leading axis.
    """
    w1x, w2x, mx, rx = xblocks
    w1y, w2y, my, ry = yblocks
    return (np.sum(w1x * w2y, axis=-1) + np.sum(mx * ry, axis=-1)
            - np.sum(w1y * w2x, axis=-1) - np.sum(my * rx, axis=-1))


def induced_theta(emb: EmbeddingMap) -> np.ndarray:
    """Noncommutativity matrix of the generators: U_i U_j = e^{2 pi i t_ij} U_j U_i.

    Entry (i, j) is the cocycle exponent of the i-th and j-th embedding
    columns; built as an exact antisymmetrization A - A^T.
    """
    p, q = emb.p, emb.q
    W1 = emb.phi[:p]
    W2 = emb.phi[p:2 * p]
    M = emb.phi[2 * p:2 * p + q]
    R = emb.phi[2 * p + q:]
    A = W1.T @ W2 + M.T @ R
    return A - A.T


@dataclass(frozen=True, eq=False)
class QuantumElement:
    """Finite twisted formal sum over the lattice, truncated to a sup-norm ball.

    Coefficients are stored in a map keyed by integer index tuples; every
    stored key satisfies |k|_inf <= radius and every stored coefficient has
    magnitude >= drop_tol (default 1e-300, so effectively nothing is
    dropped unless a larger threshold is requested).
    """

    embedding: EmbeddingMap
    coeffs: dict
    radius: int
    drop_tol: float = 1e-300

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        d = self.embedding.d
        clean = {}
        for k, c in self.coeffs.items():
            key = tuple(int(x) for x in k)
            if len(key) != d:
                raise DimensionMismatch(f"key {key} has wrong length (want {d})")
            if max((abs(x) for x in key), default=0) > self.radius:
                raise ValueError(f"key {key} outside radius {self.radius}")
            c = complex(c)
            if abs(c) >= self.drop_tol:
                clean[key] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def basis(cls, emb: EmbeddingMap, index, radius: int | None = None) -> "QuantumElement":
        """The basis element e(k) with unit coefficient at the given index."""
        key = tuple(int(x) for x in np.asarray(index))
        rad = max((abs(x) for x in key), default=0) if radius is None else radius
        return cls(embedding=emb, coeffs={key: 1.0 + 0j}, radius=rad)

    @classmethod
    def identity(cls, emb: EmbeddingMap) -> "QuantumElement":
        return cls.basis(emb, np.zeros(emb.d, dtype=int))

    def coeff(self, key) -> complex:
        return self.coeffs.get(tuple(int(x) for x in key), 0j)

    def support(self) -> list:
        return sorted(self.coeffs)

    def scaled(self, factor: complex) -> "QuantumElement":
        return QuantumElement(
            embedding=self.embedding,
            coeffs={k: factor * c for k, c in self.coeffs.items()},
            radius=self.radius, drop_tol=self.drop_tol)

    def as_arrays(self):
        """Support as an (n, d) int array plus matching complex coefficients."""
        keys = self.support()
        K = np.array(keys, dtype=int).reshape(len(keys), self.embedding.d)
        c = np.array([self.coeffs[k] for k in keys], dtype=complex)
        return K, c

    def multiply(self, other: "QuantumElement") -> "QuantumElement":
        """Twisted product: e(k1) e(k2) = alpha(Phi k1, Phi k2) e(k1 + k2)."""
        if other.embedding is not self.embedding and not (
                self.embedding.p == other.embedding.p
                and self.embedding.q == other.embedding.q
                and np.array_equal(self.embedding.phi, other.embedding.phi)):
            raise DimensionMismatch("elements built over different embeddings")
        emb = self.embedding
        pa = {k: emb.point(np.array(k)) for k in self.coeffs}
        pb = {k: emb.point(np.array(k)) for k in other.coeffs}
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            x = pa[k1]
            for k2, c2 in other.coeffs.items():
                alpha = cocycle(x, pb[k2])
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, 0j) + c1 * c2 * alpha
        return QuantumElement(embedding=emb, coeffs=out,
                              radius=self.radius + other.radius,
                              drop_tol=min(self.drop_tol, other.drop_tol))

    def __mul__(self, other):
        if isinstance(other, QuantumElement):
            return self.multiply(other)
        return NotImplemented

    def to_dict(self) -> dict:
        """Serialization with keys sorted lexicographically."""
        return {
            "radius": int(self.radius),
            "coeffs": [
                {"k": list(k), "re": self.coeffs[k].real, "im": self.coeffs[k].imag}
                for k in self.support()
            ],
        }

    @classmethod
    def from_dict(cls, emb: EmbeddingMap, data: dict) -> "QuantumElement":
        coeffs = {tuple(int(x) for x in row["k"]): complex(row["re"], row["im"])
                  for row in data["coeffs"]}
        return cls(embedding=emb, coeffs=coeffs, radius=int(data["radius"]))


def qel_multiply(a: QuantumElement, b: QuantumElement) -> QuantumElement:
    """Alias for QuantumElement.multiply."""
    return a.multiply(b)


def embedding_from_config(cfg: dict) -> EmbeddingMap:
    """Build an embedding from its JSON form.

    Accepts either canonical parameters {"p", "q", "theta", "Q", "Delta"}
    or a raw matrix {"p", "q", "phi"}; p and q are always explicit.
    """
    if "phi" in cfg:
        phi = np.asarray(cfg["phi"], dtype=float)
        if "p" in cfg and "q" in cfg:
            p, q = int(cfg["p"]), int(cfg["q"])
        else:
            raise ValueError("raw phi configs must carry p and q")
        return EmbeddingMap(p=p, q=q, phi=phi)
    p, q = int(cfg["p"]), int(cfg["q"])
    return canonical_embedding(
        p, q,
        theta=cfg.get("theta") if p else None,
        Q=cfg.get("Q") if q else None,
        Delta=cfg.get("Delta") if q else None,
    )
