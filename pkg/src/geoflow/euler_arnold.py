"""Euler-Arnold and Lie-Poisson machinery on a finite-dimensional Lie algebra.

An algebra is given by structure constants in a fixed basis ``e_1..e_d``::

    [e_i, e_j] = sum_k c[i, j, k] e_k

Vectors (velocities) hold coordinates in that basis; covectors (momenta)
hold dual-basis coordinates, so the natural pairing ``(m, w)`` is the dot
product.  The inertia operator ``A`` is the symmetric positive-definite
matrix taking velocities to momenta, and the metric is ``<a, b> = (A a).b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import lie_core
from .errors import DimensionError, NonFiniteError, SingularInertiaError

ScalarField = Callable[[np.ndarray], float]

JACOBI_TOL = 1e-12
INVOLUTION_THRESHOLD = 1e-5


@dataclass(frozen=True)
class AlgebraSpec:
    """Lie algebra through its structure constants.

    ``pairing`` is the Gram matrix of a chosen inner product; it is used to
    identify vectors with covectors (``pairing @ v``).  ``basis`` optionally
    holds matrices realising the basis, for matrix Lie algebras.
    """

    structure: np.ndarray
    pairing: np.ndarray
    basis: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.structure, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise DimensionError(f"structure constants must have shape (d, d, d), got {c.shape}")
        d = c.shape[0]
        P = np.asarray(self.pairing, dtype=float)
        if P.shape != (d, d):
            raise DimensionError(f"pairing must be {d}x{d}, got {P.shape}")
        scale = max(1.0, float(np.abs(c).max()))
        if np.abs(c + c.transpose(1, 0, 2)).max() > JACOBI_TOL * scale:
            raise DimensionError("structure constants are not antisymmetric")
        if jacobi_defect(c) > JACOBI_TOL * scale**2:
            raise DimensionError("structure constants violate the Jacobi identity")
        if np.abs(P - P.T).max() > 1e-12 * max(1.0, np.abs(P).max()):
            raise DimensionError("pairing must be symmetric")
        try:
            np.linalg.cholesky(P)
        except np.linalg.LinAlgError:
            raise DimensionError("pairing must be positive definite") from None
        object.__setattr__(self, "structure", c)
        object.__setattr__(self, "pairing", P)
        if self.basis is not None:
            basis = np.asarray(self.basis, dtype=float)
            if basis.shape[0] != d:
                raise DimensionError("basis length does not match the structure constants")
            object.__setattr__(self, "basis", basis)

    @property
    def dimension(self) -> int:
        return self.structure.shape[0]

    def bracket(self, a, b) -> np.ndarray:
        """Left-invariant bracket ``[a, b]``."""
        return np.einsum("i,j,ijk->k", a, b, self.structure)

    def bracket_right(self, a, b) -> np.ndarray:
        """Bracket of right-invariant fields, ``[a, b]_R = -[a, b]_L``."""
        return -self.bracket(a, b)

    def ad(self, xi) -> np.ndarray:
        """Matrix of ``ad_xi`` acting on vector coordinates."""
        return np.einsum("i,ijk->kj", xi, self.structure)

    def ad_star(self, xi, m) -> np.ndarray:
        """``ad*_xi m``, defined by ``(ad*_xi m)(c) = m([xi, c])``."""
        return self.ad(xi).T @ np.asarray(m, dtype=float)

    def flat(self, v) -> np.ndarray:
        """Vector -> covector through the pairing."""
        return self.pairing @ np.asarray(v, dtype=float)

    def sharp(self, m) -> np.ndarray:
        return np.linalg.solve(self.pairing, np.asarray(m, dtype=float))

    def matrix(self, v) -> np.ndarray:
        if self.basis is None:
            raise DimensionError("algebra has no matrix realisation")
        return np.einsum("a,aij->ij", v, self.basis)

    def coords(self, x) -> np.ndarray:
        """Coordinates of a matrix ``x`` in the basis (least squares)."""
        if self.basis is None:
            raise DimensionError("algebra has no matrix realisation")
        flat = self.basis.reshape(self.dimension, -1).T
        sol, *_ = np.linalg.lstsq(flat, np.asarray(x, dtype=float).ravel(), rcond=None)
        return sol

    def Ad_star(self, g, m) -> np.ndarray:
        """Coadjoint action of a group matrix, ``(Ad*_g m)(xi) = m(Ad_{g^-1} xi)``."""
        g = np.asarray(g, dtype=float)
        ginv = np.linalg.inv(g)
        ad_ginv = np.array([self.coords(ginv @ E @ g) for E in self.basis]).T
        return ad_ginv.T @ np.asarray(m, dtype=float)


def jacobi_defect(c) -> float:
    """Largest cyclic Jacobi sum over basis triples."""
    # [e_i,[e_j,e_k]] = sum_l c[j,k,l] c[i,l,:]
    inner = np.einsum("jkl,ilm->ijkm", c, c)
    cyc = inner + inner.transpose(1, 2, 0, 3) + inner.transpose(2, 0, 1, 3)
    return float(np.abs(cyc).max()) if cyc.size else 0.0


def so_algebra(n: int) -> AlgebraSpec:
    """so(n) in the basis ``L(e_i, e_j)``, orthonormal for the trace pairing.

    Dual coordinates of a momentum M are ``<M, E_a>``, which coincide with
    its vector coordinates because the basis is orthonormal.
    """
    basis = lie_core.so_basis(n)
    d = basis.shape[0]
    gram = np.array([[lie_core.killing_pair(a, b) for b in basis] for a in basis])
    c = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            br = lie_core.bracket(basis[i], basis[j])
            c[i, j] = np.linalg.solve(gram, [lie_core.killing_pair(br, e) for e in basis])
    return AlgebraSpec(c, gram, basis)


def inertia_map(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"inertia map must be square, got {A.shape}")
    if np.abs(A - A.T).max() > 1e-12 * max(1.0, np.abs(A).max()):
        raise DimensionError("inertia map must be symmetric")
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise SingularInertiaError("inertia map is not positive definite") from None
    return 0.5 * (A + A.T)


def so_inertia(spec: AlgebraSpec, J) -> np.ndarray:
    """Matrix of ``W -> J W + W J`` from vector to dual coordinates."""
    J = np.asarray(J, dtype=float)
    E = spec.basis
    cols = [J @ e + e @ J for e in E]
    A = np.array([[lie_core.killing_pair(col, ea) for col in cols] for ea in E])
    return inertia_map(A)


class EulerArnold:
    """Geodesic equations of the left-invariant metric defined by ``A``."""

    def __init__(self, spec: AlgebraSpec, A):
        self.spec = spec
        self.A = inertia_map(A)
        if self.A.shape[0] != spec.dimension:
            raise DimensionError("inertia map and algebra dimensions differ")
        self._chol = cho_factor(self.A)

    def solve(self, m) -> np.ndarray:
        return cho_solve(self._chol, np.asarray(m, dtype=float))

    def metric(self, a, b) -> float:
        return float(self.A @ np.asarray(a, dtype=float) @ np.asarray(b, dtype=float))

    def energy(self, w) -> float:
        return 0.5 * self.metric(w, w)

    def hamiltonian(self, m) -> float:
        """Kinetic energy in momentum variables, ``1/2 (A^{-1} m, m)``."""
        m = np.asarray(m, dtype=float)
        return 0.5 * float(self.solve(m) @ m)

    def B(self, a, b) -> np.ndarray:
        return self.solve(self.spec.ad_star(b, self.A @ np.asarray(a, dtype=float)))

    def connection(self, a, b) -> np.ndarray:
        return 0.5 * self.spec.bracket(a, b) - 0.5 * (self.B(a, b) + self.B(b, a))

    def rhs(self, w) -> np.ndarray:
        return self.B(w, w)

    def dual_rhs(self, m) -> np.ndarray:
        return self.spec.ad_star(self.solve(m), m)

    def step(self, w, dt: float) -> np.ndarray:
        return rk4_step(self.rhs, np.asarray(w, dtype=float), dt)

    def integrate(self, w0, dt: float, steps: int) -> Iterator[np.ndarray]:
        w = np.asarray(w0, dtype=float)
        for _ in range(steps):
            w = self.step(w, dt)
            yield w

    def noether_track(self, w0, dt: float, steps: int) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Integrate ``w`` and the attitude ``g`` together, yielding ``(g, w, m_R)``.

        Requires a matrix realisation.  ``dg/dt = g W`` is advanced with a
        midpoint Cayley step; ``m_R = Ad*_g (A w)`` should stay constant.
        """
        spec = self.spec
        w = np.asarray(w0, dtype=float)
        n = spec.basis.shape[1]
        g = np.eye(n)
        for _ in range(steps):
            w_new = self.step(w, dt)
            g = g @ lie_core.cayley(dt * spec.matrix(0.5 * (w + w_new)))
            w = w_new
            yield g, w, spec.Ad_star(g, self.A @ w)


def rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def b_operator(spec: AlgebraSpec, A, a, b) -> np.ndarray:
    """``B(a, b) = A^{-1} ad*_b (A a)``, so that ``<[a,b], c> = <B(c,a), b>``."""
    return EulerArnold(spec, A).B(a, b)


def connection_at_identity(spec: AlgebraSpec, A, a, b) -> np.ndarray:
    """Levi-Civita connection on left-invariant fields at the identity."""
    return EulerArnold(spec, A).connection(a, b)


def euler_arnold_rhs(spec: AlgebraSpec, A, w) -> np.ndarray:
    return EulerArnold(spec, A).rhs(w)


def dual_euler_arnold_rhs(spec: AlgebraSpec, A, m) -> np.ndarray:
    return EulerArnold(spec, A).dual_rhs(m)


def default_step(m) -> float:
    return 1e-4 * (1.0 + float(np.linalg.norm(m)))


def gradient(f: ScalarField, m, h: float | None = None) -> np.ndarray:
    """Fourth-order central-difference gradient of ``f`` at ``m``.

    The differential of a function on the dual lives in the algebra, and in
    dual coordinates its vector coordinates are just the partial derivatives.
    """
    m = np.asarray(m, dtype=float)
    h = default_step(m) if h is None else h
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    grad = np.empty_like(m)
    for i in range(m.size):
        e = np.zeros_like(m)
        e[i] = h
        vals = np.array([f(m + 2 * e), f(m + e), f(m - e), f(m - 2 * e)], dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteError(f"scalar field is not finite near m along coordinate {i}")
        grad[i] = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h)
    return grad


def lie_poisson_bracket(spec: AlgebraSpec, f: ScalarField, g: ScalarField, m, h: float | None = None) -> float:
    """``{f, g}(m) = (m, [d_m f, d_m g])``."""
    m = np.asarray(m, dtype=float)
    return float(m @ spec.bracket(gradient(f, m, h), gradient(g, m, h)))


def hamiltonian_field(spec: AlgebraSpec, H: ScalarField, m, h: float | None = None) -> np.ndarray:
    """Hamiltonian vector field ``ad*_{d_m H} m`` of the Lie-Poisson structure."""
    m = np.asarray(m, dtype=float)
    return spec.ad_star(gradient(H, m, h), m)


def kirillov_form(spec: AlgebraSpec, a, b, m) -> float:
    """Orbit symplectic form on ``(ad*_a m, ad*_b m)``: ``(m, [a, b])``."""
    return float(np.asarray(m, dtype=float) @ spec.bracket(a, b))


@dataclass(frozen=True)
class InvolutionReport:
    max_abs: float
    worst_pair: tuple[int, int] | None
    worst_sample: int | None
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_abs <= self.threshold


def involution_check(
    spec: AlgebraSpec,
    functions: Sequence[ScalarField],
    m_samples: Sequence,
    threshold: float = INVOLUTION_THRESHOLD,
    h: float | None = None,
) -> InvolutionReport:
    """Largest ``|{f_i, f_j}|`` over all pairs and sample points."""
    worst, pair, sample = 0.0, None, None
    for s, m in enumerate(m_samples):
        m = np.asarray(m, dtype=float)
        grads = [gradient(f, m, h) for f in functions]
        for i in range(len(grads)):
            for j in range(i + 1, len(grads)):
                val = abs(float(m @ spec.bracket(grads[i], grads[j])))
                if val > worst or pair is None:
                    worst, pair, sample = max(val, worst), (i, j), s
    return InvolutionReport(worst, pair, sample, threshold)


def manakov_functions(spec: AlgebraSpec, J) -> list[ScalarField]:
    """Non-trivial Manakov coefficients as functions of dual coordinates on so(n)*."""
    from . import rigid_body

    n = spec.basis.shape[1]
    orders = rigid_body.manakov_orders(n)

    def make(k, s):
        def f(m):
            return rigid_body.manakov_coefficients(J, spec.matrix(spec.sharp(m)), k)[s]

        return f

    return [make(k, s) for k, s in orders]
