"""The free n-dimensional rigid body about a fixed point.

The body is described by its moment matrix ``J`` (second moments of the
mass distribution).  The inertia operator is ``A(W) = J W + W J`` and the
body momentum ``M = A(W)`` obeys ``dM/dt = [M, W]``, with the attitude
reconstructed from ``dg/dt = g W``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import lie_core
from .errors import (
    ConditioningError,
    DimensionError,
    DivergenceError,
    SingularInertiaError,
)
from .lie_core import Covector, SkewMatrix

SINGULAR_TOL = 1e-12
VANDERMONDE_COND_MAX = 1e10
METHODS = ("rk4", "cayley_liegroup")


@dataclass(frozen=True)
class MassDistribution:
    """Finite collection of point masses ``(m_k, r_k)``."""

    masses: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if masses.size == 0:
            raise DimensionError("mass distribution is empty")
        if positions.shape[0] != masses.size:
            raise DimensionError(f"{masses.size} masses but {positions.shape[0]} positions")
        if positions.shape[1] < 2:
            raise DimensionError("positions must live in R^n with n >= 2")
        if np.any(masses <= 0) or not np.all(np.isfinite(masses)):
            raise DimensionError("masses must be positive and finite")
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "positions", positions)

    @classmethod
    def from_atoms(cls, atoms):
        """Build from an iterable of ``(mass, position)`` pairs."""
        atoms = list(atoms)
        if not atoms:
            raise DimensionError("mass distribution is empty")
        return cls([a[0] for a in atoms], [a[1] for a in atoms])

    @property
    def n(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True)
class BodyState:
    g: np.ndarray
    omega: np.ndarray
    time: float = 0.0


def moment_matrix(dist: MassDistribution) -> np.ndarray:
    """``J = sum_k m_k r_k r_k^T``."""
    r = dist.positions
    return np.einsum("k,ki,kj->ij", dist.masses, r, r)


def as_moment_matrix(J, psd_tol: float = 1e-12) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1] or J.shape[0] < 2:
        raise DimensionError(f"moment matrix must be square with n >= 2, got {J.shape}")
    if not np.allclose(J, J.T, rtol=0, atol=1e-12 * max(1.0, np.abs(J).max())):
        raise DimensionError("moment matrix must be symmetric")
    J = 0.5 * (J + J.T)
    if np.linalg.eigvalsh(J).min() < -psd_tol * max(1.0, np.abs(J).max()):
        raise DimensionError("moment matrix must be positive semi-definite")
    return J


def classical_inertia_3d(source) -> np.ndarray:
    """Classical 3x3 inertia tensor ``tr(J) Id - J``.

    ``source`` is a :class:`MassDistribution` or a 3x3 moment matrix.
    """
    J = moment_matrix(source) if isinstance(source, MassDistribution) else as_moment_matrix(source)
    if J.shape != (3, 3):
        raise DimensionError("classical inertia tensor is only defined for n = 3")
    return np.trace(J) * np.eye(3) - J


def moment_from_classical_inertia(I) -> np.ndarray:
    """Inverse of :func:`classical_inertia_3d`: ``J = tr(I)/2 Id - I``."""
    I = np.asarray(I, dtype=float)
    if I.shape != (3, 3):
        raise DimensionError("expected a 3x3 inertia tensor")
    return 0.5 * np.trace(I) * np.eye(3) - I


class RigidBody:
    """Inertia operator of a fixed moment matrix, with cached eigenbasis.

    The module-level functions are thin wrappers around an instance; use
    the class directly inside loops.
    """

    def __init__(self, J, singular_tol: float = SINGULAR_TOL):
        self.J = as_moment_matrix(J)
        self.n = self.J.shape[0]
        self.eigenvalues, self.basis = np.linalg.eigh(self.J)
        lam = self.eigenvalues
        self._denom = lam[:, None] + lam[None, :]
        np.fill_diagonal(self._denom, 1.0)
        off = ~np.eye(self.n, dtype=bool)
        scale = max(1.0, float(np.abs(lam).max()))
        self.singular = bool(np.any(self._denom[off] <= singular_tol * scale))
        self._J2 = self.J @ self.J

    def apply(self, w) -> Covector:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.n, self.n):
            raise DimensionError(f"expected {self.n}x{self.n}, got {w.shape}")
        return Covector(self.J @ w + w @ self.J)

    def solve(self, m) -> SkewMatrix:
        """Solve ``J W + W J = m`` in the eigenbasis of J."""
        m = np.asarray(m, dtype=float)
        if m.shape != (self.n, self.n):
            raise DimensionError(f"expected {self.n}x{self.n}, got {m.shape}")
        if self.singular:
            lam = self.eigenvalues
            raise SingularInertiaError(
                f"inertia operator is singular: eigenvalues of J are {np.array2string(lam, precision=4)}"
            )
        Q = self.basis
        mp = Q.T @ m @ Q
        wp = mp / self._denom
        np.fill_diagonal(wp, 0.0)
        return SkewMatrix(Q @ wp @ Q.T)

    def energy(self, w) -> float:
        w = np.asarray(w, dtype=float)
        return float(-0.5 * np.trace(w @ self.J @ w))

    def rhs(self, g, m):
        """Time derivatives ``(g W, [M, W])`` with ``W = A^{-1} M``."""
        w = self.solve(m)
        return g @ w, m @ w - w @ m

    def momentum_rhs(self, m):
        w = self.solve(m)
        return m @ w - w @ m

    def step(self, state: BodyState, dt: float, method: str = "rk4") -> BodyState:
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt}")
        g = state.g
        m = self.apply(state.omega)
        if method == "rk4":
            g1, m1 = self.rhs(g, m)
            g2, m2 = self.rhs(g + 0.5 * dt * g1, m + 0.5 * dt * m1)
            g3, m3 = self.rhs(g + 0.5 * dt * g2, m + 0.5 * dt * m2)
            g4, m4 = self.rhs(g + dt * g3, m + dt * m3)
            g_new = g + dt / 6.0 * (g1 + 2 * g2 + 2 * g3 + g4)
            m_new = m + dt / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4)
        elif method == "cayley_liegroup":
            m_new = self._rk4_momentum(m, dt)
            w_mid = self.solve(0.5 * (m + m_new))
            g_new = g @ lie_core.cayley(dt * w_mid)
            # one Newton-Schulz sweep removes round-off accumulated by the products
            g_new = g_new + 0.5 * g_new @ (np.eye(self.n) - g_new.T @ g_new)
        else:
            raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
        m_new = 0.5 * (m_new - m_new.T)
        if not (np.all(np.isfinite(m_new)) and np.all(np.isfinite(g_new))):
            raise DivergenceError("non-finite state in rigid body step", time=state.time + dt)
        return BodyState(g_new, self.solve(m_new), state.time + dt)

    def _rk4_momentum(self, m, dt):
        k1 = self.momentum_rhs(m)
        k2 = self.momentum_rhs(m + 0.5 * dt * k1)
        k3 = self.momentum_rhs(m + 0.5 * dt * k2)
        k4 = self.momentum_rhs(m + dt * k3)
        return m + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    def spatial_momentum(self, state: BodyState) -> Covector:
        g = state.g
        return Covector(g @ self.apply(state.omega) @ g.T)

    def lax_matrix(self, m, lam: float) -> np.ndarray:
        return np.asarray(m, dtype=float) + lam * self._J2

    def integrate(self, state: BodyState, dt: float, steps: int, method: str = "rk4") -> Iterator[BodyState]:
        """Yield ``steps`` successive states after ``state``."""
        for _ in range(steps):
            state = self.step(state, dt, method)
            yield state


def initial_state(omega, n: int | None = None) -> BodyState:
    w = lie_core.skew_matrix(omega)
    n = w.shape[0] if n is None else n
    return BodyState(np.eye(n), w, 0.0)


def inertia_apply(J, w) -> Covector:
    """``A(W) = J W + W J``."""
    return RigidBody(J).apply(w)


def inertia_solve(J, m) -> SkewMatrix:
    return RigidBody(J).solve(m)


def kinetic_energy(J, w) -> float:
    """``K = -1/2 tr(W J W)``."""
    return RigidBody(J).energy(w)


def euler_rhs(J, state: BodyState):
    """Return ``(dg, dM)`` for the state, ``dM = [M, W]`` and ``dg = g W``."""
    body = RigidBody(J)
    return body.rhs(state.g, body.apply(state.omega))


def step(J, state: BodyState, dt: float, method: str = "rk4") -> BodyState:
    return RigidBody(J).step(state, dt, method)


def spatial_momentum(J, state: BodyState) -> Covector:
    """Spatial angular momentum ``g A(W) g^T``; constant along the motion."""
    return RigidBody(J).spatial_momentum(state)


def manakov_integrals(J, M, k: int, lambda_samples: Sequence[float]) -> np.ndarray:
    """Evaluate ``tr((M + lambda J^2)^k)`` at each sample."""
    J = np.asarray(J, dtype=float)
    M = np.asarray(M, dtype=float)
    n = J.shape[0]
    if not 2 <= k <= n:
        raise DimensionError(f"degree k must lie in [2, {n}], got {k}")
    lams = np.asarray(lambda_samples, dtype=float)
    if not np.all(np.isfinite(lams)):
        raise ValueError("lambda samples must be finite")
    J2 = J @ J
    return np.array([np.trace(np.linalg.matrix_power(M + lam * J2, k)) for lam in lams])


def default_lambda_samples(k: int) -> np.ndarray:
    """Chebyshev points on [-1, 1], one more than the polynomial degree."""
    j = np.arange(k + 1)
    return np.cos(np.pi * (2 * j + 1) / (2 * (k + 1)))


def manakov_coefficients(J, M, k: int, lambda_samples: Sequence[float] | None = None) -> np.ndarray:
    """Coefficients ``c_0..c_k`` of ``tr((M + lambda J^2)^k) = sum_s c_s lambda^s``.

    Found by sampling ``k + 1`` values of lambda and solving the Vandermonde
    system.  By default the samples are Chebyshev points scaled by
    ``sqrt(|M| / |J^2|)`` so that both terms of the Lax matrix carry
    comparable weight.
    """
    if lambda_samples is None:
        J = np.asarray(J, dtype=float)
        norm_m = float(np.linalg.norm(M))
        norm_j2 = float(np.linalg.norm(J @ J))
        scale = np.sqrt(norm_m / norm_j2) if norm_m > 0 and norm_j2 > 0 else 1.0
        lams = scale * default_lambda_samples(k)
    else:
        lams = np.asarray(lambda_samples, dtype=float)
        if lams.size != k + 1:
            raise ValueError(f"need exactly {k + 1} lambda samples for degree {k}, got {lams.size}")
        scale = float(np.abs(lams).max()) or 1.0
    # solve in the rescaled variable lambda/scale to keep the system well conditioned
    V = np.vander(lams / scale, k + 1, increasing=True)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > VANDERMONDE_COND_MAX:
        raise ConditioningError(f"Vandermonde system has condition number {cond:.3e}")
    coeffs = np.linalg.solve(V, manakov_integrals(J, M, k, lams))
    return coeffs / scale ** np.arange(k + 1)


def manakov_orders(n: int) -> list[tuple[int, int]]:
    """Pairs ``(k, s)`` labelling the non-trivial Manakov coefficients.

    Only powers ``s`` with the parity of ``k`` survive, and ``s = k`` gives
    the constant ``tr(J^{2k})``.
    """
    return [(k, s) for k in range(2, n + 1) for s in range(k % 2, k, 2)]


def manakov_invariants(J, M) -> np.ndarray:
    """All non-trivial Manakov coefficients, ordered as :func:`manakov_orders`."""
    n = np.asarray(J).shape[0]
    coeffs = {k: manakov_coefficients(J, M, k) for k in range(2, n + 1)}
    return np.array([coeffs[k][s] for k, s in manakov_orders(n)])


def manakov_count(n: int) -> int:
    """Number of integrals in involution, ``[n/2]/2 + n(n-1)/4``."""
    if n < 2:
        raise DimensionError("n must be >= 2")
    value = Fraction(n // 2, 2) + Fraction(n * (n - 1), 4)
    return value.numerator // value.denominator
