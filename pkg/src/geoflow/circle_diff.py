"""Right-invariant H^k geodesics on the diffeomorphism group of the circle.

Fields are real samples on the uniform grid ``x_j = 2 pi j / N`` of the
circle of length 2 pi and are treated spectrally.  The Eulerian velocity
``u`` solves ``u_t = B_k(u, u)`` (inviscid Burgers ``u_t + 3 u u_x = 0`` for
k = 0, Camassa-Holm for k = 1).  The flow map ``phi(x) = x + psi(x)`` is
recovered from ``phi_t = u o phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    ConsistencyError,
    DiffeomorphismLossError,
    DimensionError,
    DivergenceError,
    OutOfDomainError,
    ShockError,
    TerminationError,
)

SUPPORTED_K = (0, 1, 2, 3)
DIFFEO_EPS = 1e-6
CONSISTENCY_TOL = 1e-6
TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# grids and spectral primitives


def as_field(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise DimensionError(f"periodic field must be one-dimensional, got shape {u.shape}")
    N = u.size
    if N < 16 or N & (N - 1):
        raise DimensionError(f"grid size must be a power of two >= 16, got {N}")
    if not np.all(np.isfinite(u)):
        raise DimensionError("periodic field contains non-finite values")
    return u


def grid(N: int) -> np.ndarray:
    return TWO_PI * np.arange(N) / N


def wavenumbers(N: int) -> np.ndarray:
    return np.arange(N // 2 + 1, dtype=float)


def _check_k(k: int) -> int:
    if k not in SUPPORTED_K:
        raise DimensionError(f"metric order k must be one of {SUPPORTED_K}, got {k}")
    return k


def sample(func, N: int) -> np.ndarray:
    """Sample a callable on the grid."""
    return as_field(np.asarray(func(grid(N)), dtype=float) * np.ones(N))


def from_fourier(N: int, terms: Sequence[Sequence[float]]) -> np.ndarray:
    """Field ``sum a cos(j x) + b sin(j x)`` from ``(j, a, b)`` triples."""
    x = grid(N)
    u = np.zeros(N)
    for term in terms:
        j, a, b = term
        if j != int(j) or j < 0 or j >= N // 2:
            raise DimensionError(f"mode {j} not representable on a grid of {N}")
        u += a * np.cos(j * x) + b * np.sin(j * x)
    return u


def derivative(u, order: int = 1) -> np.ndarray:
    """Spectral derivative; the Nyquist mode is dropped for odd orders."""
    u = np.asarray(u, dtype=float)
    N = u.size
    uh = np.fft.rfft(u)
    mult = (1j * wavenumbers(N)) ** order
    if order % 2:
        mult[-1] = 0.0
    return np.fft.irfft(uh * mult, n=N)


def ak_multiplier(N: int, k: int) -> np.ndarray:
    """Symbol ``sum_{i<=k} xi^{2i}`` of A_k."""
    xi2 = wavenumbers(N) ** 2
    return sum(xi2**i for i in range(_check_k(k) + 1))


def apply_Ak(u, k: int) -> np.ndarray:
    """``A_k = 1 - d^2/dx^2 + ... + (-1)^k d^{2k}/dx^{2k}``."""
    u = as_field(u)
    return np.fft.irfft(np.fft.rfft(u) * ak_multiplier(u.size, k), n=u.size)


def invert_Ak(m, k: int) -> np.ndarray:
    m = as_field(m)
    return np.fft.irfft(np.fft.rfft(m) / ak_multiplier(m.size, k), n=m.size)


def integrate(f) -> float:
    """Integral over the circle (trapezoid rule, exact for band-limited data)."""
    f = np.asarray(f, dtype=float)
    return float(TWO_PI * f.mean())


def inner_k(u, v, k: int) -> float:
    """H^k inner product ``int A_k(u) v dx``."""
    return integrate(apply_Ak(u, k) * np.asarray(v, dtype=float))


def energy(u, k: int) -> float:
    return 0.5 * inner_k(u, u, k)


def vector_bracket(u, v) -> np.ndarray:
    """Lie bracket of vector fields on the circle, ``-(u_x v - u v_x)``."""
    return -(derivative(u) * v - u * derivative(v))


def dealias_mask(N: int) -> np.ndarray:
    return wavenumbers(N) <= N / 3.0


def _filter(u, mask):
    return np.fft.irfft(np.fft.rfft(u) * mask, n=u.size)


def evaluate(u, points) -> np.ndarray:
    """Trigonometric interpolant of ``u`` evaluated at arbitrary points."""
    u = np.asarray(u, dtype=float)
    return _eval_coeffs(_interp_coeffs(u), _powers(np.asarray(points, dtype=float), u.size // 2 + 1))


def _interp_coeffs(u):
    N = u.size
    c = np.fft.rfft(u) / N
    c[1:-1] *= 2.0
    return c


def _powers(points, K):
    z = np.exp(1j * points)
    Z = np.empty((points.size, K), dtype=complex)
    Z[:, 0] = 1.0
    if K > 1:
        Z[:, 1:] = np.cumprod(np.broadcast_to(z[:, None], (points.size, K - 1)), axis=1)
    return Z


def _eval_coeffs(c, Z):
    return (Z @ c).real


# ---------------------------------------------------------------------------
# Euler-Arnold operator and equations


def b_k(u, v, k: int, dealias: bool = False) -> np.ndarray:
    """``B_k(u, v) = -A_k^{-1}(2 v_x A_k(u) + v A_k(u_x))``.

    Adjoint of the bracket for the H^k metric:
    ``<B_k(u, v), w>_k = <u, [v, w]>_k``.
    """
    u = as_field(u)
    v = as_field(v)
    if u.size != v.size:
        raise DimensionError(f"grid mismatch: {u.size} vs {v.size}")
    N = u.size
    mult = ak_multiplier(N, k)
    if dealias:
        mask = dealias_mask(N)
        u = _filter(u, mask)
        v = _filter(v, mask)
    uh = np.fft.rfft(u)
    ik = 1j * wavenumbers(N)
    ik[-1] = 0.0
    Au = np.fft.irfft(uh * mult, n=N)
    Aux = np.fft.irfft(uh * ik * mult, n=N)
    vx = derivative(v)
    prod = np.fft.rfft(2.0 * vx * Au + v * Aux)
    if dealias:
        prod *= dealias_mask(N)
    return np.fft.irfft(-prod / mult, n=N)


def ch_rhs(u) -> np.ndarray:
    """Camassa-Holm right-hand side ``-u u_x - d/dx (1 - d^2/dx^2)^{-1}(u^2 + u_x^2/2)``."""
    u = as_field(u)
    ux = derivative(u)
    return -u * ux - derivative(invert_Ak(u * u + 0.5 * ux * ux, 1))


def q_k(w, k: int) -> np.ndarray:
    """``Q_k(w) = B_k(w, w) + w w_x``, the Lagrangian acceleration field."""
    w = as_field(w)
    return b_k(w, w, k) + w * derivative(w)


def euler_hk_step(u, k: int, dt: float, dealias: bool = False, step_index: int | None = None) -> np.ndarray:
    """One classical RK4 step of ``u_t = B_k(u, u)``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = as_field(u)

    def f(w):
        return b_k(w, w, k, dealias)

    k1 = f(u)
    k2 = f(u + 0.5 * dt * k1)
    k3 = f(u + 0.5 * dt * k2)
    k4 = f(u + dt * k3)
    out = u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(f"non-finite velocity at step {step_index}", step=step_index)
    return out


# ---------------------------------------------------------------------------
# inviscid Burgers (k = 0) by characteristics


def breaking_time(u0) -> float:
    """First time characteristics of ``u_t + 3 u u_x = 0`` cross, ``-1/(3 min u0')``.

    The minimum is located on a 4x spectrally refined grid, then polished on
    the trigonometric interpolant of ``u0'``.
    """
    u0 = as_field(u0)
    N = u0.size
    du = derivative(u0)
    scale = max(1.0, float(np.abs(u0).max()))
    if np.abs(du).max() <= 1e-13 * scale:
        return math.inf
    fine_n = 4 * N
    fine = np.fft.irfft(np.fft.rfft(du), n=fine_n) * (fine_n / N)
    j = int(np.argmin(fine))
    h = TWO_PI / fine_n
    x0 = j * h
    res = minimize_scalar(
        lambda x: float(evaluate(du, np.array([x]))[0]),
        bounds=(x0 - h, x0 + h),
        method="bounded",
        options={"xatol": 1e-14},
    )
    slope = min(float(res.fun), float(fine[j]))
    if slope >= 0:
        return math.inf
    return -1.0 / (3.0 * slope)


def burgers_exact(u0, t: float, tol: float = 1e-14) -> np.ndarray:
    """Solution of ``u_t + 3 u u_x = 0`` at time t from the characteristics.

    For each grid node ``x`` the foot ``x0`` of its characteristic solves
    ``x = x0 + 3 t u0(x0)``; the map is increasing before breaking so a
    bracketed Newton iteration converges for every node.
    """
    u0 = as_field(u0)
    if t == 0:
        return u0.copy()
    T_star = breaking_time(u0)
    if t >= T_star:
        raise ShockError(f"t = {t} is at or past the breaking time {T_star:.6g}", time=T_star)
    N = u0.size
    x = grid(N)
    c = _interp_coeffs(u0)
    cd = _interp_coeffs(derivative(u0))
    K = N // 2 + 1
    width = 3.0 * abs(t) * float(np.abs(u0).max()) + 1e-12
    lo, hi = x - width, x + width
    x0 = x.copy()
    for _ in range(200):
        Z = _powers(x0, K)
        F = x0 + 3.0 * t * _eval_coeffs(c, Z) - x
        dF = 1.0 + 3.0 * t * _eval_coeffs(cd, Z)
        lo = np.where(F < 0, x0, lo)
        hi = np.where(F > 0, x0, hi)
        cand = x0 - F / dF
        bad = (cand <= lo) | (cand >= hi) | ~np.isfinite(cand)
        cand = np.where(bad, 0.5 * (lo + hi), cand)
        done = np.abs(cand - x0) <= tol * (1.0 + np.abs(x0))
        x0 = cand
        if np.all(done):
            break
    return evaluate(u0, x0)


def characteristic_feet(u0, t: float) -> np.ndarray:
    """Feet ``x0`` of the characteristics reaching the grid nodes at time t."""
    u = burgers_exact(u0, t)
    return grid(u.size) - 3.0 * t * u


# ---------------------------------------------------------------------------
# flow maps


@dataclass(frozen=True)
class FlowMapState:
    """Lagrangian state: ``phi(x) = x + psi(x)`` and ``v = phi_t``."""

    psi: np.ndarray
    v: np.ndarray
    t: float = 0.0

    @classmethod
    def identity(cls, u0) -> "FlowMapState":
        u0 = as_field(u0)
        return cls(np.zeros_like(u0), u0.copy(), 0.0)

    @property
    def N(self) -> int:
        return self.psi.size

    @property
    def phi(self) -> np.ndarray:
        return grid(self.N) + self.psi

    @property
    def phi_x(self) -> np.ndarray:
        return 1.0 + derivative(self.psi)


def compose(f, state: FlowMapState) -> np.ndarray:
    """``f o phi`` by trigonometric evaluation at the warped nodes."""
    return evaluate(f, state.phi)


def inverse_points(state: FlowMapState, tol: float = 1e-14) -> np.ndarray:
    """Points ``y_j = phi^{-1}(x_j)``."""
    x = grid(state.N)
    c = _interp_coeffs(state.psi)
    cd = _interp_coeffs(derivative(state.psi))
    K = state.N // 2 + 1
    y = x - evaluate(state.psi, x)
    for _ in range(100):
        Z = _powers(y, K)
        F = y + _eval_coeffs(c, Z) - x
        step = F / (1.0 + _eval_coeffs(cd, Z))
        y = y - step
        if np.abs(step).max() <= tol:
            break
    return y


def compose_inverse(f, state: FlowMapState) -> np.ndarray:
    """``f o phi^{-1}`` sampled on the grid."""
    return evaluate(f, inverse_points(state))


def _check_diffeo(state: FlowMapState, eps: float = DIFFEO_EPS):
    low = float(state.phi_x.min())
    if low <= eps:
        raise DiffeomorphismLossError(f"min phi_x = {low:.3e} <= {eps:.1e}", time=state.t)
    return low


def p0_rhs(state: FlowMapState) -> np.ndarray:
    """Lagrangian acceleration for k = 0, ``-2 v v_x / phi_x``."""
    _check_diffeo(state, 0.0)
    return -2.0 * state.v * derivative(state.v) / state.phi_x


def pk_rhs(state: FlowMapState, k: int) -> np.ndarray:
    """``P_k(phi, v) = [Q_k(v o phi^{-1})] o phi`` through explicit composition."""
    _check_diffeo(state, 0.0)
    return compose(q_k(compose_inverse(state.v, state), k), state)


def momentum_k(state: FlowMapState, u, k: int, tol: float = CONSISTENCY_TOL) -> np.ndarray:
    """Lagrangian momentum ``A_k(u) o phi * phi_x^2``; conserved along geodesics."""
    u = as_field(u)
    if u.size != state.N:
        raise DimensionError("grid mismatch between state and velocity")
    gap = float(np.abs(state.v - compose(u, state)).max())
    if gap > tol * max(1.0, float(np.abs(u).max())):
        raise ConsistencyError(f"v and u o phi differ by {gap:.3e}")
    return compose(apply_Ak(u, k), state) * state.phi_x**2


# ---------------------------------------------------------------------------
# geodesic flow


@dataclass
class GeodesicTrajectory:
    k: int
    times: list = field(default_factory=list)
    psi: list = field(default_factory=list)
    v: list = field(default_factory=list)
    u: list = field(default_factory=list)

    def append(self, state: FlowMapState, u):
        self.times.append(state.t)
        self.psi.append(state.psi.copy())
        self.v.append(state.v.copy())
        self.u.append(np.asarray(u).copy())

    def state(self, i: int) -> FlowMapState:
        return FlowMapState(self.psi[i], self.v[i], self.times[i])

    def __len__(self):
        return len(self.times)


class GeodesicStepper:
    """RK4 on ``(u, psi, v)``:

    ``u_t = B_k(u, u)``, ``psi_t = u o phi`` and ``v_t = Q_k(u) o phi``.

    The last equation is the Lagrangian Cauchy problem with ``v o phi^{-1}``
    replaced by ``u``; keeping v separately lets callers check that the two
    formulations agree.
    """

    def __init__(self, N: int, k: int, dealias: bool = False, eps_diffeo: float = DIFFEO_EPS):
        self.N = N
        self.k = _check_k(k)
        self.dealias = dealias
        self.eps_diffeo = eps_diffeo
        self.x = grid(N)
        self.K = N // 2 + 1

    def rhs(self, u, psi):
        du = b_k(u, u, self.k, self.dealias)
        q = du + u * derivative(u)
        Z = _powers(self.x + psi, self.K)
        return du, _eval_coeffs(_interp_coeffs(u), Z), _eval_coeffs(_interp_coeffs(q), Z)

    def step(self, u, state: FlowMapState, dt: float, step_index: int = 0):
        psi, v = state.psi, state.v
        a1, b1, c1 = self.rhs(u, psi)
        a2, b2, c2 = self.rhs(u + 0.5 * dt * a1, psi + 0.5 * dt * b1)
        a3, b3, c3 = self.rhs(u + 0.5 * dt * a2, psi + 0.5 * dt * b2)
        a4, b4, c4 = self.rhs(u + dt * a3, psi + dt * b3)
        u_new = u + dt / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
        psi_new = psi + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
        v_new = v + dt / 6.0 * (c1 + 2 * c2 + 2 * c3 + c4)
        t_new = state.t + dt
        if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(psi_new)) and np.all(np.isfinite(v_new))):
            raise DivergenceError(f"non-finite values at step {step_index}", time=t_new, step=step_index)
        new = FlowMapState(psi_new, v_new, t_new)
        low = float(new.phi_x.min())
        if low <= self.eps_diffeo:
            raise DiffeomorphismLossError(
                f"min phi_x = {low:.3e} at step {step_index}", time=t_new, step=step_index
            )
        return u_new, new


def n_steps(T: float, dt: float) -> int:
    steps = int(round(T / dt))
    if steps < 1 or abs(steps * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T = {T} is not a whole number of steps of dt = {dt}")
    return steps


def iter_geodesic(
    u0,
    k: int,
    T: float,
    dt: float,
    dealias: bool = False,
    eps_diffeo: float = DIFFEO_EPS,
) -> Iterator[tuple[int, FlowMapState, np.ndarray]]:
    """Yield ``(step, state, u)`` from t = 0 to T.

    For k = 0 the iteration stops with :class:`ShockError` before stepping
    past the breaking time of ``u0``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = as_field(u0).copy()
    steps = n_steps(T, dt)
    stepper = GeodesicStepper(u.size, k, dealias, eps_diffeo)
    T_star = breaking_time(u) if k == 0 else math.inf
    state = FlowMapState.identity(u)
    yield 0, state, u
    for i in range(1, steps + 1):
        if state.t + dt >= T_star:
            raise ShockError(
                f"Burgers solution breaks at t = {T_star:.6g}", time=state.t, step=i - 1
            )
        u, state = stepper.step(u, state, dt, i)
        yield i, state, u


def geodesic_flow(u0, k: int, T: float, dt: float, stride: int = 1, **kwargs) -> GeodesicTrajectory:
    """Integrate the geodesic from the identity with initial velocity ``u0``.

    Every ``stride``-th step is recorded, as is the final step.
    """
    traj = GeodesicTrajectory(k)
    steps = n_steps(T, dt)
    for i, state, u in iter_geodesic(u0, k, T, dt, **kwargs):
        if i % stride == 0 or i == steps:
            traj.append(state, u)
    return traj


def riemannian_exp(u0, k: int, dt: float = 1e-3, **kwargs) -> FlowMapState:
    """Time-one point ``phi(1; u0)`` of the geodesic through the identity."""
    u0 = as_field(u0)
    final = None
    try:
        for _, state, _ in iter_geodesic(u0, k, 1.0, dt, **kwargs):
            final = state
    except TerminationError as exc:
        raise OutOfDomainError(f"geodesic does not reach t = 1: {exc}") from exc
    return final


def dexp_at_zero(k: int, directions, h: float = 1e-4, dt: float = 1e-3) -> list[np.ndarray]:
    """Central-difference probes ``(exp(h w) - exp(-h w)) / 2h`` of the displacement.

    Each probe should reproduce its direction ``w``.
    """
    probes = []
    for w in directions:
        w = as_field(w)
        plus = riemannian_exp(h * w, k, dt).psi
        minus = riemannian_exp(-h * w, k, dt).psi
        probes.append((plus - minus) / (2.0 * h))
    return probes
