"""Invariant suites behind ``geoflow verify <suite>``.

Each suite returns a list of :class:`Check` results; the CLI prints one line
per check.  Seeds are fixed so the output is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import circle_diff, euler_arnold, lie_core, rigid_body


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value)) and self.value <= self.tolerance

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<48s} {self.value:.3e} <= {self.tolerance:.1e}"


def random_moment_matrix(rng, n, low=0.5, high=3.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q @ np.diag(rng.uniform(low, high, n)) @ Q.T


def random_unit_skew(rng, n):
    w = lie_core.skew_matrix(rng.standard_normal((n, n)))
    return w / np.sqrt(lie_core.killing_pair(w, w))


def rigid_drifts(J, omega0, dt, T, method="rk4"):
    """Maximum relative drifts of energy, spatial momentum and spectrum of M."""
    body = rigid_body.RigidBody(J)
    state = rigid_body.initial_state(omega0)
    K0 = body.energy(state.omega)
    S0 = body.spatial_momentum(state)
    ev0 = np.sort(np.linalg.eigvals(body.apply(state.omega)).imag)
    dK = dS = dE = 0.0
    for state in body.integrate(state, dt, int(round(T / dt)), method):
        dK = max(dK, abs(body.energy(state.omega) - K0) / K0)
        dS = max(dS, np.linalg.norm(body.spatial_momentum(state) - S0) / np.linalg.norm(S0))
        ev = np.sort(np.linalg.eigvals(body.apply(state.omega)).imag)
        dE = max(dE, np.abs(ev - ev0).max() / np.abs(ev0).max())
    return dK, dS, dE, state


def rigid_conservation(seed=0):
    rng = np.random.default_rng(seed)
    checks = []
    for n in (3, 4, 5):
        J = random_moment_matrix(rng, n)
        dK, dS, dE, _ = rigid_drifts(J, random_unit_skew(rng, n), 1e-3, 10.0)
        checks += [
            Check(f"n={n} energy drift", dK, 1e-7),
            Check(f"n={n} spatial momentum drift", dS, 1e-7),
            Check(f"n={n} spectrum of M drift", dE, 1e-7),
        ]
    return checks


def manakov(seed=0):
    rng = np.random.default_rng(seed)
    n = 4
    J = random_moment_matrix(rng, n)
    body = rigid_body.RigidBody(J)
    state = rigid_body.initial_state(random_unit_skew(rng, n))
    c0 = rigid_body.manakov_invariants(J, body.apply(state.omega))
    drift = 0.0
    for i, state in enumerate(body.integrate(state, 1e-3, 10000), start=1):
        if i % 100 == 0:
            c = rigid_body.manakov_invariants(J, body.apply(state.omega))
            drift = max(drift, float(np.max(np.abs(c - c0) / np.abs(c0))))
    return [
        Check("n=4 Manakov coefficient drift", drift, 1e-6),
        Check("manakov_count(3) == 2", abs(rigid_body.manakov_count(3) - 2), 0),
        Check("manakov_count(4) == 4", abs(rigid_body.manakov_count(4) - 4), 0),
    ]


def involution(seed=0):
    rng = np.random.default_rng(seed)
    spec = euler_arnold.so_algebra(4)
    J = random_moment_matrix(rng, 4)
    samples = [m / np.linalg.norm(m) for m in rng.standard_normal((10, spec.dimension))]
    res = euler_arnold.involution_check(spec, euler_arnold.manakov_functions(spec, J), samples)
    return [Check("n=4 Manakov brackets (10 samples)", res.max_abs, res.threshold)]


def circle_conservation():
    N = 256
    x = circle_diff.grid(N)
    checks = []
    for k, u0, T in ((0, 0.1 * np.sin(x), 0.5), (1, 0.5 * np.cos(x), 2.0)):
        traj = circle_diff.geodesic_flow(u0, k, T, 5e-4, stride=100)
        m0 = circle_diff.momentum_k(traj.state(0), traj.u[0], k)
        e0 = circle_diff.energy(u0, k)
        dm = de = 0.0
        for i in range(len(traj)):
            m = circle_diff.momentum_k(traj.state(i), traj.u[i], k, tol=np.inf)
            dm = max(dm, float(np.abs(m - m0).max() / np.abs(m0).max()))
            de = max(de, abs(circle_diff.energy(traj.u[i], k) - e0) / e0)
        checks += [
            Check(f"k={k} energy drift, T={T}", de, 1e-7),
            Check(f"k={k} momentum drift, T={T}", dm, 1e-6),
        ]
    return checks


def burgers_oracle():
    N = 256
    x = circle_diff.grid(N)
    u0 = 0.1 * np.sin(x)
    t = 0.5 * circle_diff.breaking_time(u0)
    steps = 2000
    u = u0
    for i in range(steps):
        u = circle_diff.euler_hk_step(u, 0, t / steps, step_index=i)
    err = float(np.abs(u - circle_diff.burgers_exact(u0, t)).max())
    return [
        Check("spectral vs characteristics at T*/2", err, 1e-6),
        Check("breaking_time(-sin x) - 1/3", abs(circle_diff.breaking_time(-np.sin(x)) - 1 / 3), 1e-10),
    ]


def expmap():
    N = 128
    x = circle_diff.grid(N)
    dirs = [np.cos(x), np.sin(2 * x), np.cos(3 * x)]
    probes = circle_diff.dexp_at_zero(1, dirs)
    checks = [
        Check(f"Dexp_0 probe, mode {j}", float(np.abs(p - w).max()), 1e-5)
        for j, p, w in zip((1, 2, 3), probes, dirs)
    ]
    zero = circle_diff.riemannian_exp(np.zeros(N), 1)
    checks.append(Check("exp(0) displacement", float(np.abs(zero.psi).max()), 0.0))
    u0 = 0.5 * np.cos(x)
    traj = circle_diff.geodesic_flow(u0, 1, 1.0, 1e-3)
    ray = 0.0
    for t in (0.25, 0.5, 0.75):
        pt = circle_diff.riemannian_exp(t * u0, 1)
        ray = max(ray, float(np.abs(pt.psi - traj.psi[int(round(t / 1e-3))]).max()))
    checks.append(Check("ray property exp(t u0) = phi(t; u0)", ray, 1e-7))
    return checks


SUITES = {
    "rigid-conservation": rigid_conservation,
    "manakov": manakov,
    "involution": involution,
    "circle-conservation": circle_conservation,
    "burgers-oracle": burgers_oracle,
    "expmap": expmap,
}
