"""Execute scenarios and write their time series, snapshots and manifest."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import circle_diff, euler_arnold, lie_core, rigid_body
from .errors import (
    DiffeomorphismLossError,
    GeoflowError,
    OutOfDomainError,
    ShockError,
    SingularInertiaError,
    TerminationError,
)
from .scenario import FIELD_PRESETS, Scenario

EXIT_CODES = {
    "completed": 0,
    "blowup": 2,
    "shock": 2,
    "diffeo_loss": 2,
    "config_error": 3,
    "singular_inertia": 4,
}


@dataclass
class RunReport:
    status: str
    final_time: float
    drifts: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    message: str = ""
    checks: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self.status, 1)


def fmt(x) -> str:
    """17 significant digits; round-trips every double exactly."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


class SeriesWriter:
    """Streams rows to a CSV file and keeps them for drift bookkeeping."""

    def __init__(self, path: Path, columns):
        self.path = path
        self.columns = list(columns)
        self.rows = []
        self._fh = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(self.columns)

    def write(self, values):
        # keep the values exactly as they appear in the file
        row = [float(fmt(v)) for v in values]
        self.rows.append(row)
        self._writer.writerow([fmt(v) for v in values])

    def close(self):
        self._fh.close()

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


def relative_drift(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    ref = abs(values[0])
    diff = float(np.max(np.abs(values - values[0])))
    return diff / ref if ref > 0 else diff


def emit_manifest(scenario: Scenario, report: RunReport, out_dir: Path) -> Path:
    path = out_dir / f"{scenario.name}_manifest.json"
    report.outputs["manifest"] = str(path)
    doc = {
        "scenario": scenario.source,
        "status": report.status,
        "final_time": report.final_time,
        "drifts": report.drifts,
        "checks": report.checks,
        "outputs": report.outputs,
        "message": report.message,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run(scenario: Scenario, out_dir=None) -> RunReport:
    """Run a validated scenario.  Numerical failures become report statuses."""
    out = Path(out_dir if out_dir is not None else os.environ.get("GEOFLOW_OUT", "."))
    out.mkdir(parents=True, exist_ok=True)
    runner = {
        "rigid_body": _run_rigid_body,
        "circle": _run_circle,
        "involution": _run_involution,
        "expmap": _run_expmap,
    }[scenario.kind]
    report = runner(scenario, out)
    emit_manifest(scenario, report, out)
    return report


# ---------------------------------------------------------------------------


def _run_rigid_body(s: Scenario, out: Path) -> RunReport:
    body = rigid_body.RigidBody(s.J)
    n = body.n
    state = rigid_body.initial_state(s.omega0, n)
    orders = rigid_body.manakov_orders(n) if s.manakov else []
    columns = ["t", "K", "spatial_momentum_drift", "orthogonality_error"]
    columns += [f"manakov_k{k}_s{j}_drift" for k, j in orders]
    series = SeriesWriter(out / f"{s.name}_series.csv", columns)
    report = RunReport("completed", 0.0, outputs={"series": str(series.path)})
    steps = int(round(s.T / s.dt))
    try:
        S0 = body.spatial_momentum(state)
        S0_norm = float(np.linalg.norm(S0)) or 1.0
        m0 = body.apply(state.omega)
        man0 = rigid_body.manakov_invariants(s.J, m0) if orders else np.array([])

        def record(st):
            m = body.apply(st.omega)
            row = [
                st.time,
                body.energy(st.omega),
                float(np.linalg.norm(body.spatial_momentum(st) - S0)) / S0_norm,
                lie_core.orthogonality_error(st.g),
            ]
            if orders:
                man = rigid_body.manakov_invariants(s.J, m)
                scale = np.maximum(np.abs(man0), 1e-300)
                row += list(np.abs(man - man0) / scale)
            series.write(row)

        record(state)
        for i in range(1, steps + 1):
            state = body.step(state, s.dt, s.integrator)
            report.final_time = state.time
            if i % s.stride == 0:
                record(state)
    except SingularInertiaError as exc:
        report.status, report.message = "singular_inertia", str(exc)
    except TerminationError as exc:
        report.status, report.message = exc.status, str(exc)
    finally:
        series.close()
    if series.rows:
        report.drifts["energy"] = relative_drift(series.column("K"))
        for name in columns[2:]:
            report.drifts[name.removesuffix("_drift")] = float(np.max(series.column(name)))
    return report


def _run_circle(s: Scenario, out: Path) -> RunReport:
    k = s.k
    columns = ["t", "energy", "momentum_drift", "min_phi_x"]
    series = SeriesWriter(out / f"{s.name}_series.csv", columns)
    snaps = _SnapshotWriter(out / f"{s.name}_snapshots.csv", s.N) if s.snapshot_times else None
    report = RunReport("completed", 0.0, outputs={"series": str(series.path)})
    if snaps:
        report.outputs["snapshots"] = str(snaps.path)
    tol_diffeo = s.tolerances.get("tol_diffeo", circle_diff.DIFFEO_EPS)
    # The gap between v and u o phi is recorded as a column; it only stops the
    # run when the scenario asks for a tolerance explicitly.
    tol_consistency = s.tolerances.get("tol_consistency", math.inf)
    pending = sorted(s.snapshot_times)
    m0 = circle_diff.apply_Ak(s.u0, k)
    m0_scale = float(np.abs(m0).max()) or 1.0

    max_gap = 0.0

    def record(i, state, u):
        nonlocal pending, max_gap
        if i % s.stride == 0:
            m = circle_diff.momentum_k(state, u, k, tol=tol_consistency)
            max_gap = max(max_gap, float(np.abs(state.v - circle_diff.compose(u, state)).max()))
            drift = float(np.abs(m - m0).max()) / m0_scale
            series.write([state.t, circle_diff.energy(u, k), drift, state.phi_x.min()])
        while snaps and pending and abs(pending[0] - state.t) <= 0.5 * s.dt:
            snaps.write(state.t, u)
            pending = pending[1:]

    try:
        if s.solver == "exact":
            walker = _exact_burgers_walk(s.u0, s.T, s.dt, tol_diffeo)
        else:
            walker = circle_diff.iter_geodesic(s.u0, k, s.T, s.dt, dealias=s.dealias, eps_diffeo=tol_diffeo)
        for i, state, u in walker:
            report.final_time = state.t
            record(i, state, u)
    except TerminationError as exc:
        report.status, report.message = exc.status, str(exc)
    except GeoflowError as exc:
        report.status, report.message = "blowup", str(exc)
    finally:
        series.close()
        if snaps:
            snaps.close()
    if series.rows:
        report.drifts["energy"] = relative_drift(series.column("energy"))
        report.drifts["momentum"] = float(np.max(series.column("momentum_drift")))
        report.drifts["min_phi_x"] = float(np.min(series.column("min_phi_x")))
        report.checks["consistency_gap"] = max_gap
    return report


def _exact_burgers_walk(u0, T, dt, eps_diffeo):
    """Characteristics solution for k = 0, with the flow map integrated by RK4."""
    T_star = circle_diff.breaking_time(u0)
    x = circle_diff.grid(u0.size)
    state = circle_diff.FlowMapState.identity(u0)
    steps = circle_diff.n_steps(T, dt)
    u = u0.copy()
    yield 0, state, u

    def exact(t):
        return circle_diff.burgers_exact(u0, t)

    for i in range(1, steps + 1):
        t = state.t
        if t + dt >= T_star:
            raise ShockError(f"Burgers solution breaks at t = {T_star:.6g}", time=t, step=i - 1)
        u_half = exact(t + 0.5 * dt)
        u_end = exact(t + dt)

        def vel(w, psi):
            return circle_diff.evaluate(w, x + psi)

        psi = state.psi
        b1 = vel(u, psi)
        b2 = vel(u_half, psi + 0.5 * dt * b1)
        b3 = vel(u_half, psi + 0.5 * dt * b2)
        b4 = vel(u_end, psi + dt * b3)
        psi = psi + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
        u = u_end
        state = circle_diff.FlowMapState(psi, circle_diff.evaluate(u, x + psi), t + dt)
        if state.phi_x.min() <= eps_diffeo:
            raise DiffeomorphismLossError("flow map lost monotonicity", time=state.t, step=i)
        yield i, state, u


class _SnapshotWriter:
    def __init__(self, path: Path, N: int):
        self.path = path
        self._fh = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(["tag"] + [f"j{j}" for j in range(N)])
        self._writer.writerow(["x"] + [fmt(v) for v in circle_diff.grid(N)])

    def write(self, t, u):
        self._writer.writerow([fmt(t)] + [fmt(v) for v in u])

    def close(self):
        self._fh.close()


def _run_involution(s: Scenario, out: Path) -> RunReport:
    report = RunReport("completed", 0.0)
    spec = euler_arnold.so_algebra(s.n)
    threshold = s.tolerances.get("involution_threshold", euler_arnold.INVOLUTION_THRESHOLD)
    rng = np.random.default_rng(s.seed)
    samples = []
    for _ in range(s.samples):
        m = rng.standard_normal(spec.dimension)
        samples.append(m / np.linalg.norm(m))
    try:
        rigid_body.RigidBody(s.J).solve(np.zeros_like(s.J))
        funcs = euler_arnold.manakov_functions(spec, s.J)
        res = euler_arnold.involution_check(spec, funcs, samples, threshold=threshold, h=s.h)
    except SingularInertiaError as exc:
        report.status, report.message = "singular_inertia", str(exc)
        return report
    report.drifts["involution_max"] = res.max_abs
    report.checks["involution"] = {"value": res.max_abs, "threshold": threshold, "passed": res.passed}
    report.checks["manakov_count"] = {"value": rigid_body.manakov_count(s.n), "functions": len(funcs)}
    return report


def _run_expmap(s: Scenario, out: Path) -> RunReport:
    report = RunReport("completed", 0.0)
    x = circle_diff.grid(s.N)
    directions = [FIELD_PRESETS[d](x) for d in s.directions]
    try:
        probes = circle_diff.dexp_at_zero(s.k, directions, h=s.h, dt=s.dt)
        errs = {d: float(np.abs(p - w).max()) for d, p, w in zip(s.directions, probes, directions)}
        report.drifts.update({f"dexp_{d}": e for d, e in errs.items()})
        report.checks["dexp"] = {"max_error": max(errs.values(), default=0.0), "tolerance": 1e-5}
        # ray property: exp(t u0) is the time-t point of the geodesic
        traj = circle_diff.geodesic_flow(s.u0, s.k, 1.0, s.dt, stride=1)
        ray_err = 0.0
        for t in s.ray_times:
            i = int(round(t / s.dt))
            ray = circle_diff.riemannian_exp(t * s.u0, s.k, s.dt)
            ray_err = max(ray_err, float(np.abs(ray.psi - traj.psi[i]).max()))
        report.drifts["ray"] = ray_err
        report.final_time = 1.0
    except (OutOfDomainError, TerminationError) as exc:
        report.status = getattr(exc, "status", None) or getattr(exc.__cause__, "status", "blowup")
        report.message = str(exc)
    return report


def report_dict(report: RunReport) -> dict:
    return asdict(report)
