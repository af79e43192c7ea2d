"""Scenario documents: a flat JSON object describing one run.

See ``docs/scenarios.md`` for the schema and the preset tables.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import circle_diff, lie_core
from .errors import ConfigError

KINDS = ("rigid_body", "circle", "involution", "expmap")

# Initial fields on the circle, x -> u0(x).  Versioned: never change an entry,
# add a new name instead.
FIELD_PRESETS = {
    "zero": lambda x: 0.0 * x,
    "const": lambda x: 1.0 + 0.0 * x,
    "cos1": lambda x: np.cos(x),
    "half_cos": lambda x: 0.5 * np.cos(x),
    "neg_sin": lambda x: -np.sin(x),
    "small_sin": lambda x: 0.1 * np.sin(x),
    "sin2": lambda x: np.sin(2 * x),
    "cos3": lambda x: np.cos(3 * x),
}

# Initial body angular velocities.  Vector presets are for n = 3 and pass
# through hat(); "random_unit" draws from the scenario seed.
OMEGA_PRESETS = {
    "near_axis1": (1.0, 1e-3, 0.0),
    "near_axis2": (1e-3, 1.0, 0.0),
    "diagonal": tuple(np.ones(3) / np.sqrt(3.0)),
}

COMMON_KEYS = {"kind", "name", "seed", "stride", "T", "dt"}
TOLERANCE_KEYS = {"tol_orthogonality", "tol_diffeo", "tol_consistency", "involution_threshold"}
INERTIA_KEYS = {"J", "J_diag", "masses"}
KIND_KEYS = {
    "rigid_body": {"n", "omega0", "integrator", "manakov"} | INERTIA_KEYS,
    "circle": {"N", "k", "u0", "u0_fourier", "u0_scale", "integrator", "solver", "dealias", "snapshot_times"},
    "involution": {"n", "samples", "h"} | INERTIA_KEYS,
    "expmap": {"N", "k", "u0", "u0_fourier", "u0_scale", "directions", "h", "ray_times"},
}


@dataclass
class Scenario:
    kind: str
    name: str = "run"
    seed: int = 0
    stride: int = 1
    T: float | None = None
    dt: float | None = None
    # rigid body / involution
    n: int | None = None
    J: np.ndarray | None = None
    omega0: np.ndarray | None = None
    integrator: str = "rk4"
    manakov: bool = True
    samples: int = 10
    h: float | None = None
    # circle / expmap
    N: int = 256
    k: int = 1
    u0: np.ndarray | None = None
    solver: str = "spectral"
    dealias: bool = False
    snapshot_times: list = field(default_factory=list)
    directions: list = field(default_factory=list)
    ray_times: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)


def _number(doc, key, *, positive=False, integer=False, default=None):
    if key not in doc:
        if default is None:
            raise ConfigError("required field is missing", key)
        return default
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"expected a number, got {val!r}", key)
    if integer and (not float(val).is_integer()):
        raise ConfigError(f"expected an integer, got {val!r}", key)
    if not math.isfinite(val):
        raise ConfigError("must be finite", key)
    if positive and val <= 0:
        raise ConfigError(f"must be positive, got {val!r}", key)
    return int(val) if integer else float(val)


def _matrix(val, key):
    try:
        arr = np.asarray(val, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("expected a numeric matrix", key) from None
    if not np.all(np.isfinite(arr)):
        raise ConfigError("entries must be finite", key)
    return arr


def _inertia(doc) -> np.ndarray:
    present = [k for k in ("J", "J_diag", "masses") if k in doc]
    if len(present) != 1:
        raise ConfigError(
            f"exactly one inertia source (J, J_diag, masses) required, got {present or 'none'}", "inertia"
        )
    key = present[0]
    if key == "J":
        J = _matrix(doc["J"], "J")
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise ConfigError(f"must be a square matrix, got shape {J.shape}", "J")
        if not np.allclose(J, J.T):
            raise ConfigError("must be symmetric", "J")
        return J
    if key == "J_diag":
        d = _matrix(doc["J_diag"], "J_diag")
        if d.ndim != 1 or d.size < 2:
            raise ConfigError("expected a list of at least two numbers", "J_diag")
        return np.diag(d)
    from .rigid_body import MassDistribution, moment_matrix

    atoms = doc["masses"]
    if not isinstance(atoms, list) or not atoms:
        raise ConfigError("expected a non-empty list of [mass, [x1, ..., xn]]", "masses")
    try:
        dist = MassDistribution.from_atoms((float(a[0]), [float(c) for c in a[1]]) for a in atoms)
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"bad atom list: {exc}", "masses") from None
    return moment_matrix(dist)


def _omega(doc, n, seed):
    val = doc.get("omega0")
    if val is None:
        raise ConfigError("required field is missing", "omega0")
    if isinstance(val, str):
        if val == "random_unit":
            rng = np.random.default_rng(seed)
            w = lie_core.skew_matrix(rng.standard_normal((n, n)))
            return w / math.sqrt(lie_core.killing_pair(w, w))
        if val not in OMEGA_PRESETS:
            raise ConfigError(f"unknown preset {val!r}; known: {sorted(OMEGA_PRESETS) + ['random_unit']}", "omega0")
        if n != 3:
            raise ConfigError(f"preset {val!r} is three-dimensional but n = {n}", "omega0")
        return lie_core.hat(OMEGA_PRESETS[val])
    arr = _matrix(val, "omega0")
    if arr.ndim == 1:
        if arr.size != 3 or n != 3:
            raise ConfigError("vector form is only accepted for n = 3", "omega0")
        return lie_core.hat(arr)
    if arr.shape != (n, n):
        raise ConfigError(f"expected an {n}x{n} matrix, got shape {arr.shape}", "omega0")
    return lie_core.skew_matrix(arr)


def _field(doc, N, key="u0"):
    fourier_key = f"{key}_fourier"
    present = [k for k in (key, fourier_key) if k in doc]
    if len(present) != 1:
        raise ConfigError(f"exactly one of {key}, {fourier_key} required", key)
    if key in doc:
        name = doc[key]
        if not isinstance(name, str) or name not in FIELD_PRESETS:
            raise ConfigError(f"unknown preset {name!r}; known: {sorted(FIELD_PRESETS)}", key)
        u = FIELD_PRESETS[name](circle_diff.grid(N))
    else:
        terms = doc[fourier_key]
        if not isinstance(terms, list) or not all(isinstance(t, list) and len(t) == 3 for t in terms):
            raise ConfigError("expected a list of [mode, cos_coeff, sin_coeff]", fourier_key)
        try:
            u = circle_diff.from_fourier(N, terms)
        except Exception as exc:
            raise ConfigError(str(exc), fourier_key) from None
    scale = _number(doc, f"{key}_scale", default=1.0)
    return np.asarray(u, dtype=float) * scale


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document, applying defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", "document") from None
    return scenario_from_dict(doc)


def scenario_from_dict(doc: dict[str, Any]) -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a JSON object", "document")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"expected one of {KINDS}, got {kind!r}", "kind")
    allowed = COMMON_KEYS | TOLERANCE_KEYS | KIND_KEYS[kind]
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys for kind {kind!r}: {unknown}", unknown[0])
    for key, val in doc.items():
        if isinstance(val, dict):
            raise ConfigError("nested objects are not allowed", key)

    name = doc.get("name", "run")
    if not isinstance(name, str) or not name or any(c in name for c in "/\\"):
        raise ConfigError("must be a non-empty string without path separators", "name")
    s = Scenario(kind=kind, name=name, source=dict(doc))
    s.seed = _number(doc, "seed", integer=True, default=0)
    s.stride = _number(doc, "stride", integer=True, positive=True, default=1)
    s.tolerances = {k: _number(doc, k, positive=True) for k in TOLERANCE_KEYS if k in doc}

    if kind in ("rigid_body", "circle"):
        s.dt = _number(doc, "dt", positive=True)
        s.T = _number(doc, "T", positive=True)
    if kind in ("rigid_body", "involution"):
        s.J = _inertia(doc)
        n = s.J.shape[0]
        if "n" in doc and _number(doc, "n", integer=True) != n:
            raise ConfigError(f"n = {doc['n']} does not match the inertia source ({n})", "n")
        s.n = n
    if kind == "rigid_body":
        s.omega0 = _omega(doc, s.n, s.seed)
        s.integrator = doc.get("integrator", "rk4")
        if s.integrator not in ("rk4", "cayley_liegroup"):
            raise ConfigError(f"unknown integrator {s.integrator!r}", "integrator")
        s.manakov = bool(doc.get("manakov", True))
    if kind == "involution":
        s.samples = _number(doc, "samples", integer=True, positive=True, default=10)
        if "h" in doc:
            s.h = _number(doc, "h", positive=True)
    if kind in ("circle", "expmap"):
        s.N = _number(doc, "N", integer=True, positive=True, default=256)
        if s.N < 16 or s.N & (s.N - 1):
            raise ConfigError("must be a power of two >= 16", "N")
        s.k = _number(doc, "k", integer=True, default=1)
        if s.k not in circle_diff.SUPPORTED_K:
            raise ConfigError(f"must be one of {circle_diff.SUPPORTED_K}", "k")
        s.u0 = _field(doc, s.N)
    if kind == "circle":
        s.integrator = doc.get("integrator", "rk4")
        if s.integrator != "rk4":
            raise ConfigError("only rk4 is available for circle runs", "integrator")
        s.solver = doc.get("solver", "spectral")
        if s.solver not in ("spectral", "exact"):
            raise ConfigError(f"unknown solver {s.solver!r}", "solver")
        if s.solver == "exact" and s.k != 0:
            raise ConfigError("the exact characteristics solver requires k = 0", "solver")
        s.dealias = bool(doc.get("dealias", False))
        times = doc.get("snapshot_times", [])
        if not isinstance(times, list) or not all(isinstance(t, (int, float)) and 0 <= t <= s.T for t in times):
            raise ConfigError("expected a list of times in [0, T]", "snapshot_times")
        s.snapshot_times = [float(t) for t in times]
    if kind == "expmap":
        s.dt = _number(doc, "dt", positive=True, default=1e-3)
        s.h = _number(doc, "h", positive=True, default=1e-4)
        dirs = doc.get("directions", ["cos1", "sin2", "cos3"])
        if not isinstance(dirs, list) or not all(isinstance(d, str) and d in FIELD_PRESETS for d in dirs):
            raise ConfigError(f"expected a list of field presets from {sorted(FIELD_PRESETS)}", "directions")
        s.directions = list(dirs)
        times = doc.get("ray_times", [0.25, 0.5, 0.75])
        if not isinstance(times, list) or not all(isinstance(t, (int, float)) and 0 < t <= 1 for t in times):
            raise ConfigError("expected a list of times in (0, 1]", "ray_times")
        s.ray_times = [float(t) for t in times]
    if s.dt is not None and s.T is not None:
        steps = s.T / s.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ConfigError(f"T = {s.T} is not a whole number of steps of dt = {s.dt}", "T")
    return s


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
