"""Linear algebra on so(n): skew matrices, the trace pairing, brackets and
the adjoint/coadjoint actions of SO(n).

Covectors (angular momenta) are stored as skew matrices through the trace
pairing ``<a, b> = -1/2 tr(ab)``.  They get their own alias so signatures
make clear which action applies.
"""

from __future__ import annotations

from typing import NewType

import numpy as np

from .errors import DegenerateFormError, DimensionError

SkewMatrix = NewType("SkewMatrix", np.ndarray)
RotationMatrix = NewType("RotationMatrix", np.ndarray)
Covector = NewType("Covector", np.ndarray)

ORTHOGONALITY_TOL = 1e-10


def _square(x, name="matrix"):
    a = np.asarray(x, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] < 2:
        raise DimensionError(f"{name} dimension must be >= 2, got {a.shape[0]}")
    return a


def _same_dim(*mats):
    n = mats[0].shape[0]
    for m in mats[1:]:
        if m.shape[0] != n:
            raise DimensionError(f"dimension mismatch: {n} vs {m.shape[0]}")
    return n


def skew_matrix(x) -> SkewMatrix:
    """Project ``x`` onto so(n) with ``(x - x^T)/2``."""
    a = _square(x, "skew matrix")
    return SkewMatrix(0.5 * (a - a.T))


def covector(x) -> Covector:
    """Momentum in so(n)*, represented by its skew matrix."""
    return Covector(skew_matrix(x))


def rotation_matrix(g, tol: float = ORTHOGONALITY_TOL) -> RotationMatrix:
    """Validate ``g`` as an element of SO(n)."""
    a = _square(g, "rotation")
    err = np.linalg.norm(a.T @ a - np.eye(a.shape[0]))
    if err > tol:
        raise DimensionError(f"not orthogonal: ||g^T g - I||_F = {err:.3e} > {tol:.1e}")
    if np.linalg.det(a) <= 0:
        raise DimensionError("rotation must have positive determinant")
    return RotationMatrix(a)


def orthogonality_error(g) -> float:
    g = np.asarray(g, dtype=float)
    return float(np.linalg.norm(g.T @ g - np.eye(g.shape[0])))


def l_op(x, y) -> SkewMatrix:
    """The wedge map ``L(x, y) = y x^T - x y^T``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DimensionError(f"l_op needs two vectors of equal length, got {x.shape} and {y.shape}")
    if x.shape[0] < 2:
        raise DimensionError("l_op needs n >= 2")
    return SkewMatrix(np.outer(y, x) - np.outer(x, y))


def killing_pair(a, b) -> float:
    """Positive-definite trace pairing ``-1/2 tr(ab)`` on so(n)."""
    a = _square(a)
    b = _square(b)
    _same_dim(a, b)
    # tr(ab) = sum_ij a_ij b_ji
    return float(-0.5 * np.einsum("ij,ji->", a, b))


def killing_canonical(a, b) -> float:
    """Killing form ``tr(ad_a ad_b) = (n - 2) tr(ab)`` of so(n)."""
    a = _square(a)
    b = _square(b)
    n = _same_dim(a, b)
    if n < 3:
        raise DegenerateFormError("the Killing form of so(2) vanishes identically")
    return float((n - 2) * np.einsum("ij,ji->", a, b))


def bracket(a, b) -> SkewMatrix:
    """Matrix commutator ``ab - ba``."""
    a = _square(a)
    b = _square(b)
    _same_dim(a, b)
    return SkewMatrix(a @ b - b @ a)


def adjoint(g, w) -> SkewMatrix:
    """``Ad_g w = g w g^T``."""
    g = _square(g, "rotation")
    w = _square(w)
    _same_dim(g, w)
    return SkewMatrix(g @ w @ g.T)


def coadjoint(g, m) -> Covector:
    """``Ad*_g m = g m g^T`` under the trace identification."""
    return Covector(adjoint(g, m))


def coadjoint_ad_star(w, m) -> Covector:
    """Infinitesimal coadjoint action ``ad*_w m = -[w, m]``.

    Satisfies ``<ad*_w m, xi> = <m, [w, xi]>`` for the trace pairing.
    """
    return Covector(-bracket(w, m))


def hat(v) -> SkewMatrix:
    """R^3 -> so(3) with ``hat(a) @ b == cross(a, b)``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DimensionError(f"hat needs a 3-vector, got shape {v.shape}")
    return SkewMatrix(
        np.array(
            [
                [0.0, -v[2], v[1]],
                [v[2], 0.0, -v[0]],
                [-v[1], v[0], 0.0],
            ]
        )
    )


def vee(w) -> np.ndarray:
    w = _square(w)
    if w.shape[0] != 3:
        raise DimensionError(f"vee needs a 3x3 matrix, got {w.shape}")
    return np.array([w[2, 1], w[0, 2], w[1, 0]])


def so_basis(n: int) -> np.ndarray:
    """Basis ``L(e_i, e_j)``, i < j, of so(n), orthonormal for the trace pairing.

    Returned as an array of shape ``(n(n-1)/2, n, n)``, pairs in
    lexicographic order.
    """
    if n < 2:
        raise DimensionError("so(n) needs n >= 2")
    eye = np.eye(n)
    return np.array([l_op(eye[i], eye[j]) for i in range(n) for j in range(i + 1, n)])


def cayley(x) -> np.ndarray:
    """Cayley transform ``(I - x/2)^{-1} (I + x/2)``; maps so(n) into SO(n)."""
    x = np.asarray(x, dtype=float)
    eye = np.eye(x.shape[0])
    return np.linalg.solve(eye - 0.5 * x, eye + 0.5 * x)
