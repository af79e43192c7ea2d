import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoflow import lie_core as lc
from geoflow.errors import DegenerateFormError, DimensionError

from conftest import random_rotation, random_skew

dims = st.sampled_from([3, 4, 5, 6])
seeds = st.integers(0, 2**32 - 1)


@given(n=dims, seed=seeds)
def test_constructors_are_skew(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n))
    y = rng.standard_normal(n)
    z = rng.standard_normal(n)
    for w in (lc.skew_matrix(x), lc.covector(x), lc.l_op(y, z), lc.bracket(lc.skew_matrix(x), lc.l_op(y, z))):
        assert np.abs(w + w.T).max() == 0.0
    for e in lc.so_basis(n):
        assert np.abs(e + e.T).max() == 0.0


@given(n=dims, seed=seeds)
def test_jacobi_identity(n, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_skew(rng, n) for _ in range(3))
    scale = max(np.linalg.norm(m) for m in (a, b, c))
    cyc = (
        lc.bracket(a, lc.bracket(b, c))
        + lc.bracket(b, lc.bracket(c, a))
        + lc.bracket(c, lc.bracket(a, b))
    )
    assert np.linalg.norm(cyc) <= 1e-12 * scale**3


@given(n=dims, seed=seeds)
def test_adjoint_preserves_bracket(n, seed):
    rng = np.random.default_rng(seed)
    g = random_rotation(rng, n)
    a, b = random_skew(rng, n), random_skew(rng, n)
    lhs = lc.bracket(lc.adjoint(g, a), lc.adjoint(g, b))
    rhs = lc.adjoint(g, lc.bracket(a, b))
    assert np.abs(lhs - rhs).max() <= 1e-10


@given(n=dims, seed=seeds)
def test_l_op_duality(n, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    w = random_skew(rng, n)
    assert lc.killing_pair(lc.l_op(x, y), w) == pytest.approx((w @ x) @ y, abs=1e-12)


@given(n=dims, seed=seeds)
def test_coadjoint_actions_dualize_adjoint_actions(n, seed):
    rng = np.random.default_rng(seed)
    g = random_rotation(rng, n)
    w, m, xi = (random_skew(rng, n) for _ in range(3))
    # <ad*_w m, xi> = <m, [w, xi]>
    assert lc.killing_pair(lc.coadjoint_ad_star(w, m), xi) == pytest.approx(
        lc.killing_pair(m, lc.bracket(w, xi)), abs=1e-12
    )
    # <Ad*_g m, Ad_g xi> = <m, xi>
    assert lc.killing_pair(lc.coadjoint(g, m), lc.adjoint(g, xi)) == pytest.approx(
        lc.killing_pair(m, xi), abs=1e-12
    )


@pytest.mark.parametrize("n", [3, 4, 5])
def test_killing_forms(n, rng):
    a, b = random_skew(rng, n), random_skew(rng, n)
    assert lc.killing_pair(a, b) == pytest.approx(lc.killing_pair(b, a))
    assert lc.killing_pair(a, a) > 0
    # Killing form = trace of ad_a ad_b over the basis
    E = lc.so_basis(n)
    gram = np.array([[lc.killing_pair(x, y) for y in E] for x in E])
    np.testing.assert_allclose(gram, np.eye(len(E)), atol=1e-15)

    def ad(x):
        return np.array([[lc.killing_pair(lc.bracket(x, e), f) for e in E] for f in E])

    assert lc.killing_canonical(a, b) == pytest.approx(np.trace(ad(a) @ ad(b)), rel=1e-12)
    assert lc.killing_canonical(a, b) == pytest.approx(-2 * (n - 2) * lc.killing_pair(a, b))


def test_killing_canonical_degenerate_for_so2():
    a = lc.l_op([1.0, 0.0], [0.0, 1.0])
    with pytest.raises(DegenerateFormError):
        lc.killing_canonical(a, a)


def test_hat_vee_cross_product(rng):
    a, b = rng.standard_normal(3), rng.standard_normal(3)
    np.testing.assert_allclose(lc.hat(a) @ b, np.cross(a, b), atol=1e-15)
    np.testing.assert_allclose(lc.vee(lc.hat(a)), a)
    np.testing.assert_allclose(lc.bracket(lc.hat(a), lc.hat(b)), lc.hat(np.cross(a, b)), atol=1e-14)


def test_bracket_of_basis_elements():
    # [L(e1,e2), L(e2,e3)] = L(e1,e3) up to sign fixed by L(x,y) = y x^T - x y^T
    e = np.eye(3)
    lhs = lc.bracket(lc.l_op(e[0], e[1]), lc.l_op(e[1], e[2]))
    np.testing.assert_allclose(lhs, -lc.l_op(e[0], e[2]))


def test_cayley_is_rotation(rng):
    for n in (3, 4, 5):
        g = lc.cayley(random_skew(rng, n, 3.0))
        assert lc.orthogonality_error(g) < 1e-13
        lc.rotation_matrix(g)


def test_rotation_matrix_rejects_reflections_and_drift():
    with pytest.raises(DimensionError):
        lc.rotation_matrix(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(DimensionError):
        lc.rotation_matrix(np.eye(3) * (1 + 1e-6))


def test_dimension_checks():
    with pytest.raises(DimensionError):
        lc.bracket(np.zeros((3, 3)), np.zeros((4, 4)))
    with pytest.raises(DimensionError):
        lc.skew_matrix(np.zeros((2, 3)))
    with pytest.raises(DimensionError):
        lc.l_op([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        lc.hat([1.0, 2.0])
