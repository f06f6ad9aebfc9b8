import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kahlerlab import algebra as ac
from kahlerlab import jalgebra as ja
from kahlerlab.errors import InvalidInput

from conftest import example, random_metric, random_orthogonal


def koszul_loops(c, gram):
    """Independent Levi-Civita oracle: plain loops over the Koszul formula."""
    m = c.shape[0]
    ginv = np.linalg.inv(gram)
    low = np.zeros((m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                s = 0.0
                for p in range(m):
                    s += c[i, j, p] * gram[p, k] - c[j, k, p] * gram[p, i] + c[k, i, p] * gram[p, j]
                low[i, j, k] = 0.5 * s
    out = np.zeros((m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                out[i, j, k] = sum(low[i, j, p] * ginv[p, k] for p in range(m))
    return out


def riemann_loops(c, gram, gamma):
    m = c.shape[0]
    nab = [gamma[i].T for i in range(m)]  # columns act on components
    out = np.zeros((m,) * 4)
    for i in range(m):
        for j in range(m):
            br = c[i, j]
            for k in range(m):
                z = np.eye(m)[k]
                r = nab[i] @ (nab[j] @ z) - nab[j] @ (nab[i] @ z) - sum(br[p] * (nab[p] @ z) for p in range(m))
                for l in range(m):
                    out[i, j, k, l] = r @ gram[:, l]
    return out


def heisenberg():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    return ac.LieAlgebra(c)


def test_ax_b_hand_oracle():
    data = ja.construct_ax_b(1.0)
    gamma = ac.levi_civita(data.alg, data.metric)
    # d(e1) = 0, d(e2) = -e1 ^ e2: nabla_{e2} e1 = -e2, nabla_{e2} e2 = e1, nabla_{e1} = 0
    assert np.allclose(gamma[1, 0], [0.0, -1.0])
    assert np.allclose(gamma[1, 1], [1.0, 0.0])
    assert np.allclose(gamma[0], 0.0)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 3.0])
def test_hyperbolic_scalar_curvature(c):
    ctx = example("hyperbolic", c=c)
    assert ctx.curv.scal == pytest.approx(-2 * c * c, abs=1e-9)


def test_abelian_is_flat():
    ctx = example("abelian", dim=6)
    assert np.max(np.abs(ctx.curv.riem)) == 0.0


def test_heisenberg_known_ricci():
    # Milnor: orthonormal basis with [e1,e2]=e3 gives Ric = diag(-1/2, -1/2, 1/2)
    alg = heisenberg()
    g = ac.Metric(np.eye(3))
    curv = ac.curvature(alg, g, ac.levi_civita(alg, g))
    assert np.allclose(curv.ricci, np.diag([-0.5, -0.5, 0.5]), atol=1e-14)
    assert curv.scal == pytest.approx(-0.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["hyperbolic", "product", "chn", "lorentz_tube"]))
def test_connection_and_curvature_match_loop_oracle(seed, name):
    rng = np.random.default_rng(seed)
    alg = example(name).alg
    g = random_metric(rng, alg.dim)
    gamma = ac.levi_civita(alg, g)
    assert np.allclose(gamma, koszul_loops(alg.brackets, g.gram), atol=1e-11)
    curv = ac.curvature(alg, g, gamma)
    assert np.allclose(curv.riem, riemann_loops(alg.brackets, g.gram, gamma), atol=1e-10)


def test_direct_sum_connection_is_block():
    a = ja.construct_ax_b(1.0).alg
    b = ja.construct_ax_b(2.0).alg
    s = ac.direct_sum(a, b)
    gamma = ac.levi_civita(s, ac.Metric(np.eye(4)))
    ga = ac.levi_civita(a, ac.Metric(np.eye(2)))
    gb = ac.levi_civita(b, ac.Metric(np.eye(2)))
    assert np.allclose(gamma[:2, :2, :2], ga)
    assert np.allclose(gamma[2:, 2:, 2:], gb)
    assert np.max(np.abs(gamma[:2, 2:])) == 0.0 and np.max(np.abs(gamma[2:, :2])) == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_d_squared_and_connection_formula(seed):
    rng = np.random.default_rng(seed)
    ctx = example("lorentz_tube", n=3)
    alg = ctx.alg
    g = random_metric(rng, alg.dim)
    gamma = ac.levi_civita(alg, g)
    a = rng.normal(size=alg.dim)
    da = ac.d_form(alg, a)
    assert np.max(np.abs(ac.d_form(alg, da))) < 1e-12
    psi = rng.normal(size=(alg.dim, alg.dim))
    psi = psi - psi.T
    assert np.allclose(ac.d_form(alg, psi), ac.d_form_via_connection(gamma, g, psi), atol=1e-11)


def test_codifferential_of_e1_on_ax_b():
    data = ja.construct_ax_b(1.0)
    g = data.metric
    gamma = ac.levi_civita(data.alg, g)
    e1 = np.array([1.0, 0.0]) @ g.gram  # metric dual of e1 is e^1 for an orthonormal basis
    assert ac.codifferential(gamma, g, e1) == pytest.approx(1.0)


def test_weyl_traceless_and_zero_on_real_hyperbolic_space():
    ctx = example("lorentz_tube", n=3)
    w = ac.weyl_tensor(ctx.curv, ctx.metric)
    ginv = ctx.metric.inverse
    assert np.max(np.abs(np.einsum("ijkl,ik->jl", w, ginv))) < 1e-12
    # R^3 x| R with ad(e0) = id is real hyperbolic 4-space, conformally flat
    c = np.zeros((4, 4, 4))
    for i in range(1, 4):
        c[0, i, i], c[i, 0, i] = 1.0, -1.0
    alg = ac.LieAlgebra(c)
    g = ac.Metric(np.eye(4))
    curv = ac.curvature(alg, g, ac.levi_civita(alg, g))
    assert curv.scal == pytest.approx(-12.0)
    assert np.max(np.abs(ac.weyl_tensor(curv, g))) < 1e-13


def test_second_bianchi_and_symmetries_on_random_metric(rng):
    alg = example("chn", n=2).alg
    g = random_metric(rng, alg.dim)
    gamma = ac.levi_civita(alg, g)
    curv = ac.curvature(alg, g, gamma)
    for v in ac.curvature_symmetry_residuals(curv).values():
        assert v < 1e-12
    assert ac.second_bianchi_residual(gamma, curv) < 1e-11
    assert ac.torsion_residual(alg, gamma) < 1e-13
    assert ac.metric_compat_residual(g, gamma) < 1e-13


def test_corrupted_antisymmetry_fails_validation():
    c = heisenberg().brackets.copy()
    c[1, 0, 2] = 0.5
    rep = ac.validate_algebra(ac.LieAlgebra(c))
    assert not rep.passed
    assert any("antisym" in f for f in rep.failures())


def test_jacobi_violation_detected():
    c = np.zeros((3, 3, 3))
    # [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e1 violates Jacobi
    for (i, j, k, v) in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 0, 1.0)]:
        c[i, j, k], c[j, i, k] = v, -v
    rep = ac.validate_algebra(ac.LieAlgebra(c))
    assert not rep.passed


def test_metric_must_be_positive_definite():
    with pytest.raises(InvalidInput):
        ac.Metric(np.diag([1.0, -1.0]))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_rebasing_preserves_scalar_curvature(seed):
    rng = np.random.default_rng(seed)
    ctx = example("product", curvatures=[-1.0, -2.0])
    p = random_orthogonal(rng, 4) @ np.diag(rng.uniform(0.5, 2.0, 4))
    alg = ctx.alg.rebase(p)
    g = ctx.metric.rebase(p)
    curv = ac.curvature(alg, g, ac.levi_civita(alg, g))
    assert curv.scal == pytest.approx(ctx.curv.scal, abs=1e-10)


def test_kulkarni_nomizu_constant_curvature():
    # sectional curvature k: R_op = k/2 g.g under the sphere-positive operator convention
    h = example("hyperbolic", c=2.0)
    g = h.metric.gram
    op = h.curv.operator_tensor
    kn = ac.kulkarni_nomizu(g, g)
    k = h.curv.scal / 2.0
    assert np.allclose(op, 0.5 * k * kn, atol=1e-12)
