from types import SimpleNamespace

import numpy as np
import pytest

from kahlerlab import algebra as ac
from kahlerlab import catalog as cat
from kahlerlab import jalgebra as ja
from kahlerlab import ricci_split as rs
from kahlerlab.errors import HypothesisFailed, StructuralError

from conftest import example, random_orthogonal


def tube(n):
    return ja.bergman_normalize(ja.construct_lorentz_tube(n))


@pytest.mark.parametrize("data", [ja.construct_ax_b(1.0), ja.construct_ax_b(2.5), ja.construct_chn(2), ja.construct_lorentz_tube(4)])
def test_model_jalgebras_validate(data):
    rep = ja.validate_jalgebra(data)
    assert rep.passed, rep.failures()


def test_abelian_is_not_a_normal_jalgebra():
    data = ja.JAlgebra(ac.abelian(2), cat.standard_j(2), np.array([0.0, 1.0]))
    assert ja.validate_jalgebra(data).failures() == ["form_positive"]


def test_non_integrable_j_rejected():
    data = ja.construct_lorentz_tube(3)
    rng = np.random.default_rng(3)
    q = random_orthogonal(rng, data.dim)
    bad = ja.JAlgebra(data.alg, q @ data.jmat @ q.T, data.omega)
    assert not ja.validate_jalgebra(bad).passed


@pytest.mark.parametrize("n", [3, 4, 5])
def test_lorentz_tube_roots(n):
    dec = ja.root_decompose(tube(n))
    assert dec.rank == 2
    assert ja.root_space_dims(dec) == {(1.0, 0.0): 1, (0.0, 1.0): 1, (0.5, 0.5): n - 2, (0.5, -0.5): n - 2}
    assert dec.half_root_dims == [0, 0]
    assert max(ja.check_root_decomposition(tube(n), dec).values()) < 1e-9


@pytest.mark.parametrize("n", [1, 2, 3])
def test_chn_roots_and_lemma3_failure(n):
    data = ja.bergman_normalize(ja.construct_chn(n))
    dec = ja.root_decompose(data)
    assert dec.rank == 1
    expected = {(1.0,): 1} if n == 1 else {(1.0,): 1, (0.5,): 2 * n - 2}
    assert ja.root_space_dims(dec) == expected
    if n == 1:
        # CH^1 is the hyperbolic plane; its half-root space is empty
        assert ja.lemma3_construct(data).qualifying == [1]
        return
    with pytest.raises(HypothesisFailed) as exc:
        ja.lemma3_construct(data)
    assert exc.value.root_space_dim == 2 * n - 2


def test_lemma3_on_tube_and_polydisk():
    l3 = ja.lemma3_construct(tube(3))
    assert l3.index == 2 and l3.qualifying == [2]
    with pytest.raises(HypothesisFailed):
        ja.lemma3_construct(tube(3), index=1)
    poly = ja.bergman_normalize(ja.direct_sum_jalgebras(ja.construct_ax_b(), ja.construct_ax_b()))
    assert ja.lemma3_construct(poly).qualifying == [1, 2]


@pytest.mark.parametrize("n", [3, 4])
def test_lemma3_structure_is_almost_kahler_commuting(n):
    data = tube(n)
    l3 = ja.lemma3_construct(data)
    st = data.structure()
    bst = st.with_j(l3.jbar)
    assert np.allclose(l3.jbar @ l3.jbar, -np.eye(2 * n))
    assert np.allclose(l3.jbar @ st.jmat, st.jmat @ l3.jbar)
    assert np.max(np.abs(ac.d_form(data.alg, l3.alpha))) < 1e-12
    assert np.allclose(bst.omega, l3.omega_bar, atol=1e-12)
    assert np.max(np.abs(bst.d_omega)) < 1e-12
    assert bst.nijenhuis_norm() > 1e-6


@pytest.mark.parametrize("data", [ja.construct_ax_b(1.0), ja.construct_chn(2), ja.construct_lorentz_tube(3), ja.construct_lorentz_tube(5)])
def test_bergman_metric_is_einstein(data):
    nd = ja.bergman_normalize(data)
    st = nd.structure()
    assert np.max(np.abs(st.curv.ricci + st.metric.gram)) < 1e-10
    kc = ja.koszul_ricci_check(st)
    assert kc["constant"] == pytest.approx(-0.5, abs=1e-12)
    assert kc["residual"] < 1e-12


def test_tube_omega_is_proportional_to_bergman():
    for n in (3, 4, 5):
        meta = tube(n).meta
        assert meta["omega_scale"] == pytest.approx(n / 2)
        assert meta["omega_proportionality_residual"] < 1e-12


def test_root_decomposition_is_basis_free():
    rng = np.random.default_rng(11)
    data = tube(4)
    p = random_orthogonal(rng, 8) @ np.diag(rng.uniform(0.5, 2.0, 8))
    moved = data.rebase(p)
    assert ja.root_space_dims(ja.root_decompose(moved)) == ja.root_space_dims(ja.root_decompose(data))
    assert ja.lemma3_construct(moved).qualifying == [2]


def test_direct_sum_split_matches_factors():
    data = ja.direct_sum_jalgebras(ja.construct_ax_b(1.0), ja.construct_ax_b(np.sqrt(2.0)))
    sp = rs.split_ricci(data.structure())
    assert (sp.lam, sp.mu) == (pytest.approx(-2.0), pytest.approx(-1.0))


def test_structural_error_on_degenerate_stub():
    # [A, X] = X with an abelian factor: rank 3 complement but one distinguished root
    c = np.zeros((4, 4, 4))
    c[0, 1, 1], c[1, 0, 1] = 1.0, -1.0
    stub = SimpleNamespace(alg=ac.LieAlgebra(c), metric=ac.Metric(np.eye(4)), jmat=cat.standard_j(4))
    with pytest.raises(StructuralError):
        ja.root_decompose(stub)


def test_derived_series():
    assert ja.derived_series_length(ja.construct_chn(2).alg) == 3
    assert ja.derived_series_length(ac.abelian(2)) == 1
    assert ja.derived_series_length(example("hyperbolic").alg) == 2
