"""Acceptance criteria 1-8. Each test prints one PASS/FAIL line; run directly with ``python tests/test_acceptance.py``."""

import json
import sys
import time

import numpy as np
import pytest

from kahlerlab import algebra as ac
from kahlerlab import catalog as cat
from kahlerlab import cli
from kahlerlab import document as doc
from kahlerlab import identities as ids
from kahlerlab import jalgebra as ja
from kahlerlab import ricci_split as rs
from kahlerlab.errors import EinsteinInput, HypothesisFailed

SHIPPED = [
    ("abelian", {}),
    ("hyperbolic", {"c": 1.0}),
    ("hyperbolic", {"c": 2.0}),
    ("hyperbolic", {"c": 0.5}),
    ("product", {"curvatures": [-1.0, -2.0]}),
    ("product", {"curvatures": [-1.0, 0.0]}),
    ("polydisk", {"r": 2}),
    ("polydisk", {"r": 3}),
    ("chn", {"n": 1}),
    ("chn", {"n": 2}),
    ("chn", {"n": 3}),
    ("lorentz_tube", {"n": 3}),
    ("lorentz_tube", {"n": 4}),
    ("lorentz_tube", {"n": 5}),
]


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def _label(name, params):
    return name + "(" + ",".join(str(v) for v in params.values()) + ")"


def test_criterion_1_axiom_suite(verdict):
    start = time.perf_counter()
    failures = []
    for name, params in SHIPPED:
        ctx = cat.catalog(name, params)
        st = ctx.kahler
        reps = [ac.validate_algebra(ctx.alg, ac.TOL_JACOBI), cli.curvature_checks(st.alg, st.metric, st.gamma, st.curv, ac.TOL_ID)]
        failures += [f"{_label(name, params)}:{f}" for r in reps for f in r.failures()]
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 5.0
    verdict(1, ok, f"{len(SHIPPED)} examples, Jacobi/torsion/compatibility/symmetries/Bianchi at 1e-9, {elapsed:.2f}s; failures={failures}")


def test_criterion_2_classical_oracles(verdict):
    errs = {}
    for c in (0.5, 1.0, 2.0):
        errs[f"hyperbolic({c}) s+2c^2"] = abs(cat.catalog("hyperbolic", {"c": c}).curv.scal + 2 * c * c)
    errs["abelian |R|"] = float(np.max(np.abs(cat.catalog("abelian").curv.riem)))
    prod = cat.catalog("product", {"curvatures": [-1.0, -2.0]})
    eig = rs.ricci_eigenvalues(prod.curv, prod.metric)
    vals = [v for v, _ in eig]
    mults = [b.shape[1] for _, b in eig]
    errs["product eigenvalues"] = float(np.max(np.abs(np.array(vals) - [-2.0, -1.0]))) if len(vals) == 2 else np.inf
    ok = all(v <= 1e-9 for v in errs.values()) and mults == [2, 2]
    verdict(2, ok, f"max error {max(errs.values()):.2e}, product Ricci {vals} mult {mults}")


def test_criterion_3_lemma1(verdict):
    detail = []
    ok = True
    for curv in ([-1.0, -2.0], [-1.0, 0.0]):
        ctx = cat.catalog("product", {"curvatures": curv})
        sp = ctx.split()
        jbar = rs.build_jbar(sp, ctx.jmat)
        bst = ctx.kahler.with_j(jbar)
        d_bar = float(np.max(np.abs(bst.d_omega)))
        comm = float(np.max(np.abs(jbar @ ctx.jmat - ctx.jmat @ jbar)))
        nij = bst.nijenhuis_norm()
        rho = rs.split_residuals(ctx.kahler, sp)["rho_decomposition"]
        ok &= d_bar <= 1e-9 and comm <= 1e-9 and nij <= 1e-9 and rho <= 1e-9
        detail.append(f"{curv}: dOmega_bar={d_bar:.1e} [J,Jbar]={comm:.1e} N={nij:.1e} rho={rho:.1e}")
    verdict(3, ok, "; ".join(detail))


def test_criterion_4_deformation_and_einstein(verdict):
    ctx = cat.catalog("product", {"curvatures": [-1.0, -2.0]})
    sp = ctx.split()
    ric_res = 0.0
    for t in (0.1, 0.5, 2.0, 10.0):
        stt = ctx.kahler.with_metric(rs.deform_metric(ctx.metric, sp, t).metric)
        ric_res = max(ric_res, float(np.max(np.abs(stt.curv.ricci - ctx.curv.ricci))))
    ge = rs.einstein_normalize(ctx.metric, sp).metric
    ste = ctx.kahler.with_metric(ge)
    e_res = float(np.linalg.norm(ste.curv.ricci + 2.0 * ge.gram))
    s = ste.curv.scal
    back = rs.deform_metric(ge, sp, sp.lam / sp.mu).metric
    inv_res = float(np.max(np.abs(back.gram - ctx.metric.gram)))
    ok = ric_res <= 1e-9 and e_res <= 1e-8 and abs(s + 8.0) <= 1e-8 and inv_res <= 1e-9
    verdict(4, ok, f"Ricci invariance {ric_res:.1e}, |Ric+2g~|={e_res:.1e}, s={s:.12g}, inverse {inv_res:.1e}")


@pytest.mark.parametrize("n", [3, 4, 5])
def test_criterion_5_lorentz_tube(verdict, n):
    start = time.perf_counter()
    data = ja.bergman_normalize(ja.construct_lorentz_tube(n))
    valid = ja.validate_jalgebra(data).passed
    st = data.structure()
    s = st.curv.scal
    e_res = rs.einstein_residual(st.curv, st.metric)
    dec = ja.root_decompose(data)
    l3 = ja.lemma3_construct(data, dec)
    half = dec.half_root_dims[l3.index - 1]
    bst = st.with_j(l3.jbar)
    d_bar = float(np.max(np.abs(bst.d_omega)))
    nij = bst.nijenhuis_norm()
    elapsed = time.perf_counter() - start
    ok = valid and s < 0 and e_res <= 1e-8 and half == 0 and d_bar <= 1e-9 and nij > 1e-6 and elapsed < 10.0
    verdict(5, ok, f"n={n} dim={2 * n} valid={valid} s={s:.6g} Einstein res={e_res:.1e} index={l3.index} "
                   f"half-root dim={half} dOmega_bar={d_bar:.1e} |N|={nij:.4g} {elapsed:.2f}s")


def test_criterion_6_identity_closure(verdict):
    failures = []
    applicable = 0
    for name, params in SHIPPED:
        for rep in cat.run_suites(cat.catalog(name, params), list(cat.SUITES), tol=1e-8):
            if rep.flags.get("applicable", True):
                applicable += 1
            if not rep.passed:
                failures.append(f"{_label(name, params)}:{rep.name}:{rep.failures()}")
    tube = cat.catalog("lorentz_tube", {"n": 3})
    ak = tube.almost_kahler
    gap = ak.ricci_forms.s_star - ak.curv.scal
    gap_res = abs(gap - ak.nabla_omega_norm2)
    seki = ids.sekigawa_integrand(ak)
    einstein_checks = {c.name: c.passed for c in seki.checks}
    kst, sp, jbar = tube.theorem0_setup
    t0 = ids.theorem0_chain(kst, sp, jbar)
    ok = (not failures and gap > 0 and gap_res <= 1e-8 * max(1.0, gap)
          and einstein_checks.get("einstein_rho_phi") and einstein_checks.get("einstein_rho_lap") and t0.passed)
    verdict(6, ok, f"{applicable} applicable reports, failures={failures}; tube s*-s={gap:.6g} "
                   f"(|nabla Omega_bar|^2 residual {gap_res:.1e}); Einstein identities {einstein_checks}; "
                   f"<alpha,lap Omega_bar>-|nabla Omega_bar|^2/2 = {t0.residual:.1e}")


def test_criterion_7_negative_controls(verdict, capsys, tmp_path):
    outcomes = {}
    try:
        cat.catalog("chn", {"n": 2}).split()
        outcomes["chn split"] = False
    except EinsteinInput:
        outcomes["chn split"] = True
    for n in (2, 3):
        try:
            ja.lemma3_construct(ja.bergman_normalize(ja.construct_chn(n)))
            outcomes[f"chn({n}) lemma3"] = False
        except HypothesisFailed as exc:
            outcomes[f"chn({n}) lemma3"] = exc.root_space_dim == 2 * n - 2
    obj = json.loads(doc.dumps(doc.context_document(cat.catalog("lorentz_tube", {"n": 3}))))
    corruptions = {
        "antisymmetry": lambda o: o["brackets"].append([o["brackets"][0][1], o["brackets"][0][0], o["brackets"][0][2], 7.0]),
        "jacobi": lambda o: o["brackets"].append([2, 3, 0, 1.0]),
        "index": lambda o: o["brackets"].append([0, 1, 99, 1.0]),
    }
    for key, corrupt in corruptions.items():
        bad = json.loads(json.dumps(obj))
        corrupt(bad)
        path = tmp_path / f"{key}.json"
        path.write_text(json.dumps(bad))
        code = cli.main(["check", str(path)])
        capsys.readouterr()
        outcomes[f"corrupt {key} exit"] = code == 2
    verdict(7, all(outcomes.values()), str(outcomes))


def test_criterion_8_robustness(verdict):
    def scalars(ctx):
        reps = cat.run_suites(ctx, list(cat.SUITES))
        vals = {"s": ctx.curv.scal}
        for r in reps:
            vals.update({f"{r.name}:{k}": v for k, v in r.per_term.items()})
        return [r.passed for r in reps], vals

    worst = 0.0
    same = True
    for name, params in (("lorentz_tube", {"n": 3}), ("product", {"curvatures": [-1.0, -2.0]}), ("polydisk", {"r": 2})):
        ctx = cat.catalog(name, params)
        base_pass, base = scalars(ctx)
        for seed in range(5):
            rng = np.random.default_rng(seed)
            q, r = np.linalg.qr(rng.normal(size=(ctx.alg.dim,) * 2))
            moved_pass, moved = scalars(ctx.rebase(q * np.sign(np.diag(r))))
            same &= moved_pass == base_pass
            worst = max(worst, max(abs(moved[k] - v) / max(1.0, abs(v)) for k, v in base.items()))
    scale_err = 0.0
    for name, params in (("lorentz_tube", {"n": 3}), ("hyperbolic", {"c": 1.0}), ("product", {"curvatures": [-1.0, -2.0]})):
        ctx = cat.catalog(name, params)
        for c in (0.25, 9.0):
            scale_err = max(scale_err, abs(ctx.with_metric_scaled(c).curv.scal - ctx.curv.scal / c))
    ok = same and worst <= 1e-8 and scale_err <= 1e-8
    verdict(8, ok, f"verdicts unchanged={same}, worst relative scalar drift {worst:.1e}, scaling error {scale_err:.1e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
