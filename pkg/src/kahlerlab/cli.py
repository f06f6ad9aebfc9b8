"""Command-line front end: ``kahlerlab {check, split, verify, export}``.

Exit codes: 0 all checks pass; 2 input error; 3 Einstein input where a split
is required; 4 too many Ricci eigenvalues; 5 identity failure.
"""

import argparse
import sys

import numpy as np

from . import __version__
from . import algebra as ac
from . import catalog as cat
from . import document as doc
from . import hermitian as hm
from . import identities as ids
from . import jalgebra as ja
from . import ricci_split as rs
from .errors import EinsteinInput, KahlerLabError, NotSameSign, TooManyEigenvalues

EXIT_OK, EXIT_INPUT, EXIT_EINSTEIN, EXIT_EIGEN, EXIT_IDENTITY = 0, 2, 3, 4, 5


class InputError(Exception):
    pass


def _floats(text):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="kahlerlab", description="Left-invariant Kähler and almost-Kähler geometry on Lie algebras.")
    p.add_argument("--version", action="version", version=f"kahlerlab {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    def source(sp):
        sp.add_argument("input", nargs="?", help="AlgebraDocument JSON path")
        sp.add_argument("--example", help="catalog example name")
        sp.add_argument("--n", type=int, help="n for chn / lorentz_tube")
        sp.add_argument("--c", type=float, help="c for hyperbolic")
        sp.add_argument("--r", type=int, help="r for polydisk")
        sp.add_argument("--dim", type=int, help="dim for abelian")
        sp.add_argument("--curvatures", type=_floats, help="comma-separated curvatures for product")
        sp.add_argument("--deform-t", type=float, dest="deform_t", help="deformation parameter for Einstein j-algebra examples")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--tol-identity", type=float, default=ids.TOL_IDENTITY, dest="tol_identity")
        sp.add_argument("--tol-jacobi", type=float, default=ac.TOL_JACOBI, dest="tol_jacobi")
        sp.add_argument("--two-eigenvalue-tol", type=float, default=rs.TWO_EIGENVALUE_TOL, dest="two_eigenvalue_tol")

    sp = sub.add_parser("check", help="validate a document or example and summarize its curvature")
    source(sp)
    sp = sub.add_parser("split", help="Ricci split, Jbar, deformations and the Einstein correspondence")
    source(sp)
    sp.add_argument("--t", action="append", type=_floats, default=[], help="deformation parameter(s); repeatable or comma-separated")
    sp.add_argument("--einstein", action="store_true", help="also build the Einstein metric g^(mu/lambda)")
    sp = sub.add_parser("verify", help="run identity suites")
    source(sp)
    sp.add_argument("--suite", action="append", default=[], help=f"suite name(s): {', '.join(cat.SUITES)}, all")
    sp = sub.add_parser("export", help="write a catalog example as an AlgebraDocument")
    source(sp)
    return p


def _normalize_argv(argv):
    """Let ``--curvatures -1,-2`` through argparse, which would read ``-1,-2`` as an option."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--curvatures" and i + 1 < len(argv):
            out.append(f"--curvatures={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def _example_params(args):
    params = {}
    for key in ("n", "c", "r", "dim"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    if args.curvatures is not None:
        params["curvatures"] = args.curvatures
    if args.deform_t is not None:
        params["t"] = args.deform_t
    return params


def _tolerances(args):
    return {
        "tol_identity": args.tol_identity,
        "tol_jacobi": args.tol_jacobi,
        "tol_id": ac.TOL_ID,
        "tol_pd": ac.TOL_PD,
        "cluster_tol": ac.CLUSTER_TOL,
        "two_eigenvalue_tol": args.two_eigenvalue_tol,
    }


def load_source(args):
    """Return ``(context or None, metric-only structure data, validation reports)``."""
    if (args.input is None) == (args.example is None):
        raise InputError("give exactly one of an input document or --example")
    if args.example is not None:
        ctx = cat.catalog(args.example, _example_params(args))
        reps = [ac.validate_algebra(ctx.alg, args.tol_jacobi)]
        if ctx.jalgebra is not None:
            reps.append(ja.validate_jalgebra(ctx.jalgebra))
        return ctx, None, reps
    loaded = doc.load_document(args.input)
    reps = [ac.validate_algebra(loaded.alg, args.tol_jacobi)]
    if not reps[0].passed:
        return None, loaded, reps
    reps = loaded.validation()
    if not all(r.passed for r in reps):
        return None, loaded, reps
    kst = loaded.structure()
    if kst is None:
        return None, loaded, reps
    meta = loaded.metadata
    ctx = cat.context_from_structure(
        str(meta.get("example", "document")), kst, loaded.jalgebra,
        params=meta.get("params", {}), deform_t=float(meta.get("deform_t", cat.DEFAULT_DEFORM_T)),
        jbar_source=meta.get("jbar_source", "auto"),
    )
    return ctx, loaded, reps


def curvature_checks(alg, g, gamma, curv, tol=ac.TOL_ID):
    """Torsion, metric compatibility, curvature symmetries and both Bianchi identities, relative residuals."""
    rep = ac.ValidationReport("curvature")
    cs = max(1.0, float(np.max(np.abs(alg.brackets))))
    gs = max(1.0, float(np.max(np.abs(g.gram))))
    rs_ = max(1.0, float(np.max(np.abs(curv.riem))))
    rep.add("torsion", ac.torsion_residual(alg, gamma), tol * cs)
    rep.add("metric_compatibility", ac.metric_compat_residual(g, gamma), tol * cs * gs)
    for k, v in ac.curvature_symmetry_residuals(curv).items():
        rep.add(k, v, tol * rs_)
    rep.add("second_bianchi", ac.second_bianchi_residual(gamma, curv), tol * rs_ * max(1.0, float(np.max(np.abs(gamma)))))
    return rep


def structure_summary(st, two_eigenvalue_tol=rs.TWO_EIGENVALUE_TOL):
    eig = rs.ricci_eigenvalues(st.curv, st.metric, two_eigenvalue_tol)
    out = {
        "label": st.label,
        "ricci_eigenvalues": [v for v, _ in eig],
        "ricci_multiplicities": [b.shape[1] for _, b in eig],
        "s": st.curv.scal,
        "flat": bool(np.max(np.abs(st.curv.riem)) <= ac.TOL_ID * max(1.0, float(np.max(np.abs(st.alg.brackets))) ** 2)),
    }
    chk = hm.check_almost_complex(st.jmat, st.metric)
    if chk["pass"]:
        rf = st.ricci_forms
        out.update({
            "s_star": rf.s_star,
            "nabla_omega_sq": st.nabla_omega_norm2,
            "d_omega": float(np.max(np.abs(st.d_omega))),
            "nijenhuis_norm": st.nijenhuis_norm(),
        })
    return out


def context_summary(ctx, args):
    out = {"name": ctx.name, "params": dict(ctx.params), "dim": ctx.alg.dim, "jbar_source": ctx.jbar_source}
    out["structures"] = [structure_summary(st, args.two_eigenvalue_tol) for st in ctx.structures().values()]
    return out


def _base_report(args, verb):
    return {"tool": "kahlerlab", "version": __version__, "command": verb, "tolerances": _tolerances(args)}


def _emit(report, args):
    text = doc.dumps(report)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_report(args, verb, code, message):
    rep = _base_report(args, verb)
    rep["error"] = {"exit_code": code, "message": message}
    rep["pass"] = False
    return rep


def cmd_check(args):
    ctx, loaded, reps = load_source(args)
    report = _base_report(args, "check")
    ok = all(r.passed for r in reps)
    if ok:
        if ctx is not None:
            st = ctx.kahler
            reps.append(curvature_checks(st.alg, st.metric, st.gamma, st.curv))
            report["context"] = context_summary(ctx, args)
        else:
            g = loaded.geometry_metric()
            gamma = ac.levi_civita(loaded.alg, g)
            curv = ac.curvature(loaded.alg, g, gamma)
            reps.append(curvature_checks(loaded.alg, g, gamma, curv))
            eig = rs.ricci_eigenvalues(curv, g, args.two_eigenvalue_tol)
            report["context"] = {
                "name": str(loaded.metadata.get("example", "document")),
                "dim": loaded.alg.dim,
                "structures": [{
                    "label": "metric",
                    "ricci_eigenvalues": [v for v, _ in eig],
                    "ricci_multiplicities": [b.shape[1] for _, b in eig],
                    "s": curv.scal,
                    "flat": bool(np.max(np.abs(curv.riem)) <= ac.TOL_ID),
                }],
            }
    report["validation"] = [r.to_dict() for r in reps]
    report["pass"] = all(r.passed for r in reps)
    _emit(report, args)
    if not ok:
        return EXIT_INPUT
    return EXIT_OK if report["pass"] else EXIT_IDENTITY


def _require_context(ctx, reps):
    if not all(r.passed for r in reps):
        failed = [f"{r.name}:{k}" for r in reps for k in r.failures()]
        raise InputError("validation failed: " + ", ".join(failed))
    if ctx is None:
        raise InputError("this command needs a complex structure j in the document")


def cmd_split(args):
    ctx, _, reps = load_source(args)
    _require_context(ctx, reps)
    kst = ctx.kahler
    sp = rs.split_ricci(kst, args.two_eigenvalue_tol)
    jbar = rs.build_jbar(sp, kst.jmat)
    bst = kst.with_j(jbar, label="almost_kahler")
    res = rs.split_residuals(kst, sp)
    out = _base_report(args, "split")
    out["context"] = context_summary(ctx, args)
    scale = max(1.0, float(np.max(np.abs(kst.alg.brackets))))
    info = {
        "lambda": sp.lam,
        "mu": sp.mu,
        "mult_lambda": sp.mult_lambda,
        "mult_mu": sp.mult_mu,
        "residuals": res,
        "jbar": {
            "d_omega_bar": float(np.max(np.abs(bst.d_omega))),
            "commutator_j_jbar": float(np.max(np.abs(jbar @ kst.jmat - kst.jmat @ jbar))),
            "nijenhuis_norm": bst.nijenhuis_norm(),
            "ricci_jbar_anti_invariant": ac.norm_full(hm.type_split(kst.curv.ricci, jbar).anti_part, kst.metric),
        },
    }
    ok = max(res.values()) <= ac.TOL_ID * scale * max(1.0, abs(sp.lam), abs(sp.mu)) and info["jbar"]["d_omega_bar"] <= ac.TOL_ID * scale
    defs = []
    ric_scale = max(1.0, float(np.max(np.abs(kst.curv.ricci))))
    for t in [x for group in args.t for x in group]:
        gt = rs.deform_metric(kst.metric, sp, t).metric
        stt = kst.with_metric(gt, label=f"t={t:g}")
        ric_res = float(np.max(np.abs(stt.curv.ricci - kst.curv.ricci)))
        entry = {
            "t": t,
            "ricci_invariance_residual": ric_res,
            "kahler_nabla_omega": float(np.max(np.abs(stt.nabla_omega))),
            "ricci_eigenvalues": [v for v, _ in rs.ricci_eigenvalues(stt.curv, gt, args.two_eigenvalue_tol)],
        }
        ok = ok and ric_res <= ac.TOL_ID * ric_scale
        defs.append(entry)
    info["deformations"] = defs
    if args.einstein:
        try:
            ge = rs.einstein_normalize(kst.metric, sp).metric
            ste = kst.with_metric(ge, label="einstein")
            back = rs.deform_metric(ge, sp, sp.lam / sp.mu).metric
            e_res = rs.einstein_residual(ste.curv, ge)
            info["einstein"] = {
                "t": sp.mu / sp.lam,
                "einstein_residual": e_res,
                "ricci_minus_lambda_g": float(np.max(np.abs(ste.curv.ricci - sp.lam * ge.gram))),
                "s": ste.curv.scal,
                "expected_s": kst.dim * sp.lam,
                "inverse_deformation_residual": float(np.max(np.abs(back.gram - kst.metric.gram))),
                "volume_ratio": rs.volume_ratio(kst.metric, ge),
            }
            ok = ok and e_res <= ac.TOL_ID * ric_scale
        except NotSameSign as exc:
            info["einstein"] = {"error": str(exc)}
            ok = False
    out["split"] = info
    out["pass"] = bool(ok)
    _emit(out, args)
    return EXIT_OK if ok else EXIT_IDENTITY


def _suites(args):
    names = []
    for item in args.suite or ["all"]:
        names.extend(x.strip() for x in item.split(",") if x.strip())
    if "all" in names:
        return list(cat.SUITES)
    unknown = [x for x in names if x not in cat.SUITES]
    if unknown:
        raise InputError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(cat.SUITES)}, all")
    return names


def cmd_verify(args):
    suites = _suites(args)
    ctx, _, reps = load_source(args)
    _require_context(ctx, reps)
    reports = cat.run_suites(ctx, suites, tol=args.tol_identity)
    out = _base_report(args, "verify")
    out["context"] = context_summary(ctx, args)
    out["validation"] = [r.to_dict() for r in reps]
    out["identities"] = [r.to_dict() for r in reports]
    out["pass"] = all(r.passed for r in reports)
    _emit(out, args)
    return EXIT_OK if out["pass"] else EXIT_IDENTITY


def cmd_export(args):
    if args.example is None:
        if args.input is None:
            raise InputError("export needs --example or an input document")
        ctx, _, reps = load_source(args)
        _require_context(ctx, reps)
    else:
        ctx, _, _ = load_source(args)
    _emit(doc.context_document(ctx), args)
    return EXIT_OK


COMMANDS = {"check": cmd_check, "split": cmd_split, "verify": cmd_verify, "export": cmd_export}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_normalize_argv(argv))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.verb](args)
    except EinsteinInput as exc:
        code, msg = EXIT_EINSTEIN, str(exc)
    except TooManyEigenvalues as exc:
        code, msg = EXIT_EIGEN, str(exc)
    except (InputError, KahlerLabError, ValueError) as exc:
        code, msg = EXIT_INPUT, str(exc)
    _emit(_error_report(args, args.verb, code, msg), args)
    print(f"kahlerlab {args.verb}: {msg}", file=sys.stderr)
    return code


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
