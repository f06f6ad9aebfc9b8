"""Example registry and the per-example pipeline (split, deform, verify)."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import algebra as ac
from . import hermitian as hm
from . import identities as ids
from . import jalgebra as ja
from . import ricci_split as rs
from .errors import EinsteinInput, HypothesisFailed, InvalidInput, StructuralError, TooManyEigenvalues

SUITES = ("weitzenboeck", "rstar", "gray", "prop2", "sekigawa", "theorem0", "remark4")
DEFAULT_DEFORM_T = 2.0


def standard_j(dim):
    """``J e_{2k} = e_{2k+1}`` on consecutive coordinate pairs."""
    j = np.zeros((dim, dim))
    for k in range(dim // 2):
        j[2 * k + 1, 2 * k] = 1.0
        j[2 * k, 2 * k + 1] = -1.0
    return j


@dataclass(frozen=True, eq=False)
class Context:
    """Assembled example: a Kähler structure plus, when available, a commuting almost-Kähler ``Jbar``.

    ``jbar_source`` is ``"ricci_split"`` when ``Jbar`` comes from the
    two-eigenvalue split of the Kähler metric and ``"lemma3"`` when it comes
    from the closed (1,1)-form construction on a normal j-algebra.
    """

    name: str
    params: dict
    kahler: hm.Structure
    jalgebra: ja.JAlgebra = None
    jbar: np.ndarray = None
    jbar_source: str = None
    lemma3: ja.Lemma3Result = None
    deform_t: float = DEFAULT_DEFORM_T
    meta: dict = field(default_factory=dict)

    @property
    def alg(self):
        return self.kahler.alg

    @property
    def metric(self):
        return self.kahler.metric

    @property
    def jmat(self):
        return self.kahler.jmat

    @property
    def curv(self):
        return self.kahler.curv

    @cached_property
    def almost_kahler(self):
        if self.jbar is None:
            return None
        return self.kahler.with_j(self.jbar, label="almost_kahler")

    def split(self):
        """Ricci split of the Kähler structure; raises EinsteinInput / TooManyEigenvalues."""
        return rs.split_ricci(self.kahler)

    @cached_property
    def theorem0_setup(self):
        """``(kahler_structure, split, jbar)`` with a two-eigenvalue Kähler metric, or ``None``.

        For Einstein examples carrying a closed (1,1)-form structure the Kähler metric
        is deformed by ``deform_t`` across the commuting splitting first.
        """
        try:
            sp = self.split()
            return self.kahler, sp, rs.build_jbar(sp, self.jmat)
        except EinsteinInput:
            pass
        if self.lemma3 is None:
            return None
        pp, pm = rs.commuting_projectors(self.jmat, self.lemma3.jbar)
        sp0 = rs.split_from_projectors(self.kahler.omega, pp, pm)
        gt = rs.deform_metric(self.metric, sp0, self.deform_t).metric
        kst = self.kahler.with_metric(gt, label=f"kahler_t={self.deform_t:g}")
        sp = rs.split_ricci(kst)
        return kst, sp, rs.build_jbar(sp, self.jmat)

    def structures(self):
        """Structures the single-structure suites run on, keyed by label."""
        out = {"kahler": self.kahler}
        if self.almost_kahler is not None:
            out["almost_kahler"] = self.almost_kahler
        return out

    def rebase(self, p):
        """Same example in the basis given by the columns of ``p``."""
        p = np.asarray(p, dtype=float)
        pinv = np.linalg.inv(p)
        l3 = None
        if self.lemma3 is not None:
            l3 = ja.Lemma3Result(
                self.lemma3.index, p.T @ self.lemma3.alpha @ p, pinv @ self.lemma3.jbar @ p,
                p.T @ self.lemma3.omega_bar @ p, self.lemma3.qualifying,
            )
        return Context(
            self.name, dict(self.params), self.kahler.rebase(p),
            self.jalgebra.rebase(p) if self.jalgebra is not None else None,
            pinv @ self.jbar @ p if self.jbar is not None else None,
            self.jbar_source, l3, self.deform_t, dict(self.meta),
        )

    def with_metric_scaled(self, c):
        """Same example with ``g`` replaced by ``c g``."""
        kst = self.kahler.with_metric(self.metric.scaled(c))
        l3 = self.lemma3
        if l3 is not None:
            l3 = ja.Lemma3Result(l3.index, c * l3.alpha, l3.jbar, c * l3.omega_bar, l3.qualifying)
        return Context(self.name, dict(self.params), kst, None, self.jbar, self.jbar_source, l3, self.deform_t, dict(self.meta))


def _from_jalgebra(name, params, data, with_lemma3, deform_t=DEFAULT_DEFORM_T):
    rep = ja.validate_jalgebra(data)
    if not rep.passed:
        raise InvalidInput(f"{name}: j-algebra axioms fail: {', '.join(rep.failures())}")
    kst = data.structure()
    l3 = None
    jbar, source = None, None
    if with_lemma3:
        l3 = ja.lemma3_construct(data)
        jbar, source = l3.jbar, "lemma3"
    return Context(name, params, kst, data, jbar, source, l3, deform_t, dict(data.meta))


def _with_split_jbar(name, params, kst, data=None):
    jbar, source = None, None
    try:
        sp = rs.split_ricci(kst)
        jbar, source = rs.build_jbar(sp, kst.jmat), "ricci_split"
    except (EinsteinInput, TooManyEigenvalues):
        pass
    return Context(name, params, kst, data, jbar, source)


def _positive_int(params, key, default, minimum):
    v = params.get(key, default)
    if isinstance(v, bool) or int(v) != v or int(v) < minimum:
        raise InvalidInput(f"parameter {key} must be an integer >= {minimum}, got {v!r}")
    return int(v)


def _positive_float(params, key, default):
    v = float(params.get(key, default))
    if not np.isfinite(v) or v <= 0:
        raise InvalidInput(f"parameter {key} must be positive, got {v!r}")
    return v


def build_abelian(params):
    dim = _positive_int(params, "dim", 4, 2)
    if dim % 2:
        raise InvalidInput("abelian example needs even dim")
    alg = ac.abelian(dim)
    kst = hm.Structure(alg, ac.Metric(np.eye(dim)), standard_j(dim), "kahler")
    return Context("abelian", {"dim": dim}, kst)


def build_hyperbolic(params):
    c = _positive_float(params, "c", 1.0)
    data = ja.construct_ax_b(c)
    return Context("hyperbolic", {"c": c}, data.structure(), data)


def _surface_factor(k):
    if k < 0:
        return ja.construct_ax_b(float(np.sqrt(-k)))
    if k == 0:
        return None
    raise InvalidInput(f"curvature {k} > 0 has no left-invariant model")


def build_product(params):
    curv = params.get("curvatures", [-1.0, -2.0])
    curv = [float(x) for x in curv]
    if len(curv) < 1:
        raise InvalidInput("product needs at least one curvature")
    factors = [_surface_factor(k) for k in curv]
    algs, js = [], []
    for f in factors:
        if f is None:
            algs.append(ac.abelian(2))
            js.append(standard_j(2))
        else:
            algs.append(f.alg)
            js.append(f.jmat)
    alg = ac.direct_sum(*algs)
    m = alg.dim
    kst = hm.Structure(alg, ac.Metric(np.eye(m)), ac.block_diag(*js), "kahler")
    data = ja.direct_sum_jalgebras(*factors) if all(f is not None for f in factors) else None
    return _with_split_jbar("product", {"curvatures": curv}, kst, data)


def build_polydisk(params):
    r = _positive_int(params, "r", 2, 1)
    data = ja.bergman_normalize(ja.direct_sum_jalgebras(*[ja.construct_ax_b(1.0) for _ in range(r)]))
    return _from_jalgebra("polydisk", {"r": r}, data, with_lemma3=True)


def build_chn(params):
    n = _positive_int(params, "n", 2, 1)
    data = ja.bergman_normalize(ja.construct_chn(n))
    return _from_jalgebra("chn", {"n": n}, data, with_lemma3=False)


def build_lorentz_tube(params):
    n = _positive_int(params, "n", 3, 3)
    t = _positive_float(params, "t", DEFAULT_DEFORM_T)
    data = ja.bergman_normalize(ja.construct_lorentz_tube(n))
    return _from_jalgebra("lorentz_tube", {"n": n, "t": t}, data, with_lemma3=True, deform_t=t)


REGISTRY = {
    "abelian": build_abelian,
    "hyperbolic": build_hyperbolic,
    "product": build_product,
    "polydisk": build_polydisk,
    "chn": build_chn,
    "lorentz_tube": build_lorentz_tube,
}


def catalog(name, params=None):
    """Build a named example. Known names: abelian, hyperbolic, product, polydisk, chn, lorentz_tube."""
    if name not in REGISTRY:
        raise InvalidInput(f"unknown example {name!r}; known: {', '.join(sorted(REGISTRY))}")
    return REGISTRY[name](dict(params or {}))


def context_from_structure(name, kst, data=None, params=None, deform_t=DEFAULT_DEFORM_T, jbar_source="auto"):
    """Context for a user-supplied Kähler structure.

    ``jbar_source`` selects where ``Jbar`` comes from: ``"ricci_split"``,
    ``"lemma3"`` (needs a j-algebra), ``None`` for no ``Jbar``, or ``"auto"``:
    the Ricci split when there is one, else the closed (1,1)-form
    construction on an Einstein j-algebra input whose hypothesis holds.
    """
    params = dict(params or {})
    meta = dict(data.meta) if data is not None else {}
    if jbar_source is None:
        return Context(name, params, kst, data, deform_t=deform_t, meta=meta)
    if jbar_source == "ricci_split":
        sp = rs.split_ricci(kst)
        return Context(name, params, kst, data, rs.build_jbar(sp, kst.jmat), "ricci_split", None, deform_t, meta)
    if jbar_source == "lemma3":
        if data is None:
            raise InvalidInput("the closed (1,1)-form construction needs a j-algebra document")
        l3 = ja.lemma3_construct(data)
        return Context(name, params, kst, data, l3.jbar, "lemma3", l3, deform_t, meta)
    if jbar_source != "auto":
        raise InvalidInput(f"unknown jbar source {jbar_source!r}")
    try:
        sp = rs.split_ricci(kst)
        return Context(name, params, kst, data, rs.build_jbar(sp, kst.jmat), "ricci_split", None, deform_t, meta)
    except TooManyEigenvalues:
        return Context(name, params, kst, data, deform_t=deform_t, meta=meta)
    except EinsteinInput:
        pass
    if data is not None:
        try:
            l3 = ja.lemma3_construct(data)
            return Context(name, params, kst, data, l3.jbar, "lemma3", l3, deform_t, meta)
        except (HypothesisFailed, StructuralError):
            pass
    return Context(name, params, kst, data, deform_t=deform_t, meta=meta)


def _not_applicable(name, reason, tol):
    return ids.make_report(name, 0.0, 0.0, 0.0, tol, flags={"applicable": False}, notes=(reason,))


def run_suites(ctx, suites, tol=ids.TOL_IDENTITY):
    """Run the named identity suites; returns a list of IdentityReport (names suffixed by structure label)."""
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise InvalidInput(f"unknown suite(s): {', '.join(unknown)}")
    out = []
    single = {
        "weitzenboeck": ids.verify_weitzenboeck_2form,
        "rstar": ids.verify_rstar_relation,
        "gray": ids.verify_gray,
        "prop2": ids.verify_prop2,
        "sekigawa": ids.sekigawa_integrand,
    }
    for suite in SUITES:
        if suite not in suites:
            continue
        if suite in single:
            for label, st in ctx.structures().items():
                if suite != "weitzenboeck" and not st.is_symplectic():
                    out.append(_not_applicable(f"{suite}[{label}]", "fundamental form not closed", tol))
                    continue
                rep = single[suite](st, tol=tol)
                out.append(_renamed(rep, f"{suite}[{label}]"))
            continue
        setup = ctx.theorem0_setup
        if setup is None:
            out.append(_not_applicable(suite, "no two-eigenvalue Kähler metric with commuting structure", tol))
            continue
        kst, sp, jbar = setup
        if suite == "theorem0":
            out.append(ids.theorem0_chain(kst, sp, jbar, tol=tol))
        else:
            out.append(ids.remark4_report(kst, sp, jbar, tol=tol))
    return out


def _renamed(rep, name):
    return ids.IdentityReport(
        name, rep.lhs_norm, rep.rhs_norm, rep.residual, rep.scale, rep.tol, rep.passed,
        rep.per_term, rep.checks, rep.flags, rep.notes,
    )
