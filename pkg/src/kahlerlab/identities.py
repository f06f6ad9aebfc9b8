"""Pointwise curvature identities of almost-Kähler geometry, checked on left-invariant structures.

On a Lie group every left-invariant function is constant, so Laplacians of
scalars vanish identically; divergences of invariant 1-forms do not, and are
computed with the codifferential.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import algebra as ac
from . import hermitian as hm
from . import ricci_split as rs
from .errors import InvalidInput

TOL_IDENTITY = 1e-8


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one identity check.

    ``passed`` holds when ``residual <= tol * scale`` and every entry of
    ``checks`` passes, where ``scale = max(1, lhs_norm, rhs_norm, largest
    term magnitude)``. ``checks`` carries the secondary equalities of the
    same suite; ``flags`` carries booleans that are reported, not asserted.
    """

    name: str
    lhs_norm: float
    rhs_norm: float
    residual: float
    scale: float
    tol: float
    passed: bool
    per_term: dict = field(default_factory=dict)
    checks: tuple = ()
    flags: dict = field(default_factory=dict)
    notes: tuple = ()

    def failures(self):
        out = [] if self.residual <= self.tol * self.scale else [self.name]
        for c in self.checks:
            out.extend(c.failures())
        return out

    def to_dict(self):
        return {
            "name": self.name,
            "pass": self.passed,
            "residual": self.residual,
            "lhs_norm": self.lhs_norm,
            "rhs_norm": self.rhs_norm,
            "scale": self.scale,
            "tol": self.tol,
            "per_term": {k: self.per_term[k] for k in self.per_term},
            "checks": [c.to_dict() for c in self.checks],
            "flags": {k: self.flags[k] for k in self.flags},
            "notes": list(self.notes),
        }


def make_report(name, lhs_norm, rhs_norm, residual, tol, per_term=None, checks=(), flags=None, notes=(), terms=()):
    per_term = dict(per_term or {})
    scale = max([1.0, abs(lhs_norm), abs(rhs_norm)] + [abs(float(t)) for t in terms])
    own = residual <= tol * scale
    return IdentityReport(
        name=name,
        lhs_norm=float(lhs_norm),
        rhs_norm=float(rhs_norm),
        residual=float(residual),
        scale=float(scale),
        tol=float(tol),
        passed=bool(own and all(c.passed for c in checks)),
        per_term={k: float(v) for k, v in per_term.items()},
        checks=tuple(checks),
        flags=dict(flags or {}),
        notes=tuple(notes),
    )


def _equation(name, lhs, rhs, norm, tol, per_term=None, terms=()):
    """Report for ``lhs = rhs`` with tensors measured by ``norm``."""
    return make_report(name, norm(lhs), norm(rhs), norm(lhs - rhs), tol, per_term, terms=terms)


def _scalar(name, lhs, rhs, tol, per_term=None, terms=()):
    return make_report(name, abs(lhs), abs(rhs), abs(lhs - rhs), tol, per_term, terms=terms)


def _bound(name, value, tol, scale_terms=()):
    """Report for ``value <= 0``."""
    return make_report(name, value, 0.0, max(value, 0.0), tol, {"value": value}, terms=scale_terms)


def _form_norm(g):
    return lambda psi: float(np.sqrt(max(hm.form_norm2(psi, g), 0.0)))


def _l2l2_norm(g):
    return lambda t: float(np.sqrt(max(hm.l2l2_norm2(t, g), 0.0)))


def require_almost_kahler(st, tol=ac.TOL_ID):
    scale = max(1.0, float(np.max(np.abs(st.alg.brackets)))) * max(1.0, float(np.max(np.abs(st.omega))))
    resid = float(np.max(np.abs(st.d_omega))) if st.dim > 2 else 0.0
    if resid > tol * scale:
        raise InvalidInput(f"fundamental form is not closed (|d Omega| = {resid:.3e}); structure is not almost Kähler")


def _weyl_on_forms(st, psi):
    ginv = st.metric.inverse
    w = ac.weyl_tensor(st.curv, st.metric)
    return 0.5 * np.einsum("abcd,cd->ab", w, ginv @ psi @ ginv)


def verify_weitzenboeck_2form(st, psi=None, tol=TOL_IDENTITY):
    """Weitzenböck formula for an invariant 2-form (``Omega`` by default).

    Checks ``Delta psi - nabla*nabla psi = [Ric(Psi., .) - Ric(., Psi.)] - 2 R(psi)``
    and, in dimension ``2n >= 4``, the Weyl form of the right-hand side.
    """
    g = st.metric
    psi = st.omega if psi is None else np.asarray(psi, dtype=float)
    norm = _form_norm(g)
    lap = ac.hodge_laplacian(st.alg, st.gamma, g, psi)
    rough = ac.rough_laplacian(st.gamma, g, psi)
    bracket = hm.ricci_bracket(st.curv.ricci, psi, g)
    rpsi = hm.curvature_on_forms(st.curv, g, psi)
    lhs = lap - rough
    rhs = bracket - 2.0 * rpsi
    per = {"hodge_laplacian": norm(lap), "rough_laplacian": norm(rough), "ricci_bracket": norm(bracket), "curvature_term": norm(2.0 * rpsi)}
    checks, notes = [], []
    n = st.n
    if n >= 2:
        s = st.curv.scal
        ric0 = st.curv.ricci - s / st.dim * g.gram
        scal_term = 2.0 * (n - 1) / (n * (2 * n - 1)) * s * psi
        weyl_term = -2.0 * _weyl_on_forms(st, psi)
        ric0_term = (n - 2) / (n - 1) * hm.ricci_bracket(ric0, psi, g)
        rhs2 = scal_term + weyl_term + ric0_term
        checks.append(
            _equation(
                "weyl_form", rhs, rhs2, norm, tol,
                {"scalar_term": norm(scal_term), "weyl_term": norm(weyl_term), "traceless_ricci_term": norm(ric0_term)},
                terms=(norm(scal_term), norm(weyl_term), norm(ric0_term)),
            )
        )
    else:
        notes.append("Weyl form skipped: dimension 2")
    rep = _equation("weitzenboeck_2form", lhs, rhs, norm, tol, per, terms=per.values())
    return make_report(rep.name, rep.lhs_norm, rep.rhs_norm, rep.residual, tol, rep.per_term, checks, notes=notes, terms=per.values())


def verify_rstar_relation(st, tol=TOL_IDENTITY):
    """``rho* - rho = 1/2 nabla*nabla Omega`` and ``s* - s = |nabla Omega|^2 = 1/2 |nabla J|^2``.

    Also checks ``<P(Omega), Omega> = s - s*`` for the operator
    ``P(psi) = 2(n-1)/(n(2n-1)) s psi - 2 W(psi)`` when ``2n >= 4``.

    Raises
    ------
    InvalidInput
        If the fundamental form is not closed.
    """
    require_almost_kahler(st)
    g = st.metric
    norm = _form_norm(g)
    rf = st.ricci_forms
    half_lap = 0.5 * st.rough_lap_omega
    lhs = rf.rho_star - rf.rho
    per = {
        "s": rf.s, "s_star": rf.s_star,
        "nabla_omega_sq": st.nabla_omega_norm2, "nabla_j_sq": st.nabla_j_norm2,
        "rho_norm": norm(rf.rho), "rho_star_norm": norm(rf.rho_star),
    }
    checks = [
        _scalar("s_star_minus_s", rf.s_star - rf.s, st.nabla_omega_norm2, tol, terms=(rf.s, rf.s_star)),
        _scalar("nabla_j_half", st.nabla_omega_norm2, 0.5 * st.nabla_j_norm2, tol),
    ]
    if st.n >= 2:
        n = st.n
        p_omega = 2.0 * (n - 1) / (n * (2 * n - 1)) * rf.s * st.omega - 2.0 * _weyl_on_forms(st, st.omega)
        val = hm.form_inner(p_omega, st.omega, g)
        per["p_omega_omega"] = val
        checks.append(_scalar("p_operator", val, -st.nabla_omega_norm2, tol, terms=(rf.s, rf.s_star)))
    return make_report(
        "rstar_relation", norm(lhs), norm(half_lap), norm(lhs - half_lap), tol, per, checks,
        terms=(norm(rf.rho), norm(rf.rho_star)),
    )


def _complex_10_basis(jmat, g):
    """Basis ``f_k - i J f_k`` of ``T^{1,0}`` from a g-orthonormal J-adapted frame."""
    f = g.frame
    m = g.dim
    vecs = []
    for k in range(m):
        v = f[:, k].astype(complex)
        z = v - 1j * (jmat @ f[:, k])
        if vecs:
            basis = np.column_stack(vecs)
            coef, *_ = np.linalg.lstsq(basis, z, rcond=None)
            if np.linalg.norm(basis @ coef - z) < 1e-8:
                continue
        vecs.append(z)
        if len(vecs) == m // 2:
            break
    return np.column_stack(vecs)


def gray_k_term(st):
    """``<K(R o R), Omega (x) Omega>`` with ``R o R`` composed as endomorphisms of 2-tensors.

    ``(R h)_XY = sum R(e_i, X, e_j, Y) h(e_i, e_j)`` and ``K`` is four times
    the projection onto ``Lambda^2 (x) Lambda^2``.
    """
    f = st.metric.frame
    rf = hm._to_frame(st.curv.operator_tensor, f)
    om = hm._to_frame(st.omega, f)
    b = np.einsum("ixjy,kilj->kxly", rf, rf)
    proj = 0.25 * (b - b.transpose(1, 0, 2, 3) - b.transpose(0, 1, 3, 2) + b.transpose(1, 0, 3, 2))
    return 0.25 * np.einsum("abcd,ab,cd->", 4.0 * proj, om, om)


def verify_gray(st, tol=TOL_IDENTITY):
    """Gray's identity ``R~' = -1/4 sum_j nabla_{e_j} Omega (x) nabla_{e_j} Omega``.

    Secondary checks: the closed eight-term formula for ``R~''``, the
    quadratic consequence ``<K(R o R), Omega (x) Omega> = 4(|R~'|^2 - |R~''|^2)
    = 1/2 |phi|^2 - 4 |R~''|^2``, and ``R~'' = R = W`` on ``T^{1,0}``.
    """
    require_almost_kahler(st)
    g = st.metric
    norm = _l2l2_norm(g)
    gray = st.gray
    sq = hm.nabla_omega_square(st)
    rhs = -0.25 * sq
    comm2 = hm.l2l2_norm2(gray.rtilde_comm, g)
    anti2 = hm.l2l2_norm2(gray.rtilde_anti, g)
    phi2 = hm.form_norm2(st.phi, g)
    kval = gray_k_term(st)
    per = {"rtilde_comm_sq": comm2, "rtilde_anti_sq": anti2, "phi_sq": phi2, "k_term": kval}
    checks = [
        _equation("anti_part_closed_form", gray.rtilde_anti, hm.gray_anti_explicit(st.curv, st.jmat), norm, tol),
        _scalar("k_term_algebraic", kval, 4.0 * (comm2 - anti2), tol, terms=(4 * comm2, 4 * anti2)),
        _scalar("k_term_phi", kval, 0.5 * phi2 - 4.0 * anti2, tol, terms=(0.5 * phi2, 4 * anti2)),
    ]
    if st.n >= 2:
        z = _complex_10_basis(st.jmat, g)
        ev = lambda t: np.einsum("abcd,ai,bj,ck,dl->ijkl", t, z, z, z, z)  # noqa: E731
        a10 = ev(gray.rtilde_anti)
        r10 = ev(st.curv.operator_tensor)
        w10 = ev(ac.weyl_tensor(st.curv, g))
        big = max(1.0, float(np.max(np.abs(r10))))
        checks.append(make_report("anti_part_on_10_equals_R", np.max(np.abs(a10)), np.max(np.abs(r10)), np.max(np.abs(a10 - r10)), tol, terms=(big,)))
        checks.append(make_report("R_on_10_equals_W", np.max(np.abs(r10)), np.max(np.abs(w10)), np.max(np.abs(r10 - w10)), tol, terms=(big,)))
    return make_report(
        "gray", norm(gray.rtilde_comm), norm(rhs), norm(gray.rtilde_comm - rhs), tol, per, checks,
        terms=(norm(gray.rtilde),),
    )


PROP2_TERMS = (
    "div_J_div_J_ric_anti",
    "div_rho_star_nabla_omega",
    "ric_anti_sq",
    "rtilde_anti_sq",
    "rough_lap_omega_sq",
    "phi_sq",
    "rho_phi",
    "rho_rough_lap_omega",
)


def prop2_terms(st):
    """The eight right-hand terms of the fourth-order identity for ``Delta(s* - s)``, with intermediates."""
    g, jmat, gamma = st.metric, st.jmat, st.gamma
    ric_anti = hm.type_split(st.curv.ricci, jmat).anti_part
    j_ric = hm.j_on_anti(jmat, ric_anti)
    div1 = ac.codifferential(gamma, g, j_ric)
    j_div1 = hm.j_on_1form(jmat, div1)
    div2 = float(ac.codifferential(gamma, g, j_div1))
    rf = st.ricci_forms
    theta = np.array([hm.form_inner(rf.rho_star, st.nabla_omega[i], g) for i in range(st.dim)])
    div_theta = float(ac.codifferential(gamma, g, theta))
    lap = st.rough_lap_omega
    vals = (
        -4.0 * div2,
        8.0 * div_theta,
        2.0 * ac.inner_full(ric_anti, ric_anti, g),
        -8.0 * hm.l2l2_norm2(st.gray.rtilde_anti, g),
        -hm.form_norm2(lap, g),
        -hm.form_norm2(st.phi, g),
        4.0 * hm.form_inner(rf.rho, st.phi, g),
        -4.0 * hm.form_inner(rf.rho, lap, g),
    )
    gn = lambda a: float(np.sqrt(max(np.einsum("i,ij,j->", a, g.inverse, a), 0.0)))  # noqa: E731
    inter = {
        "J_ric_anti_norm": ac.norm_full(j_ric, g),
        "div_J_ric_anti_norm": gn(div1),
        "J_div_J_ric_anti_norm": gn(j_div1),
        "theta_norm": gn(theta),
    }
    return dict(zip(PROP2_TERMS, vals)), inter


def verify_prop2(st, tol=TOL_IDENTITY):
    """Fourth-order identity: the eight terms sum to ``Delta(s* - s) = 0`` on invariant structures."""
    require_almost_kahler(st)
    terms, inter = prop2_terms(st)
    total = sum(terms.values())
    per = dict(terms)
    per.update(inter)
    per["sum"] = total
    big = max(abs(v) for v in terms.values())
    return make_report(
        "prop2", 0.0, big, abs(total), tol, per,
        notes=("left side is the Laplacian of the constant s* - s, hence zero",),
        terms=terms.values(),
    )


def _is_einstein(st, tol):
    g = st.metric
    ric0 = st.curv.ricci - st.curv.scal / st.dim * g.gram
    return ac.norm_full(ric0, g) <= tol * max(1.0, ac.norm_full(st.curv.ricci, g))


def sekigawa_integrand(st, tol=TOL_IDENTITY):
    """``4<rho, phi> - 4<rho, nabla*nabla Omega> - |nabla*nabla Omega|^2 - |phi|^2``.

    The value is cross-checked against its divergence form from the
    fourth-order identity. Einstein inputs also check
    ``2<rho, phi> = <rho, nabla*nabla Omega> = s/(2n) |nabla Omega|^2``, and,
    when ``s >= 0``, that ``nabla Omega = 0``.
    """
    require_almost_kahler(st)
    g = st.metric
    terms, _ = prop2_terms(st)
    value = terms["rho_phi"] + terms["rho_rough_lap_omega"] + terms["rough_lap_omega_sq"] + terms["phi_sq"]
    divergence_form = -(terms["div_J_div_J_ric_anti"] + terms["div_rho_star_nabla_omega"] + terms["ric_anti_sq"] + terms["rtilde_anti_sq"])
    ric_anti = hm.type_split(st.curv.ricci, st.jmat).anti_part
    ric_scale = max(1.0, ac.norm_full(st.curv.ricci, g))
    ric_invariant = ac.norm_full(ric_anti, g) <= tol * ric_scale
    einstein = _is_einstein(st, tol)
    rf = st.ricci_forms
    lap = st.rough_lap_omega
    rho_phi = hm.form_inner(rf.rho, st.phi, g)
    rho_lap = hm.form_inner(rf.rho, lap, g)
    s, n = st.curv.scal, st.n
    per = {
        "integrand": value,
        "rho_phi": rho_phi,
        "rho_rough_lap_omega": rho_lap,
        "rough_lap_omega_sq": hm.form_norm2(lap, g),
        "phi_sq": hm.form_norm2(st.phi, g),
        "nabla_omega_sq": st.nabla_omega_norm2,
        "s": s,
    }
    checks = []
    notes = []
    if einstein:
        target = s / (2 * n) * st.nabla_omega_norm2
        checks.append(_scalar("einstein_rho_phi", 2.0 * rho_phi, rho_lap, tol, terms=(target,)))
        checks.append(_scalar("einstein_rho_lap", rho_lap, target, tol, terms=(s, st.nabla_omega_norm2)))
        closed = -(s / n) * st.nabla_omega_norm2 - per["rough_lap_omega_sq"] - per["phi_sq"]
        checks.append(_scalar("einstein_integrand", value, closed, tol, terms=(closed,)))
        if s >= -tol * max(1.0, abs(s)):
            checks.append(make_report("nonnegative_einstein_forces_kahler", st.nabla_omega_norm2, 0.0, st.nabla_omega_norm2, tol))
    if not ric_invariant:
        notes.append("Ricci tensor is not J-invariant: the integral inequality hypothesis fails")
    flags = {"ricci_j_invariant": bool(ric_invariant), "einstein": bool(einstein), "integrand_nonpositive": bool(value <= tol * max(1.0, abs(value)))}
    return make_report(
        "sekigawa", abs(value), abs(divergence_form), abs(value - divergence_form), tol, per, checks, flags, notes,
        terms=list(terms.values()),
    )


def theorem0_chain(kst, split, jbar=None, tol=TOL_IDENTITY):
    """Pointwise chain behind the integrability argument for the commuting structure ``Jbar``.

    ``kst`` is the Kähler structure, ``split`` its Ricci split. Checks
    ``<alpha, nabla*nabla Omega_bar> = 1/2 |nabla Omega_bar|^2``, the Ricci
    form ``rho_bar = lam alpha - mu beta``, the first equality of the chain,
    semi-positivity of ``alpha`` and ``phi_bar``, and the final bound
    ``<rho_bar, phi_bar> - <rho_bar, nabla*nabla Omega_bar> <= -(lam/2) |nabla Omega_bar|^2``.
    """
    g = kst.metric
    if jbar is None:
        jbar = rs.build_jbar(split, kst.jmat)
    bst = kst.with_j(jbar, label="almost_kahler")
    require_almost_kahler(bst)
    lam, mu = split.lam, split.mu
    alpha, beta = split.alpha, split.beta
    norm = _form_norm(g)
    nob2 = bst.nabla_omega_norm2
    lap = bst.rough_lap_omega
    phi = bst.phi
    rho_bar = bst.ricci_forms.rho
    a_lap = hm.form_inner(alpha, lap, g)
    # <alpha, nabla_X Omega_bar> and <nabla alpha, nabla Omega_bar>
    na = ac.nabla_tensor(bst.gamma, alpha)
    a_dot = max((abs(hm.form_inner(alpha, bst.nabla_omega[i], g)) for i in range(bst.dim)), default=0.0)
    grad_pair = float(np.einsum("ij,ij->", g.inverse, np.array([[hm.form_inner(na[i], bst.nabla_omega[j], g) for j in range(bst.dim)] for i in range(bst.dim)])))
    lhs_chain = hm.form_inner(rho_bar, phi, g) - hm.form_inner(rho_bar, lap, g)
    rhs_chain = (
        (lam - mu) * hm.form_inner(alpha, phi, g)
        + (mu - lam) * a_lap
        + mu * hm.form_inner(bst.omega, phi, g)
        - mu * hm.form_inner(bst.omega, lap, g)
    )
    pos_alpha = hm.min_eigen_g(hm.positivity_form(alpha, kst.jmat), g)
    pos_phi = hm.min_eigen_g(hm.positivity_form(phi, jbar), g)
    slack = lhs_chain + 0.5 * lam * nob2
    per = {
        "lambda": lam, "mu": mu,
        "alpha_rough_lap": a_lap, "nabla_omega_bar_sq": nob2,
        "chain_value": lhs_chain, "bound": -0.5 * lam * nob2, "bound_slack": slack,
        "alpha_min_eig": pos_alpha, "phi_bar_min_eig": pos_phi,
    }
    sc = (abs(lam) + abs(mu)) * max(1.0, nob2)
    checks = [
        _equation("rho_bar", rho_bar, lam * alpha - mu * beta, norm, tol, terms=(abs(lam) * norm(alpha), abs(mu) * norm(beta))),
        _scalar("alpha_orthogonal_nabla_omega_bar", a_dot, 0.0, tol, terms=(nob2,)),
        _scalar("alpha_lap_as_gradient_pairing", a_lap, grad_pair, tol),
        _scalar("chain_first_equality", lhs_chain, rhs_chain, tol, terms=(sc,)),
        _scalar("chain_second_line", rhs_chain, (lam - mu) * hm.form_inner(alpha, phi, g) + (mu - lam) * a_lap - 0.5 * mu * nob2, tol, terms=(sc,)),
        make_report("alpha_semipositive", max(-pos_alpha, 0.0), 0.0, max(-pos_alpha, 0.0), tol),
        make_report("phi_bar_semipositive", max(-pos_phi, 0.0), 0.0, max(-pos_phi, 0.0), tol, terms=(nob2,)),
        _bound("final_bound", slack, tol, scale_terms=(sc,)),
    ]
    flags = {"lambda_nonnegative": bool(lam >= 0), "jbar_integrable": bool(bst.nijenhuis_norm() <= tol * max(1.0, nob2))}
    return make_report("theorem0", abs(a_lap), abs(0.5 * nob2), abs(a_lap - 0.5 * nob2), tol, per, checks, flags, terms=(nob2,))


@dataclass(frozen=True)
class Remark4Report:
    """Nijenhuis blocks of ``Jbar`` by eigenspace type and the total-geodesy residual of ``E_lambda``.

    ``blocks`` maps a type such as ``"lam,mu,mu"`` (for ``<N(A, B), B'>``) to
    the norm of that block in g-orthonormal bases of the eigenspaces.
    """

    blocks: dict
    surviving: tuple
    claim_holds: bool
    hypothesis_mu_nonnegative: bool
    totally_geodesic_residual: float
    antisymmetry_residual: float
    tol: float

    def to_dict(self):
        return {
            "blocks": dict(self.blocks),
            "surviving": list(self.surviving),
            "claim_holds": self.claim_holds,
            "hypothesis_mu_nonnegative": self.hypothesis_mu_nonnegative,
            "totally_geodesic_residual": self.totally_geodesic_residual,
            "antisymmetry_residual": self.antisymmetry_residual,
            "tol": self.tol,
        }


def _eigenspace_basis(proj, g):
    vals = ac.symmetric_eigensplit(ac.symmetrize(g.gram @ proj), g)
    return vals[-1][1] if vals and vals[-1][0] > 0.5 else np.zeros((g.dim, 0))


def remark4_component_analysis(kst, split, jbar=None, tol=TOL_IDENTITY):
    """Which blocks of ``<N^Jbar(X, Y), Z>`` vanish, by ``E_lambda`` / ``E_mu`` type of the arguments."""
    g = kst.metric
    if jbar is None:
        jbar = rs.build_jbar(split, kst.jmat)
    nj = hm.nijenhuis(kst.alg, jbar)
    ng = np.einsum("abk,kc->abc", nj, g.gram)
    bases = {"lam": _eigenspace_basis(split.proj_lambda, g), "mu": _eigenspace_basis(split.proj_mu, g)}
    blocks = {}
    for a, b, c in itertools.product(("lam", "mu"), repeat=3):
        blk = np.einsum("abc,ai,bj,ck->ijk", ng, bases[a], bases[b], bases[c])
        blocks[f"{a},{b},{c}"] = float(np.linalg.norm(blk)) if blk.size else 0.0
    scale = max(1.0, float(np.sqrt(sum(v * v for v in blocks.values()))))
    nonzero = tuple(k for k, v in blocks.items() if v > tol * scale)
    allowed = {"lam,mu,mu", "mu,lam,mu"}
    anti = float(np.max(np.abs(ng + ng.transpose(1, 0, 2)))) if ng.size else 0.0
    lowered = np.einsum("ijk,kl->ijl", kst.gamma, g.gram)
    tg = np.einsum("ijl,ia,jb,lc->abc", lowered, bases["lam"], bases["lam"], bases["mu"])
    return Remark4Report(
        blocks=blocks,
        surviving=nonzero,
        claim_holds=set(nonzero) <= allowed,
        hypothesis_mu_nonnegative=bool(split.mu >= 0),
        totally_geodesic_residual=float(np.linalg.norm(tg)) if tg.size else 0.0,
        antisymmetry_residual=anti,
        tol=tol,
    )


def remark4_report(kst, split, jbar=None, tol=TOL_IDENTITY):
    """IdentityReport wrapper: asserts only the antisymmetry of ``N``; block data go to per_term and flags."""
    r = remark4_component_analysis(kst, split, jbar, tol)
    per = {f"block[{k}]": v for k, v in r.blocks.items()}
    per["totally_geodesic_residual"] = r.totally_geodesic_residual
    scale_terms = list(r.blocks.values())
    flags = {
        "claim_holds": r.claim_holds,
        "hypothesis_mu_nonnegative": r.hypothesis_mu_nonnegative,
        "e_lambda_totally_geodesic": bool(r.totally_geodesic_residual <= tol * max(1.0, max(scale_terms, default=0.0))),
    }
    notes = ("surviving blocks: " + (", ".join(r.surviving) if r.surviving else "none"),)
    return make_report("remark4", 0.0, 0.0, r.antisymmetry_residual, tol, per, flags=flags, notes=notes, terms=scale_terms)


def sekigawa_terms_family(kst, split, jbar, ts):
    """Terms of the integrand for ``(g^t, Jbar)`` over a list of deformation parameters."""
    out = []
    for t in ts:
        gt = rs.deform_metric(kst.metric, split, t).metric
        st = hm.Structure(kst.alg, gt, jbar, label=f"t={t}")
        terms, _ = prop2_terms(st)
        out.append({
            "t": float(t),
            "rho_phi": terms["rho_phi"],
            "rho_rough_lap_omega": terms["rho_rough_lap_omega"],
            "rough_lap_omega_sq": terms["rough_lap_omega_sq"],
            "phi_sq": terms["phi_sq"],
            "integrand": terms["rho_phi"] + terms["rho_rough_lap_omega"] + terms["rough_lap_omega_sq"] + terms["phi_sq"],
            "nabla_omega_sq": st.nabla_omega_norm2,
        })
    return out
