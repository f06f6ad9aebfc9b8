"""Almost-Hermitian structure algebra on a metric Lie algebra.

Inner products follow the form convention: on 2-forms
``<psi, theta> = 1/2 sum psi_ij theta_ij`` over an orthonormal frame,
on ``Lambda^2 (x) Lambda^2`` one quarter of the full tensor sum, and the
full tensor sum on symmetric tensors. ``|nabla Omega|^2`` is the frame sum
of the 2-form norms of ``nabla_{f_i} Omega``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import algebra as ac
from .errors import InvalidInput


def apply_j(jmat, t, slots):
    """Evaluate a covariant tensor with ``J`` inserted in the given slots."""
    t = np.asarray(t, dtype=float)
    for s in slots:
        # T(.., J e_a, ..) = sum_c jmat[c, a] T(.., e_c, ..)
        t = np.moveaxis(np.tensordot(jmat, t, axes=([0], [s])), 0, s)
    return t


def check_almost_complex(jmat, g, tol=ac.TOL_ID):
    jmat = np.asarray(jmat, dtype=float)
    m = g.dim
    if jmat.shape != (m, m):
        raise InvalidInput("J has the wrong shape")
    scale = max(1.0, float(np.max(np.abs(jmat))))
    sq = float(np.max(np.abs(jmat @ jmat + np.eye(m))))
    orth = float(np.max(np.abs(jmat.T @ g.gram @ jmat - g.gram)))
    gscale = max(1.0, float(np.max(np.abs(g.gram))))
    return {"j_squared": sq, "orthogonality": orth, "pass": sq <= tol * scale**2 and orth <= tol * gscale * scale**2}


def fundamental_form(g, jmat):
    """``Omega(X, Y) = g(JX, Y)``; rejects J that is not orthogonal with ``J^2 = -1``."""
    chk = check_almost_complex(jmat, g)
    if not chk["pass"]:
        raise InvalidInput(
            f"J is not a g-orthogonal almost complex structure "
            f"(J^2+1: {chk['j_squared']:.2e}, orthogonality: {chk['orthogonality']:.2e})"
        )
    omega = np.asarray(jmat).T @ g.gram
    return 0.5 * (omega - omega.T)


@dataclass(frozen=True)
class TypeSplit:
    inv_part: np.ndarray
    anti_part: np.ndarray


def type_split(psi, jmat):
    """``psi' = (psi + psi(J., J.)) / 2`` and ``psi'' = (psi - psi(J., J.)) / 2``."""
    psi = np.asarray(psi, dtype=float)
    pj = apply_j(jmat, psi, (0, 1))
    return TypeSplit(0.5 * (psi + pj), 0.5 * (psi - pj))


def j_on_anti(jmat, psi):
    """Complex structure on J-anti-invariant 2-tensors, ``(J psi)(X, Y) = -psi(JX, Y)``."""
    return -apply_j(jmat, psi, (0,))


def j_on_1form(jmat, a):
    """``(J a)(X) = a(-JX)``."""
    return -apply_j(jmat, a, (0,))


def nijenhuis(alg, jmat):
    """``N(X, Y) = [JX, JY] - [X, Y] - J[JX, Y] - J[X, JY]``; ``N[a, b, c]`` is the e_c component."""
    c = alg.brackets
    jj = np.einsum("pa,qb,pqk->abk", jmat, jmat, c)
    jx_y = np.einsum("pa,pbk->abk", jmat, c)
    x_jy = np.einsum("qb,aqk->abk", jmat, c)
    return jj - c - np.einsum("ck,abk->abc", jmat, jx_y) - np.einsum("ck,abk->abc", jmat, x_jy)


def form_inner(psi, theta, g):
    """2-form inner product, half the full tensor contraction."""
    return 0.5 * ac.inner_full(psi, theta, g)


def form_norm2(psi, g):
    return form_inner(psi, psi, g)


def l2l2_norm2(t, g):
    """Norm squared on ``Lambda^2 (x) Lambda^2``: a quarter of the full sum."""
    return 0.25 * ac.inner_full(t, t, g)


def curvature_on_forms(curv, g, psi):
    """``R(psi)_ab = 1/2 op_abcd psi^cd`` with the sphere-positive operator tensor."""
    ginv = g.inverse
    raised = ginv @ np.asarray(psi, dtype=float) @ ginv
    return 0.5 * np.einsum("abcd,cd->ab", curv.operator_tensor, raised)


def ricci_bracket(ric, psi, g):
    """``Ric(Psi X, Y) - Ric(X, Psi Y)`` with ``psi(X, Y) = g(Psi X, Y)``."""
    psimat = g.inverse @ np.asarray(psi, dtype=float).T  # Psi e_a = sum_c psimat[c, a] e_c
    return apply_j(psimat, ric, (0,)) - apply_j(psimat, ric, (1,))


def positivity_form(psi, jmat):
    """Symmetric form ``(X, Y) -> psi(X, JY)``; PSD exactly when a (1,1)-form is semi-positive."""
    return ac.symmetrize(apply_j(jmat, psi, (1,)))


def min_eigen_g(sym, g):
    f = g.frame
    return float(np.linalg.eigvalsh(ac.symmetrize(f.T @ sym @ f))[0])


@dataclass(frozen=True)
class RicciForms:
    rho: np.ndarray
    rho_star: np.ndarray
    s: float
    s_star: float


@dataclass(frozen=True)
class GrayComponents:
    rtilde: np.ndarray
    rtilde_comm: np.ndarray
    rtilde_anti: np.ndarray


@dataclass(frozen=True, eq=False)
class Structure:
    """Left-invariant almost-Hermitian structure ``(alg, g, J)`` with cached derived data.

    ``label`` names the structure in reports.
    """

    alg: ac.LieAlgebra
    metric: ac.Metric
    jmat: np.ndarray
    label: str = "structure"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        j = np.array(self.jmat, dtype=float)
        j.setflags(write=False)
        object.__setattr__(self, "jmat", j)
        if self.alg.dim != self.metric.dim:
            raise InvalidInput("algebra and metric dimensions differ")
        if self.alg.dim % 2:
            raise InvalidInput("almost complex structures need even dimension")

    @property
    def dim(self):
        return self.alg.dim

    @property
    def n(self):
        return self.alg.dim // 2

    @cached_property
    def gamma(self):
        return ac.levi_civita(self.alg, self.metric)

    @cached_property
    def curv(self):
        return ac.curvature(self.alg, self.metric, self.gamma)

    @cached_property
    def omega(self):
        return fundamental_form(self.metric, self.jmat)

    @cached_property
    def nabla_omega(self):
        return ac.nabla_tensor(self.gamma, self.omega)

    @cached_property
    def nabla_j(self):
        """``nabla_{e_i} J = [A_i, J]`` from the connection matrices directly."""
        a = ac.connection_matrices(self.gamma)
        return np.einsum("ipq,qr->ipr", a, self.jmat) - np.einsum("pq,iqr->ipr", self.jmat, a)

    @cached_property
    def d_omega(self):
        return ac.d_form(self.alg, self.omega)

    @cached_property
    def delta_omega(self):
        return ac.codifferential(self.gamma, self.metric, self.omega)

    @cached_property
    def rough_lap_omega(self):
        return ac.rough_laplacian(self.gamma, self.metric, self.omega)

    @cached_property
    def nabla_omega_gram(self):
        """``G[i, j] = <nabla_{e_i} Omega, nabla_{e_j} Omega>``."""
        ginv = self.metric.inverse
        no = self.nabla_omega
        raised = np.einsum("ac,icd,db->iab", ginv, no, ginv)
        return 0.5 * np.einsum("iab,jab->ij", raised, no)

    @cached_property
    def nabla_omega_norm2(self):
        return float(np.einsum("ij,ij->", self.metric.inverse, self.nabla_omega_gram))

    @cached_property
    def nabla_j_norm2(self):
        ginv, gram = self.metric.inverse, self.metric.gram
        nj = self.nabla_j
        return float(np.einsum("ij,pq,rs,ipr,jqs->", ginv, gram, ginv, nj, nj))

    @cached_property
    def ricci_forms(self):
        return ricci_forms(self.curv, self.metric, self.jmat, omega=self.omega)

    @cached_property
    def phi(self):
        return phi_form(self)

    @cached_property
    def gray(self):
        return gray_components(self.curv, self.metric, self.jmat)

    @cached_property
    def nijenhuis(self):
        return nijenhuis(self.alg, self.jmat)

    def nijenhuis_norm(self):
        return ac.norm_full(np.einsum("abk,kl->abl", self.nijenhuis, self.metric.gram), self.metric)

    def is_symplectic(self, tol=ac.TOL_ID):
        return float(np.max(np.abs(self.d_omega))) <= tol * max(1.0, float(np.max(np.abs(self.alg.brackets))))

    def with_metric(self, metric, label=None):
        return Structure(self.alg, metric, self.jmat, label or self.label, dict(self.meta))

    def with_j(self, jmat, label=None):
        return Structure(self.alg, self.metric, jmat, label or self.label, dict(self.meta))

    def rebase(self, p):
        p = np.asarray(p, dtype=float)
        pinv = np.linalg.inv(p)
        return Structure(self.alg.rebase(p), self.metric.rebase(p), pinv @ self.jmat @ p, self.label, dict(self.meta))


def ricci_forms(curv, g, jmat, omega=None):
    """Ricci form ``rho = Ric'(J., .)``, twisted form ``rho* = R(Omega)``, ``s`` and ``s* = 2<R(Omega), Omega>``."""
    if omega is None:
        omega = fundamental_form(g, jmat)
    ric_inv = type_split(curv.ricci, jmat).inv_part
    rho = apply_j(jmat, ric_inv, (0,))
    rho = 0.5 * (rho - rho.T)
    rho_star = curvature_on_forms(curv, g, omega)
    s_star = 2.0 * form_inner(rho_star, omega, g)
    return RicciForms(rho, rho_star, curv.scal, s_star)


def phi_form(st):
    """``phi(X, Y) = <nabla_{JX} Omega, nabla_Y Omega>``."""
    return st.jmat.T @ st.nabla_omega_gram


def _to_frame(t, f):
    for ax in range(t.ndim):
        t = np.moveaxis(np.tensordot(f, t, axes=([0], [ax])), 0, ax)
    return t


def _from_frame(t, finv):
    return _to_frame(t, finv)


def gray_components(curv, g, jmat):
    """``R~`` (curvature operator restricted to J-anti-invariant forms) and its J-commuting/anticommuting parts.

    The split is computed in a g-orthonormal frame by conjugation averaging,
    ``R~' = (R~ - J R~ J) / 2`` as endomorphisms of the anti-invariant forms.
    """
    op = curv.operator_tensor
    r = op - apply_j(jmat, op, (0, 1)) - apply_j(jmat, op, (2, 3)) + apply_j(jmat, op, (0, 1, 2, 3))
    rtilde = 0.25 * r

    f = g.frame
    finv = np.linalg.inv(f)
    m = g.dim
    jf = finv @ jmat @ f
    rt_f = _to_frame(rtilde, f)

    eye = np.eye(m)
    # vec(psi) -> vec(J psi), (J psi)_ab = -sum_c jf[c, a] psi_cb
    kop = -np.einsum("ca,bd->abcd", jf, eye).reshape(m * m, m * m)
    # projector onto anti-invariant tensors: psi -> (psi - psi(J., J.)) / 2
    pj = np.einsum("ca,db->abcd", jf, jf).reshape(m * m, m * m)
    panti = 0.5 * (np.eye(m * m) - pj)
    endo = 0.5 * rt_f.reshape(m * m, m * m)
    conj = kop @ endo @ kop @ panti
    comm = 0.5 * (endo - conj)

    def to_tensor(mat):
        t = mat.reshape(m, m, m, m)
        return t - t.transpose(0, 1, 3, 2)

    comm_f = to_tensor(comm)
    comm_t = _from_frame(comm_f, finv)
    return GrayComponents(rtilde, comm_t, rtilde - comm_t)


def gray_anti_explicit(curv, jmat):
    """Closed-form eight-term expression for the anticommuting part ``R~''``.

    With ``(J psi)(X, Y) = -psi(JX, Y)`` an endomorphism with tensor ``T``
    commutes with J exactly when ``T(JX, Y, JZ, W) = T(X, Y, Z, W)``, so the
    mixed terms enter ``R~''`` with a minus sign.
    """
    op = curv.operator_tensor
    aj = lambda slots: apply_j(jmat, op, slots)  # noqa: E731
    return 0.125 * (
        op - aj((0, 1)) - aj((2, 3)) + aj((0, 1, 2, 3))
        - aj((1, 3)) - aj((0, 3)) - aj((1, 2)) - aj((0, 2))
    )


def nabla_omega_square(st):
    """``sum_j (nabla_{f_j} Omega) (x) (nabla_{f_j} Omega)`` over an orthonormal frame."""
    no = st.nabla_omega
    return np.einsum("ij,iab,jcd->abcd", st.metric.inverse, no, no)
