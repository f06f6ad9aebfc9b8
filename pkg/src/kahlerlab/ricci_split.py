"""Two-eigenvalue Ricci splitting, the commuting almost-Kähler structure and the metric deformation family."""

import itertools
from dataclasses import dataclass

import numpy as np

from . import algebra as ac
from .eigen import cluster_eigenvalues, jacobi_eigh
from .errors import EinsteinInput, InvalidInput, NotSameSign, TooManyEigenvalues

TWO_EIGENVALUE_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class RicciSplit:
    """Eigen-splitting of Ricci for a Kähler structure with eigenvalues ``lam < mu``.

    ``proj_lambda``/``proj_mu`` are g-orthogonal projectors acting on coordinate
    columns; ``alpha`` and ``beta`` are the restrictions of Omega to the
    two eigenspaces.
    """

    lam: float
    mu: float
    proj_lambda: np.ndarray
    proj_mu: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    mult_lambda: int
    mult_mu: int


@dataclass(frozen=True, eq=False)
class DeformedMetric:
    t: float
    metric: ac.Metric

    @property
    def gram_t(self):
        return self.metric.gram


def ricci_eigenvalues(curv, g, two_eigenvalue_tol=TWO_EIGENVALUE_TOL):
    """Clustered eigenvalues of the Ricci endomorphism: list of ``(value, g-orthonormal basis)``."""
    f = g.frame
    w, v = jacobi_eigh(ac.symmetrize(f.T @ curv.ricci @ f))
    out = []
    for group in cluster_eigenvalues(w, two_eigenvalue_tol):
        out.append((float(np.mean(w[group])), f @ v[:, group]))
    return out


def restrict_form(omega, proj):
    """``omega(pr X, pr Y)``."""
    return proj.T @ omega @ proj


def split_from_projectors(omega, proj_plus, proj_minus, lam=np.nan, mu=np.nan):
    alpha = restrict_form(omega, proj_plus)
    beta = omega - alpha
    return RicciSplit(
        float(lam), float(mu), proj_plus, proj_minus, alpha, beta,
        int(round(np.trace(proj_plus))), int(round(np.trace(proj_minus))),
    )


def split_ricci(st, two_eigenvalue_tol=TWO_EIGENVALUE_TOL):
    """Split a Kähler structure's Ricci tensor into its two eigenspaces.

    Raises
    ------
    EinsteinInput
        A single eigenvalue cluster.
    TooManyEigenvalues
        Three or more clusters.
    """
    eig = ricci_eigenvalues(st.curv, st.metric, two_eigenvalue_tol)
    if len(eig) == 1:
        raise EinsteinInput(f"Ricci tensor is Einstein (eigenvalue {eig[0][0]:.12g}); split undefined")
    if len(eig) > 2:
        vals = ", ".join(f"{v:.6g}" for v, _ in eig)
        raise TooManyEigenvalues(f"Ricci tensor has {len(eig)} eigenvalues: {vals}")
    (lam, basis_l), (mu, basis_m) = eig
    pl = ac.g_projector(basis_l, st.metric)
    pm = ac.g_projector(basis_m, st.metric)
    return split_from_projectors(st.omega, pl, pm, lam, mu)


def split_residuals(st, split):
    """Residuals of the RicciSplit invariants."""
    m = st.dim
    pl, pm = split.proj_lambda, split.proj_mu
    gram = st.metric.gram
    rho = st.ricci_forms.rho
    return {
        "projectors_sum": float(np.max(np.abs(pl + pm - np.eye(m)))),
        "idempotent": float(max(np.max(np.abs(pl @ pl - pl)), np.max(np.abs(pm @ pm - pm)))),
        "self_adjoint": float(max(np.max(np.abs(gram @ pl - (gram @ pl).T)), np.max(np.abs(gram @ pm - (gram @ pm).T)))),
        "j_invariant": float(np.max(np.abs(st.jmat @ pl - pl @ st.jmat))),
        "alpha_plus_beta": float(np.max(np.abs(split.alpha + split.beta - st.omega))),
        "rho_decomposition": float(np.max(np.abs(split.lam * split.alpha + split.mu * split.beta - rho))),
        "d_alpha": float(np.max(np.abs(ac.d_form(st.alg, split.alpha)))),
        "d_beta": float(np.max(np.abs(ac.d_form(st.alg, split.beta)))),
    }


def build_jbar(split, jmat):
    """``Jbar = J`` on the first eigenspace and ``-J`` on the second."""
    return jmat @ split.proj_lambda - jmat @ split.proj_mu


def commuting_projectors(jmat, jbar):
    """Eigen-projectors of ``Q = -J Jbar`` for the eigenvalues +1 and -1."""
    q = -jmat @ jbar
    m = q.shape[0]
    return 0.5 * (np.eye(m) + q), 0.5 * (np.eye(m) - q)


def deform_metric(g, split, t):
    """``g^t = g|E+ + t g|E-`` where E+ and E- are the split's first and second eigenspaces."""
    if not t > 0:
        raise InvalidInput(f"deformation parameter must be positive, got {t}")
    pp, pm = split.proj_lambda, split.proj_mu
    gram = pp.T @ g.gram @ pp + t * (pm.T @ g.gram @ pm)
    return DeformedMetric(float(t), ac.Metric(ac.symmetrize(gram)))


def einstein_normalize(g, split):
    """Einstein metric ``g^{mu/lambda}`` of the correspondence; needs ``lambda * mu > 0``."""
    if not split.lam * split.mu > 0:
        raise NotSameSign(f"eigenvalues {split.lam:.6g}, {split.mu:.6g} do not have the same sign")
    return deform_metric(g, split, split.mu / split.lam)


def einstein_residual(curv, g):
    m = g.dim
    return float(np.max(np.abs(curv.ricci - curv.scal / m * g.gram)))


def volume_ratio(g, gt):
    return float(np.linalg.det(gt.gram) / np.linalg.det(g.gram))


def wedge_2forms(a, b):
    """``(a ^ b)`` of two 2-forms as a 4-form (determinant convention)."""
    m = a.shape[0]
    out = np.zeros((m,) * 4)
    for perm in itertools.permutations(range(4)):
        sign = _perm_sign(perm)
        term = np.einsum("ab,cd->abcd", a, b).transpose(np.argsort(perm))
        out += sign * term
    return out / 4.0


def _perm_sign(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign
