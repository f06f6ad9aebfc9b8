"""Tensor calculus for left-invariant geometry on a finite-dimensional Lie algebra.

Conventions used throughout the package:

* A basis ``e_0 .. e_{m-1}`` is fixed. Brackets are ``[e_i, e_j] = sum_k c[i, j, k] e_k``.
* Linear endomorphisms act on coordinate columns: ``A e_a = sum_c A[c, a] e_c``.
* Covariant tensors are stored by their values on basis vectors,
  ``T[a, b, ...] = T(e_a, e_b, ...)``.
* ``gamma[i, j, k]`` is the coefficient of ``e_k`` in ``nabla_{e_i} e_j``.
* ``R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`` and
  ``riem[i, j, k, l] = g(R(e_i, e_j) e_k, e_l)``; with this choice the
  ax+b group has scalar curvature -2.
* Traces are sums over a g-orthonormal frame obtained by Gram-Schmidt on
  the input basis. The frame sum of ``T(f_a, f_a)`` equals ``g^{ij} T_ij``,
  which is how the contractions below are written.

Left-invariant tensors have constant components, so ``nabla_{e_i}`` acts on
them purely algebraically through ``gamma``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .eigen import cluster_eigenvalues, jacobi_eigh
from .errors import InvalidInput

MAX_DIM = 32
TOL_JACOBI = 1e-9
TOL_ID = 1e-9
TOL_PD = 1e-12
CLUSTER_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Real Lie algebra given by dense structure constants."""

    brackets: np.ndarray
    basis_labels: tuple = None

    def __post_init__(self):
        c = np.array(self.brackets, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise InvalidInput(f"structure constants must have shape (m, m, m), got {c.shape}")
        if c.shape[0] < 1 or c.shape[0] > MAX_DIM:
            raise InvalidInput(f"dimension must be in 1..{MAX_DIM}, got {c.shape[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "brackets", c)
        labels = self.basis_labels
        if labels is None:
            labels = tuple(f"e{i + 1}" for i in range(c.shape[0]))
        labels = tuple(str(s) for s in labels)
        if len(labels) != c.shape[0]:
            raise InvalidInput("basis_labels length does not match dimension")
        object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self):
        return self.brackets.shape[0]

    def bracket(self, x, y):
        """Bracket of two coordinate vectors."""
        return np.einsum("i,j,ijk->k", x, y, self.brackets)

    def ad(self, x):
        """Matrix of ``ad(x)`` acting on coordinate columns."""
        return np.einsum("i,ijk->kj", x, self.brackets)

    def rebase(self, p):
        """Structure constants in the basis ``e'_i = sum_a p[a, i] e_a``."""
        p = np.asarray(p, dtype=float)
        pinv = np.linalg.inv(p)
        c = np.einsum("ai,bj,abm,km->ijk", p, p, self.brackets, pinv)
        return LieAlgebra(c, self.basis_labels)


def abelian(dim):
    return LieAlgebra(np.zeros((dim, dim, dim)))


def direct_sum(*algs):
    """Direct sum of Lie algebras, bases concatenated in order."""
    m = sum(a.dim for a in algs)
    c = np.zeros((m, m, m))
    labels = []
    off = 0
    for a in algs:
        s = slice(off, off + a.dim)
        c[s, s, s] = a.brackets
        labels.extend(a.basis_labels)
        off += a.dim
    if len(set(labels)) != len(labels):
        labels = None
    return LieAlgebra(c, labels)


def block_diag(*mats):
    m = sum(x.shape[0] for x in mats)
    out = np.zeros((m, m))
    off = 0
    for x in mats:
        k = x.shape[0]
        out[off:off + k, off:off + k] = x
        off += k
    return out


@dataclass
class ValidationReport:
    """Named residual checks with a pass/fail verdict for each."""

    name: str
    checks: dict = field(default_factory=dict)

    def add(self, label, residual, tol):
        residual = float(residual)
        self.checks[label] = {"residual": residual, "tol": float(tol), "pass": bool(residual <= tol)}

    @property
    def passed(self):
        return all(c["pass"] for c in self.checks.values())

    def failures(self):
        return [k for k, c in self.checks.items() if not c["pass"]]

    def to_dict(self):
        return {"name": self.name, "pass": self.passed, "checks": self.checks}


def jacobi_residual(alg):
    c = alg.brackets
    # sum_l c[i,j,l] c[l,k,m], cyclic in (i, j, k)
    t = np.einsum("ijl,lkm->ijkm", c, c)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(cyc))) if c.size else 0.0


def antisymmetry_residual(alg):
    c = alg.brackets
    return float(np.max(np.abs(c + c.transpose(1, 0, 2))))


def validate_algebra(alg, tol_jacobi=TOL_JACOBI):
    """Report antisymmetry and Jacobi residuals of the structure constants.

    Both tolerances are relative: antisymmetry against ``max(1, max|c|)``,
    the Jacobi residual (quadratic in ``c``) against its square.
    """
    scale = max(1.0, float(np.max(np.abs(alg.brackets))))
    rep = ValidationReport("algebra")
    rep.add("antisymmetry", antisymmetry_residual(alg), tol_jacobi * scale)
    rep.add("jacobi", jacobi_residual(alg), tol_jacobi * scale**2)
    return rep


def gram_schmidt_frame(gram):
    """g-orthonormal frame from the input basis by Gram-Schmidt.

    Returns ``f`` with columns the frame vectors, so ``f.T @ gram @ f = I``.
    """
    gram = np.asarray(gram, dtype=float)
    m = gram.shape[0]
    f = np.zeros((m, m))
    for k in range(m):
        v = np.zeros(m)
        v[k] = 1.0
        for _ in range(2):
            for q in range(k):
                v = v - (f[:, q] @ gram @ v) * f[:, q]
        nrm2 = v @ gram @ v
        if nrm2 <= 0.0:
            raise InvalidInput("Gram matrix is not positive definite")
        f[:, k] = v / np.sqrt(nrm2)
    return f


@dataclass(frozen=True, eq=False)
class Metric:
    """Positive-definite left-invariant metric given by its Gram matrix."""

    gram: np.ndarray

    def __post_init__(self):
        g = np.array(self.gram, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidInput("Gram matrix must be square")
        if not np.array_equal(g, g.T):
            raise InvalidInput("Gram matrix must be exactly symmetric")
        w = np.linalg.eigvalsh(g)
        if w[0] <= TOL_PD * max(1.0, abs(w[-1])):
            raise InvalidInput(f"Gram matrix not positive definite (min eigenvalue {w[0]:.3e})")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @property
    def dim(self):
        return self.gram.shape[0]

    @cached_property
    def frame(self):
        return gram_schmidt_frame(self.gram)

    @cached_property
    def inverse(self):
        f = self.frame
        return f @ f.T

    def rebase(self, p):
        p = np.asarray(p, dtype=float)
        g = p.T @ self.gram @ p
        return Metric(0.5 * (g + g.T))

    def scaled(self, c):
        return Metric(c * self.gram)


def symmetrize(a):
    return 0.5 * (a + a.T)


def levi_civita(alg, g):
    """Levi-Civita coefficients from the Koszul formula for left-invariant fields.

    ``2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)``.
    """
    if alg.dim != g.dim:
        raise InvalidInput("algebra and metric dimensions differ")
    low = np.einsum("ijl,lk->ijk", alg.brackets, g.gram)
    gamma_low = 0.5 * (low - low.transpose(2, 0, 1) + low.transpose(1, 2, 0))
    return np.einsum("ijl,lk->ijk", gamma_low, g.inverse)


def connection_matrices(gamma):
    """``A[i]`` is the matrix of ``nabla_{e_i}`` on coordinate columns."""
    return gamma.transpose(0, 2, 1)


def torsion_residual(alg, gamma):
    t = gamma - gamma.transpose(1, 0, 2) - alg.brackets
    return float(np.max(np.abs(t)))


def metric_compat_residual(g, gamma):
    low = np.einsum("ijl,lk->ijk", gamma, g.gram)
    return float(np.max(np.abs(low + low.transpose(0, 2, 1))))


@dataclass(frozen=True, eq=False)
class Curvature:
    """Curvature tensor with Ricci and scalar curvature."""

    riem: np.ndarray
    ricci: np.ndarray
    scal: float

    @property
    def operator_tensor(self):
        """Curvature as a form on 2-vectors, positive on round spheres.

        ``op[a, b, c, d] = -riem[a, b, c, d]``; acting on 2-forms by
        ``R(psi)_ab = 1/2 op[a, b, c, d] psi^cd`` it satisfies
        ``R(Omega) = rho`` on Kähler structures.
        """
        return -self.riem


def curvature(alg, g, gamma):
    """Riemann, Ricci and scalar curvature of a left-invariant metric."""
    a = connection_matrices(gamma)
    aa = np.einsum("ipq,jqr->ijpr", a, a)
    rmat = aa - aa.transpose(1, 0, 2, 3) - np.einsum("ijm,mpr->ijpr", alg.brackets, a)
    # rmat[i, j, p, k]: component p of R(e_i, e_j) e_k
    riem = np.einsum("ijpk,pl->ijkl", rmat, g.gram)
    ginv = g.inverse
    ricci = np.einsum("ab,aijb->ij", ginv, riem)
    ricci = symmetrize(ricci)
    scal = float(np.einsum("ij,ij->", ginv, ricci))
    return Curvature(riem, ricci, scal)


def curvature_symmetry_residuals(curv):
    r = curv.riem
    return {
        "skew_12": float(np.max(np.abs(r + r.transpose(1, 0, 2, 3)))),
        "skew_34": float(np.max(np.abs(r + r.transpose(0, 1, 3, 2)))),
        "pair_symmetry": float(np.max(np.abs(r - r.transpose(2, 3, 0, 1)))),
        "first_bianchi": float(np.max(np.abs(r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)))),
    }


def nabla_tensor(gamma, t):
    """Covariant derivative of a left-invariant covariant tensor.

    Returns ``out`` with ``out[i] = nabla_{e_i} T``, i.e.
    ``(nabla_{e_i} T)(X_1..X_k) = -sum_m T(.., nabla_{e_i} X_m, ..)``.
    """
    t = np.asarray(t, dtype=float)
    k = t.ndim
    if k > 4:
        raise ValueError("tensors of rank > 4 are not supported")
    m = gamma.shape[0]
    out = np.zeros((m,) + t.shape)
    for slot in range(k):
        # sum_b gamma[i, a_slot, b] T[.., b, ..]
        moved = np.tensordot(gamma, t, axes=([2], [slot]))
        # moved axes: (i, a_slot, rest...) -> put a_slot back in place
        moved = np.moveaxis(moved, 1, slot + 1)
        out -= moved
    return out


def _derivative_along(gamma, t, x):
    """``nabla_X T`` for a constant coordinate vector ``x``."""
    return np.tensordot(x, nabla_tensor(gamma, t), axes=1)


def rough_laplacian(gamma, g, t):
    """``nabla^* nabla T = -sum_i (nabla_{f_i} nabla_{f_i} T - nabla_{nabla_{f_i} f_i} T)``."""
    t = np.asarray(t, dtype=float)
    ginv = g.inverse
    d1 = nabla_tensor(gamma, t)
    d2 = np.stack([nabla_tensor(gamma, d1[j]) for j in range(g.dim)], axis=1)
    # d2[i, j] = nabla_i nabla_j T
    second = np.einsum("ij,ij...->...", ginv, d2)
    hess_corr = np.einsum("ij,ijk,k...->...", ginv, gamma, d1)
    return -(second - hess_corr)


def codifferential(gamma, g, t):
    """``(delta T)(X..) = -sum_i (nabla_{f_i} T)(f_i, X..)`` for any rank >= 1."""
    d1 = nabla_tensor(gamma, t)
    return -np.einsum("ij,ij...->...", g.inverse, d1)


def d_form(alg, psi):
    """Exterior derivative of a left-invariant k-form (k <= 3).

    ``d psi(X_0..X_k) = sum_{p<q} (-1)^{p+q} psi([X_p, X_q], X_0..^..^..)``.
    """
    psi = np.asarray(psi, dtype=float)
    k = psi.ndim
    c = alg.brackets
    m = alg.dim
    if k == 0:
        return np.zeros(m)
    out = np.zeros((m,) * (k + 1))
    for p in range(k + 1):
        for q in range(p + 1, k + 1):
            # term[x_p, x_q, rest...] = sum_l c[x_p, x_q, l] psi[l, rest...]
            term = np.tensordot(c, psi, axes=([2], [0]))
            rest = [r for r in range(k + 1) if r not in (p, q)]
            order = [p, q] + rest
            inv = np.argsort(order)
            out += (-1) ** (p + q) * term.transpose(inv)
    return out


def wedge_1form(a, psi):
    """``(a ^ psi)`` for a 1-form ``a`` and a k-form ``psi`` (determinant convention)."""
    psi = np.asarray(psi, dtype=float)
    k = psi.ndim
    out = np.zeros((a.shape[0],) * (k + 1))
    for p in range(k + 1):
        rest = [r for r in range(k + 1) if r != p]
        term = np.multiply.outer(a, psi)
        order = [p] + rest
        out += (-1) ** p * term.transpose(np.argsort(order))
    return out


def d_form_via_connection(gamma, g, psi):
    """Independent route: ``d psi = sum_i f^i ^ nabla_{f_i} psi`` (torsion-free)."""
    d1 = nabla_tensor(gamma, psi)
    ginv = g.inverse
    out = 0.0
    m = g.dim
    gram = g.gram
    for i in range(m):
        for j in range(m):
            if ginv[i, j] == 0.0:
                continue
            out = out + ginv[i, j] * wedge_1form(gram[i], d1[j])
    return out


def hodge_laplacian(alg, gamma, g, psi):
    """``(d delta + delta d) psi`` on left-invariant forms."""
    psi = np.asarray(psi, dtype=float)
    out = codifferential(gamma, g, d_form(alg, psi))
    if psi.ndim > 0:
        out = out + d_form(alg, codifferential(gamma, g, psi))
    return out


def second_bianchi_residual(gamma, curv):
    dr = nabla_tensor(gamma, curv.riem)
    cyc = dr + dr.transpose(1, 2, 0, 3, 4) + dr.transpose(2, 0, 1, 3, 4)
    return float(np.max(np.abs(cyc)))


def kulkarni_nomizu(h, k):
    """``(h o k)_abcd = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad``."""
    return (
        np.einsum("ac,bd->abcd", h, k)
        + np.einsum("bd,ac->abcd", h, k)
        - np.einsum("ad,bc->abcd", h, k)
        - np.einsum("bc,ad->abcd", h, k)
    )


def weyl_tensor(curv, g):
    """Weyl part of the curvature operator tensor (dimension >= 3).

    ``op = W + Ric_0 o g / (m - 2) + s g o g / (2 m (m - 1))`` with ``o`` the
    Kulkarni-Nomizu product.
    """
    m = g.dim
    if m < 3:
        raise ValueError("Weyl tensor needs dimension >= 3")
    gram = g.gram
    ric0 = curv.ricci - curv.scal / m * gram
    return (
        curv.operator_tensor
        - kulkarni_nomizu(ric0, gram) / (m - 2)
        - curv.scal / (2.0 * m * (m - 1)) * kulkarni_nomizu(gram, gram)
    )


def symmetric_eigensplit(s, g, cluster_tol=CLUSTER_TOL):
    """Eigenvalues and g-orthonormal eigenbases of the endomorphism ``g^{-1} S``.

    Returns a list of ``(eigenvalue, basis)`` in ascending order, where
    ``basis`` has the eigenvectors of one merged cluster as columns.
    """
    f = g.frame
    sf = symmetrize(f.T @ np.asarray(s, dtype=float) @ f)
    w, v = jacobi_eigh(sf)
    out = []
    for group in cluster_eigenvalues(w, cluster_tol):
        val = float(np.mean(w[group]))
        out.append((val, f @ v[:, group]))
    return out


def g_projector(basis, g):
    """g-orthogonal projector onto the span of g-orthonormal columns ``basis``."""
    return basis @ basis.T @ g.gram


def norm_full(t, g):
    """Tensor norm with all indices contracted by ``g^{-1}``."""
    t = np.asarray(t, dtype=float)
    ginv = g.inverse
    x = t
    for ax in range(t.ndim):
        x = np.moveaxis(np.tensordot(ginv, x, axes=([1], [ax])), 0, ax)
    return float(np.sqrt(max(np.sum(x * t), 0.0)))


def inner_full(s, t, g):
    ginv = g.inverse
    x = np.asarray(s, dtype=float)
    for ax in range(x.ndim):
        x = np.moveaxis(np.tensordot(ginv, x, axes=([1], [ax])), 0, ax)
    return float(np.sum(x * np.asarray(t, dtype=float)))
