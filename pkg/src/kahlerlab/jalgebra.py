"""Normal j-algebras: axioms, root decomposition, the closed (1,1)-form construction and model algebras."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import algebra as ac
from . import hermitian as hm
from .eigen import cluster_eigenvalues, jacobi_eigh
from .errors import HypothesisFailed, InvalidInput, StructuralError

ROOT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class JAlgebra:
    """Lie algebra with endomorphism ``j`` and 1-form ``omega``.

    The inner product is ``<X, Y> = omega([jX, Y])``.
    """

    alg: ac.LieAlgebra
    jmat: np.ndarray
    omega: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        j = np.array(self.jmat, dtype=float)
        w = np.array(self.omega, dtype=float)
        if j.shape != (self.alg.dim, self.alg.dim) or w.shape != (self.alg.dim,):
            raise InvalidInput("j or omega has the wrong shape")
        j.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "jmat", j)
        object.__setattr__(self, "omega", w)

    @property
    def dim(self):
        return self.alg.dim

    @cached_property
    def raw_form(self):
        """``B[a, b] = omega([j e_a, e_b])`` as computed, before symmetrization."""
        return np.einsum("pa,pbk,k->ab", self.jmat, self.alg.brackets, self.omega)

    @cached_property
    def metric(self):
        return ac.Metric(ac.symmetrize(self.raw_form))

    def structure(self, label="kahler"):
        return hm.Structure(self.alg, self.metric, self.jmat, label)

    def rebase(self, p):
        p = np.asarray(p, dtype=float)
        return JAlgebra(self.alg.rebase(p), np.linalg.inv(p) @ self.jmat @ p, p.T @ self.omega, dict(self.meta))


def derived_series_length(alg, tol=ac.TOL_ID):
    """Number of steps for the derived series to reach 0, or ``None`` if it stalls."""
    m = alg.dim
    basis = np.eye(m)
    scale = max(1.0, float(np.max(np.abs(alg.brackets))))
    for step in range(m + 1):
        if basis.shape[1] == 0:
            return step
        vecs = np.einsum("ia,jb,ijk->abk", basis, basis, alg.brackets).reshape(-1, m)
        if vecs.size == 0:
            return step + 1
        u, sv, _ = np.linalg.svd(vecs.T, full_matrices=False)
        rank = int(np.sum(sv > tol * scale))
        if rank == basis.shape[1]:
            return None
        basis = u[:, :rank]
    return None


def koszul_form(alg, jmat):
    """Koszul 1-form ``psi(X) = tr ad(jX) - tr(j ad X)``."""
    c = alg.brackets
    tr_ad = np.einsum("ijj->i", c)  # tr ad(e_i) = sum_j c[i, j, j]
    ad = np.einsum("ijk->ikj", c)  # ad[i][k, j]
    return jmat.T @ tr_ad - np.einsum("pk,ikp->i", jmat, ad)


def validate_jalgebra(data, tol=ac.TOL_ID):
    """Check the normal j-algebra axioms and that ``Omega = d omega`` is Kähler."""
    alg = data.alg
    m = alg.dim
    rep = ac.validate_algebra(alg)
    scale = max(1.0, float(np.max(np.abs(alg.brackets))))
    jscale = max(1.0, float(np.max(np.abs(data.jmat))))
    steps = derived_series_length(alg)
    rep.add("solvable", 0.0 if steps is not None and steps <= m else 1.0, 0.5)
    rep.add("j_squared", np.max(np.abs(data.jmat @ data.jmat + np.eye(m))), tol * jscale**2)
    nj = hm.nijenhuis(alg, data.jmat)
    rep.add("j_integrable", np.max(np.abs(nj)), tol * scale * jscale**2)
    b = data.raw_form
    bscale = max(1.0, float(np.max(np.abs(b))))
    rep.add("form_symmetric", np.max(np.abs(b - b.T)), tol * bscale)
    wmin = float(np.linalg.eigvalsh(ac.symmetrize(b))[0])
    rep.add("form_positive", 0.0 if wmin > ac.TOL_PD * bscale else 1.0 - min(wmin, 0.0), 0.5)
    if rep.passed:
        st = data.structure()
        d_omega = ac.d_form(alg, data.omega)
        rep.add("omega_is_d_of_1form", np.max(np.abs(st.omega - d_omega)), tol * bscale)
        rep.add("kahler_nabla_j", np.max(np.abs(st.nabla_omega)), tol * bscale * scale)
    return rep


def bergman_normalize(data):
    """Replace ``omega`` by half the Koszul form, which makes ``<,>`` Kähler-Einstein with ``Ric = -g``.

    Records in ``meta`` how far the original ``omega`` was from a multiple of
    the new one on ``[s, s]``.
    """
    psi = koszul_form(data.alg, data.jmat)
    new = 0.5 * psi
    nil = nilradical_basis_euclid(data.alg)
    a = nil.T @ data.omega
    b = nil.T @ new
    scale = float(a @ b / (a @ a)) if a @ a > 0 else float("nan")
    resid = float(np.linalg.norm(b - scale * a)) if a @ a > 0 else float("nan")
    meta = dict(data.meta)
    meta.update({"omega_scale": scale, "omega_proportionality_residual": resid, "normalization": "bergman"})
    return JAlgebra(data.alg, data.jmat, new, meta)


def nilradical_basis_euclid(alg, tol=ac.TOL_ID):
    """Coordinate-orthonormal basis of ``[s, s]``."""
    m = alg.dim
    vecs = alg.brackets.reshape(-1, m)
    u, sv, _ = np.linalg.svd(vecs.T, full_matrices=False)
    scale = max(1.0, float(np.max(np.abs(alg.brackets))))
    return u[:, : int(np.sum(sv > tol * scale))]


@dataclass(frozen=True, eq=False)
class RootDecomposition:
    """Joint ad(a)-eigenspace decomposition of ``n = [s, s]``.

    ``roots[i]`` holds the values of a root on ``a_basis``; ``coeffs[i]`` its
    coordinates in terms of the distinguished roots. ``distinguished[k]`` is
    the unit generator X_{k+1} of the k-th distinguished root space.
    """

    a_basis: np.ndarray
    roots: list
    root_spaces: list
    coeffs: list
    rank: int
    distinguished: np.ndarray
    distinguished_index: list
    half_root_dims: list


def _g_orthonormal(vecs, g, tol=1e-10):
    """g-orthonormal basis of the span of the columns."""
    if vecs.shape[1] == 0:
        return vecs
    f = g.frame
    finv = np.linalg.inv(f)
    u, sv, _ = np.linalg.svd(finv @ vecs, full_matrices=False)
    keep = sv > tol * max(1.0, sv[0])
    return f @ u[:, keep]


def root_decompose(data, tol=ROOT_TOL):
    """Root-space decomposition of a normal j-algebra with distinguished roots labelled.

    Raises
    ------
    StructuralError
        When ad(a) does not act by commuting self-adjoint operators on ``n``.
    """
    alg = data.alg
    g = data.metric
    scale = max(1.0, float(np.max(np.abs(alg.brackets))))
    nil = _g_orthonormal(nilradical_basis_euclid(alg), g)
    # orthogonal complement of n
    f = g.frame
    finv = np.linalg.inv(f)
    nil_f = finv @ nil
    full = np.linalg.svd(nil_f, full_matrices=True)[0]
    a_basis = f @ full[:, nil.shape[1]:]
    r = a_basis.shape[1]

    for p in range(r):
        for q in range(r):
            if np.max(np.abs(alg.bracket(a_basis[:, p], a_basis[:, q]))) > tol * scale:
                raise StructuralError("orthogonal complement of [s, s] is not commutative")

    # restrictions of ad(A) to n in the g-orthonormal basis nil
    gram = g.gram
    ads = [nil.T @ gram @ alg.ad(a_basis[:, p]) @ nil for p in range(r)]
    for p, x in enumerate(ads):
        img = alg.ad(a_basis[:, p]) @ nil
        if np.max(np.abs(img - nil @ (nil.T @ gram @ img))) > tol * scale:
            raise StructuralError("ad(a) does not preserve [s, s]")
        if np.max(np.abs(x - x.T)) > tol * scale:
            raise StructuralError("ad(a) is not self-adjoint on [s, s]; not simultaneously diagonalizable")

    spaces = [np.eye(nil.shape[1])]
    for x in ads:
        refined = []
        for sp in spaces:
            w, v = jacobi_eigh(sp.T @ x @ sp)
            for grp in cluster_eigenvalues(w, tol):
                refined.append(sp @ v[:, grp])
        spaces = refined

    roots, root_spaces = [], []
    for sp in spaces:
        vecs = nil @ sp
        vals = np.array([float(np.mean(np.diag(sp.T @ x @ sp))) for x in ads])
        for p in range(r):
            resid = alg.ad(a_basis[:, p]) @ vecs - vals[p] * vecs
            if np.max(np.abs(resid)) > tol * scale:
                raise StructuralError("root space is not a joint eigenspace")
        if np.max(np.abs(vals)) <= tol * scale:
            raise StructuralError("zero root in [s, s]")
        roots.append(vals)
        root_spaces.append(vecs)

    # distinguished roots: one-dimensional spaces mapped into a by j
    dist = []
    for i, vecs in enumerate(root_spaces):
        if vecs.shape[1] != 1:
            continue
        jx = data.jmat @ vecs[:, 0]
        comp_n = nil @ (nil.T @ gram @ jx)
        if np.max(np.abs(comp_n)) <= tol * max(1.0, float(np.max(np.abs(jx)))):
            dist.append(i)
    if len(dist) != r:
        raise StructuralError(f"found {len(dist)} distinguished roots for rank {r}")

    eps = np.array([roots[i] for i in dist])  # r x r
    coeffs = [np.linalg.solve(eps.T, rt) for rt in roots]

    order = _label_order(dist, coeffs, root_spaces)
    dist = [dist[k] for k in order]
    eps = np.array([roots[i] for i in dist])
    coeffs = [np.linalg.solve(eps.T, rt) for rt in roots]

    for i, cf in enumerate(coeffs):
        if i in dist:
            continue
        if not _is_admissible(cf, tol):
            raise StructuralError(f"root with coefficients {np.round(cf, 6)} is not of the form e_k/2 or (e_l +- e_s)/2")

    half = []
    for k in range(r):
        target = np.zeros(r)
        target[k] = 0.5
        half.append(sum(root_spaces[i].shape[1] for i, cf in enumerate(coeffs) if np.allclose(cf, target, atol=tol)))

    xs = np.column_stack([root_spaces[i][:, 0] for i in dist])
    # distinguished basis of a: unit vectors j X_k
    a_dist = data.jmat @ xs
    return RootDecomposition(
        a_basis=a_dist,
        roots=[_root_on(alg, a_dist, vecs) for vecs in root_spaces],
        root_spaces=root_spaces,
        coeffs=coeffs,
        rank=r,
        distinguished=xs,
        distinguished_index=dist,
        half_root_dims=half,
    )


def _root_on(alg, a_basis, vecs):
    v = vecs[:, 0]
    out = []
    for p in range(a_basis.shape[1]):
        img = alg.ad(a_basis[:, p]) @ v
        k = int(np.argmax(np.abs(v)))
        out.append(img[k] / v[k])
    return np.array(out)


def _is_admissible(cf, tol):
    nz = [x for x in cf if abs(x) > tol]
    if len(nz) == 1:
        return abs(abs(nz[0]) - 0.5) <= tol and nz[0] > 0
    if len(nz) == 2:
        return all(abs(abs(x) - 0.5) <= tol for x in nz) and max(nz) > 0
    return False


def _label_order(dist, coeffs, root_spaces):
    """Order distinguished roots so every difference root reads (e_l - e_s)/2 with l < s."""
    r = len(dist)
    pos = {i: k for k, i in enumerate(dist)}
    before = {k: set() for k in range(r)}
    for i, cf in enumerate(coeffs):
        if i in pos:
            continue
        plus = [k for k in range(r) if cf[k] > 0.25]
        minus = [k for k in range(r) if cf[k] < -0.25]
        if len(plus) == 1 and len(minus) == 1:
            before[minus[0]].add(plus[0])

    def anchor(k):
        v = root_spaces[dist[k]][:, 0]
        return int(np.argmax(np.abs(v)))

    order, placed = [], set()
    while len(order) < r:
        ready = [k for k in range(r) if k not in placed and before[k] <= placed]
        if not ready:
            raise StructuralError("distinguished roots admit no consistent labelling")
        k = min(ready, key=anchor)
        order.append(k)
        placed.add(k)
    return order


def check_root_decomposition(data, dec, tol=ROOT_TOL):
    """Residuals of the RootDecomposition invariants."""
    alg, g = data.alg, data.metric
    gram = g.gram
    out = {}
    a = dec.a_basis
    out["a_commutative"] = max(
        (float(np.max(np.abs(alg.bracket(a[:, p], a[:, q])))) for p in range(dec.rank) for q in range(dec.rank)),
        default=0.0,
    )
    eig = 0.0
    for rt, vecs in zip(dec.roots, dec.root_spaces):
        for p in range(dec.rank):
            eig = max(eig, float(np.max(np.abs(alg.ad(a[:, p]) @ vecs - rt[p] * vecs))))
    out["joint_eigen"] = eig
    orth = 0.0
    for i, vi in enumerate(dec.root_spaces):
        for k, vk in enumerate(dec.root_spaces):
            if i < k:
                orth = max(orth, float(np.max(np.abs(vi.T @ gram @ vk))))
    out["root_orthogonality"] = orth
    # [n_e', n_e''] inside n_{e' + e''}
    closure = 0.0
    for i, vi in enumerate(dec.root_spaces):
        for k, vk in enumerate(dec.root_spaces):
            target = dec.coeffs[i] + dec.coeffs[k]
            match = [q for q, cf in enumerate(dec.coeffs) if np.allclose(cf, target, atol=tol)]
            tgt = np.column_stack([dec.root_spaces[q] for q in match]) if match else np.zeros((alg.dim, 0))
            for x in vi.T:
                for y in vk.T:
                    z = alg.bracket(x, y)
                    if tgt.shape[1]:
                        z = z - tgt @ (tgt.T @ gram @ z)
                    closure = max(closure, float(np.max(np.abs(z))))
    out["bracket_closure"] = closure
    out["distinguished_dims"] = float(sum(abs(dec.root_spaces[i].shape[1] - 1) for i in dec.distinguished_index))
    return out


def root_space_dims(dec):
    """Map from rounded root coefficient tuples to root-space dimensions."""
    return {tuple(float(x) for x in np.round(cf * 2) / 2): vecs.shape[1] for cf, vecs in zip(dec.coeffs, dec.root_spaces)}


@dataclass(frozen=True, eq=False)
class Lemma3Result:
    index: int
    alpha: np.ndarray
    jbar: np.ndarray
    omega_bar: np.ndarray
    qualifying: list


def _lemma3_pieces(data, dec, k):
    g = data.metric
    x = dec.distinguished[:, k]
    jx = data.jmat @ x
    u = g.gram @ x
    v = g.gram @ jx
    alpha = np.outer(u, v) - np.outer(v, u)
    proj = np.outer(x, u) + np.outer(jx, v)
    jbar = data.jmat - 2.0 * data.jmat @ proj
    return alpha, jbar


def lemma3_construct(data, dec=None, index=None, tol=ac.TOL_ID):
    """Closed J-invariant 2-form dual to ``X_k ^ jX_k`` and the almost-Kähler ``Jbar``.

    ``index`` is 1-based; by default the largest qualifying index is used.
    An index qualifies when the half-root space ``n_{e_k / 2}`` vanishes and
    the resulting 2-form is closed.

    Raises
    ------
    HypothesisFailed
        No index qualifies, or the requested one does not.
    """
    if dec is None:
        dec = root_decompose(data)
    scale = max(1.0, float(np.max(np.abs(data.alg.brackets))))
    qualifying = []
    for k in range(dec.rank):
        if dec.half_root_dims[k] != 0:
            continue
        alpha, _ = _lemma3_pieces(data, dec, k)
        if np.max(np.abs(ac.d_form(data.alg, alpha))) <= tol * scale * max(1.0, float(np.max(np.abs(alpha)))):
            qualifying.append(k + 1)
    if index is None:
        if not qualifying:
            k = dec.rank
            raise HypothesisFailed(
                f"half-root space n_(e_{k}/2) has dimension {dec.half_root_dims[k - 1]}; no index qualifies",
                dec.half_root_dims[k - 1],
            )
        index = max(qualifying)
    if index < 1 or index > dec.rank:
        raise InvalidInput(f"index must be in 1..{dec.rank}")
    if dec.half_root_dims[index - 1] != 0:
        raise HypothesisFailed(
            f"half-root space n_(e_{index}/2) has dimension {dec.half_root_dims[index - 1]}",
            dec.half_root_dims[index - 1],
        )
    if index not in qualifying:
        raise HypothesisFailed(f"the 2-form dual to X_{index} ^ jX_{index} is not closed", 0)
    alpha, jbar = _lemma3_pieces(data, dec, index - 1)
    st = data.structure()
    return Lemma3Result(index, alpha, jbar, st.omega - 2.0 * alpha, qualifying)


def koszul_ricci_check(st):
    """Compare the curvature Ricci form with ``d`` of the Koszul 1-form.

    Returns a dict with the fitted constant ``c`` (``rho ~ c d psi``), the
    residual and the norms of both sides.
    """
    psi = koszul_form(st.alg, st.jmat)
    kform = ac.d_form(st.alg, psi)
    rho = st.ricci_forms.rho
    kk = hm.form_inner(kform, kform, st.metric)
    c = hm.form_inner(rho, kform, st.metric) / kk if kk > 0 else 0.0
    resid = rho - c * kform
    return {
        "constant": float(c),
        "residual": float(np.sqrt(max(hm.form_norm2(resid, st.metric), 0.0))),
        "rho_norm": float(np.sqrt(hm.form_norm2(rho, st.metric))),
        "koszul_norm": float(np.sqrt(kk)),
    }


# ---------------------------------------------------------------------------
# model algebras


def _algebra_from_matrices(mats, labels):
    """Structure constants of the span of matrices closed under commutators."""
    m = len(mats)
    flat = np.array([x.ravel() for x in mats]).T
    c = np.zeros((m, m, m))
    for i in range(m):
        for j in range(m):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            coef, res, *_ = np.linalg.lstsq(flat, comm.ravel(), rcond=None)
            if np.max(np.abs(flat @ coef - comm.ravel())) > 1e-12:
                raise StructuralError("matrix span is not closed under brackets")
            c[i, j] = coef
    c = 0.5 * (c - c.transpose(1, 0, 2))
    c[np.abs(c) < 1e-15] = 0.0
    return ac.LieAlgebra(c, labels)


def construct_ax_b(c=1.0):
    """ax+b algebra ``[e1, e2] = c e2`` with ``j e1 = e2`` and the hyperbolic inner product."""
    b = np.zeros((2, 2, 2))
    b[0, 1, 1] = c
    b[1, 0, 1] = -c
    alg = ac.LieAlgebra(b, ("A", "X"))
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    return JAlgebra(alg, j, np.array([0.0, -1.0 / c]), {"model": "ax+b", "c": c})


def construct_chn(n):
    """Solvable Iwasawa algebra of complex hyperbolic space of complex dimension ``n``.

    Basis ``A, Z, X_1..X_{n-1}, Y_1..Y_{n-1}`` with ``[A, Z] = Z``,
    ``[A, X_k] = X_k / 2``, ``[A, Y_k] = Y_k / 2``, ``[X_k, Y_k] = Z``.
    """
    n = int(n)
    if n < 1:
        raise InvalidInput("chn needs n >= 1")
    m = 2 * n
    c = np.zeros((m, m, m))

    def put(i, j, k, v):
        c[i, j, k] += v
        c[j, i, k] -= v

    put(0, 1, 1, 1.0)
    j = np.zeros((m, m))
    j[1, 0], j[0, 1] = 1.0, -1.0
    for k in range(n - 1):
        x, y = 2 + k, 2 + (n - 1) + k
        put(0, x, x, 0.5)
        put(0, y, y, 0.5)
        put(x, y, 1, 1.0)
        j[y, x], j[x, y] = 1.0, -1.0
    labels = ["A", "Z"] + [f"X{k + 1}" for k in range(n - 1)] + [f"Y{k + 1}" for k in range(n - 1)]
    omega = np.zeros(m)
    omega[1] = -1.0
    return JAlgebra(ac.LieAlgebra(c, labels), j, omega, {"model": "chn", "n": n})


def lorentz_cone_generators(n):
    """Infinitesimal triangular group of the Lorentz cone in ``R^n``.

    Coordinates ``(a, y_1..y_{n-2}, b)`` with cone ``a > 0, ab > |y|^2``.
    The group ``(a, y, b) -> (l1^2 a, l1 (a z + l2 y), |z|^2 a + 2 l2 <z, y> + l2^2 b)``
    has generators ``H1, H2, Z_1..Z_{n-2}``. Base point ``(1, 0, 1)``.
    """
    ia, ib = 0, n - 1
    h1 = np.zeros((n, n))
    h2 = np.zeros((n, n))
    h1[ia, ia] = 2.0
    h2[ib, ib] = 2.0
    zs = []
    for k in range(n - 2):
        y = 1 + k
        h1[y, y] = 1.0
        h2[y, y] = 1.0
        z = np.zeros((n, n))
        z[y, ia] = 1.0
        z[ib, y] = 2.0
        zs.append(z)
    base = np.zeros(n)
    base[ia] = base[ib] = 1.0
    return [h1, h2] + zs, base


def construct_tube(generators, base, labels_t, labels_v):
    """Normal j-algebra of the tube domain ``R^n + i C`` for a cone group acting simply transitively.

    The algebra is ``t + R^n`` inside the affine algebra; ``j`` sends a
    translation ``v`` to the generator ``A`` with ``A base = v`` and ``A`` to
    the translation ``-A base``.
    """
    nv = base.shape[0]
    nt = len(generators)
    if nt != nv:
        raise InvalidInput("cone group must have the dimension of the cone")
    mats = []
    for a in generators:
        x = np.zeros((nv + 1, nv + 1))
        x[:nv, :nv] = a
        mats.append(x)
    for k in range(nv):
        x = np.zeros((nv + 1, nv + 1))
        x[k, nv] = 1.0
        mats.append(x)
    alg = _algebra_from_matrices(mats, list(labels_t) + list(labels_v))
    orbit = np.column_stack([a @ base for a in generators])  # A_i base, as columns
    if abs(np.linalg.det(orbit)) < 1e-12:
        raise InvalidInput("cone group does not act simply transitively at the base point")
    m = nt + nv
    j = np.zeros((m, m))
    # j(A_i) = -T_{A_i base}
    j[nt:, :nt] = -orbit
    # j(T_v) = A with A base = v
    j[:nt, nt:] = np.linalg.inv(orbit)
    return alg, j


def construct_lorentz_tube(n):
    """Rank-2 normal j-algebra of the tube domain over the Lorentz cone in ``R^n`` (``n >= 3``).

    Dimension ``2n``; the underlying domain is the symmetric space
    SO(2, n) / (SO(2) x SO(n)). ``omega`` is the sum of the coordinate duals
    of the translations along the two null boundary rays.
    """
    n = int(n)
    if n < 3:
        raise InvalidInput("lorentz_tube needs n >= 3")
    gens, base = lorentz_cone_generators(n)
    labels_t = ["H1", "H2"] + [f"Z{k + 1}" for k in range(n - 2)]
    labels_v = ["Ta"] + [f"Ty{k + 1}" for k in range(n - 2)] + ["Tb"]
    alg, j = construct_tube(gens, base, labels_t, labels_v)
    omega = np.zeros(2 * n)
    omega[n] = 1.0
    omega[2 * n - 1] = 1.0
    return JAlgebra(alg, j, omega, {"model": "lorentz_tube", "n": n})


def direct_sum_jalgebras(*parts):
    alg = ac.direct_sum(*(p.alg for p in parts))
    j = ac.block_diag(*(p.jmat for p in parts))
    omega = np.concatenate([p.omega for p in parts])
    return JAlgebra(alg, j, omega, {"model": "direct_sum"})
