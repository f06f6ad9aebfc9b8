"""Cyclic Jacobi eigen-solver for small dense symmetric matrices."""

import numpy as np


def jacobi_eigh(a, tol=1e-15, max_sweeps=100):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Symmetric matrix. Only the symmetric part is used.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm drops below
        ``tol * ||a||_F``.
    max_sweeps : int
        Hard cap on the number of full sweeps.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues in ascending order.
    v : ndarray, shape (n, n)
        Orthonormal eigenvectors as columns, ``a @ v[:, k] = w[k] * v[:, k]``.
    """
    a = np.array(a, dtype=float)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        w = np.diag(a).copy()
        order = np.argsort(w, kind="stable")
        return w[order], v[:, order]

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2) * 2.0)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = a[:, p].copy()
                rot_q = a[:, q].copy()
                a[:, p] = c * rot_p - s * rot_q
                a[:, q] = s * rot_p + c * rot_q
                rot_p = a[p, :].copy()
                rot_q = a[q, :].copy()
                a[p, :] = c * rot_p - s * rot_q
                a[q, :] = s * rot_p + c * rot_q
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def cluster_eigenvalues(w, tol):
    """Group ascending eigenvalues whose consecutive gaps are below ``tol``.

    ``tol`` is relative to ``max(1, max |w|)``. Returns a list of index lists.
    """
    w = np.asarray(w, dtype=float)
    if w.size == 0:
        return []
    scale = max(1.0, float(np.max(np.abs(w))))
    groups = [[0]]
    for k in range(1, w.size):
        if w[k] - w[k - 1] < tol * scale:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups
