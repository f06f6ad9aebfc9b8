import functools

import numpy as np
import pytest

from kahlerlab import algebra as ac
from kahlerlab import catalog as cat
from kahlerlab import hermitian as hm


@functools.lru_cache(maxsize=None)
def _cached(name, frozen):
    return cat.catalog(name, dict(frozen))


def example(name, **params):
    key = tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in params.items()))
    return _cached(name, key)


def random_orthogonal(rng, m):
    q, r = np.linalg.qr(rng.normal(size=(m, m)))
    return q * np.sign(np.diag(r))


def random_metric(rng, m, spread=0.5):
    a = np.eye(m) + spread * rng.normal(size=(m, m)) / np.sqrt(m)
    return ac.Metric(ac.symmetrize(a @ a.T))


def random_compatible_structure(rng, kst, size=0.4):
    """Almost-Kähler structure with the same symplectic form as ``kst`` and a random compatible J."""
    om = kst.omega
    m = kst.dim
    h = rng.normal(size=(m, m))
    x = np.linalg.solve(om, h + h.T)
    x *= size / np.linalg.norm(x, 2)  # keeps the Cayley transform well conditioned
    a = np.linalg.solve(np.eye(m) - x / 2, np.eye(m) + x / 2)
    jn = a @ kst.jmat @ np.linalg.inv(a)
    return hm.Structure(kst.alg, ac.Metric(ac.symmetrize(om @ jn)), jn, "random_ak")


def random_orthogonal_j(rng, g):
    """Random g-orthogonal almost complex structure."""
    m = g.dim
    q = random_orthogonal(rng, m)
    j0 = np.zeros((m, m))
    for k in range(m // 2):
        j0[2 * k + 1, 2 * k] = 1.0
        j0[2 * k, 2 * k + 1] = -1.0
    f = g.frame
    return f @ q @ j0 @ q.T @ np.linalg.inv(f)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
