"""Canonical and random colligations."""

import numpy as np

from .colligation import Colligation, SpacePartition
from .errors import ArgumentError, DomainError
from .factorize import product_chain, product_fm, product_fn
from .numerics import haar_unitary

__all__ = [
    "blaschke_colligation",
    "monomial_colligation",
    "shifted_blaschke_product_colligation",
    "constant_colligation",
    "random_isometric_colligation",
    "random_structured_colligation",
    "STRUCTURED_KINDS",
]

STRUCTURED_KINDS = ("fm", "fn", "chain", "zero_origin_1", "zero_origin_2",
                    "zero_origin_fn_1", "zero_origin_fn_2")


def blaschke_colligation(lam):
    """Unitary 2x2 colligation whose transfer function is ``(z - lam)/(1 - conj(lam) z)``.

    >>> blaschke_colligation(0).matrix.real
    array([[0., 1.],
           [1., 0.]])
    """
    lam = complex(lam)
    if abs(lam) >= 1.0:
        raise DomainError(f"|lambda| = {abs(lam)} is not < 1")
    s = np.sqrt(1.0 - abs(lam) ** 2)
    return Colligation(-lam, [[s]], [[s]], [[np.conj(lam)]], SpacePartition((1,)))


def monomial_colligation(m):
    """The cyclic shift on ``C (+) C^m``; its transfer function is ``z^m``."""
    if m < 1:
        raise ArgumentError(f"m must be >= 1, got {m}")
    V = np.roll(np.eye(m + 1), 1, axis=1)
    return Colligation.from_matrix(V, SpacePartition((m,)))


def shifted_blaschke_product_colligation(alpha, beta):
    """The 3x3 colligation realizing ``b_alpha(z_1) b_beta(z_2)``."""
    alpha, beta = complex(alpha), complex(beta)
    for name, lam in (("alpha", alpha), ("beta", beta)):
        if abs(lam) >= 1.0:
            raise DomainError(f"|{name}| = {abs(lam)} is not < 1")
    sa = np.sqrt(1.0 - abs(alpha) ** 2)
    sb = np.sqrt(1.0 - abs(beta) ** 2)
    V = np.array([
        [alpha * beta, sa, -alpha * sb],
        [-beta * sa, np.conj(alpha), sa * sb],
        [sb, 0.0, np.conj(beta)],
    ])
    return Colligation.from_matrix(V, SpacePartition((1, 1)))


def constant_colligation(c=1.0, dims=(0,)):
    """Constant transfer function ``c`` with ``|c| = 1``.

    The state space has the given block dimensions and carries the identity,
    so the result is unitary.
    """
    c = complex(c)
    p = SpacePartition(tuple(dims))
    N = p.total
    return Colligation(c, np.zeros((1, N)), np.zeros((N, 1)), np.eye(N), p)


def random_isometric_colligation(partition, seed):
    """Split a Haar-random unitary of size ``1 + N`` into colligation blocks."""
    if not isinstance(partition, SpacePartition):
        partition = SpacePartition(tuple(partition))
    U = haar_unitary(1 + partition.total, seed)
    return Colligation.from_matrix(U, partition)


def _zero_constant(v):
    """Rotate the first two columns so the (0, 0) entry vanishes; stays unitary."""
    V = v.matrix
    if V.shape[0] < 2:
        raise ArgumentError("cannot force a = 0 with a zero-dimensional state")
    u0, u1 = V[0, 0], V[0, 1]
    r = np.hypot(abs(u0), abs(u1))
    if r == 0.0:
        return v
    G = np.array([[u1, np.conj(u0)], [-u0, np.conj(u1)]]) / r
    V[:, :2] = V[:, :2] @ G
    V[0, 0] = 0.0
    return Colligation.from_matrix(V, v.partition)


def _seeds(seed, k):
    return np.random.SeedSequence(seed).generate_state(k)


def random_structured_colligation(kind, dims=None, *, m=None, split=None, seed=0):
    """Random colligation that passes the structure check named by ``kind``.

    Parameters
    ----------
    kind : str
        ``"fm"`` (needs ``dims`` and ``m``), ``"fn"`` (needs ``split``),
        ``"chain"`` (``dims``, one block per variable), ``"zero_origin_1"`` /
        ``"zero_origin_2"`` (``dims = (d1, d2)``, one variable per block), or
        ``"zero_origin_fn_1"`` / ``"zero_origin_fn_2"`` (``split``).
    seed : int

    Built by applying the matching product construction to Haar-random
    factors; zero-origin kinds first rotate a factor so its constant vanishes.
    """
    s = _seeds(seed, max(2, len(dims) if dims is not None else 0))
    if kind == "fm":
        dims = tuple(dims)
        if m is None or not 1 <= m < len(dims):
            raise ArgumentError("kind 'fm' needs 1 <= m < len(dims)")
        v1 = random_isometric_colligation(dims[:m], s[0])
        v2 = random_isometric_colligation(dims[m:], s[1])
        return product_fm(v1, v2)
    if kind in ("fn", "zero_origin_fn_1", "zero_origin_fn_2"):
        if split is None:
            raise ArgumentError(f"kind {kind!r} needs a split")
        split = tuple(tuple(pair) for pair in split)
        v1 = random_isometric_colligation([mm for mm, _ in split], s[0])
        v2 = random_isometric_colligation([nn for _, nn in split], s[1])
        if kind != "fn":
            v1 = _zero_constant(v1)
        if kind == "zero_origin_fn_2":
            v2 = _zero_constant(v2)
        return product_fn(v1, v2)
    if kind == "chain":
        dims = tuple(dims)
        if not dims:
            raise ArgumentError("kind 'chain' needs at least one block")
        return product_chain([random_isometric_colligation((d,), s[k])
                              for k, d in enumerate(dims)])
    if kind in ("zero_origin_1", "zero_origin_2"):
        dims = tuple(dims)
        if len(dims) != 2 or min(dims) < 1:
            raise ArgumentError(f"kind {kind!r} needs dims (d1, d2) with d1, d2 >= 1")
        v1 = _zero_constant(random_isometric_colligation(dims[:1], s[0]))
        v2 = random_isometric_colligation(dims[1:], s[1])
        if kind == "zero_origin_2":
            v2 = _zero_constant(v2)
        return product_fm(v1, v2)
    raise ArgumentError(f"unknown kind {kind!r}; expected one of {STRUCTURED_KINDS}")
