"""Colligations on C + (H_1 + ... + H_n) and their transfer functions.

A colligation is the square block operator::

    V = [[a, B],
         [C, D]]

acting on ``C (+) H_1 (+) ... (+) H_n``.  The scalar slot always sits at
index 0 of the assembled matrix and the ``H_i`` follow in partition order.
Its transfer function on the open polydisc is::

    tau_V(z) = a + B (I - E(z) D)^{-1} E(z) C,   E(z) = z_1 I_{H_1} (+) ... (+) z_n I_{H_n}
"""

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import ArgumentError, DimensionError, DomainError

__all__ = [
    "SpacePartition",
    "Colligation",
    "GridReport",
    "assemble",
    "is_isometry",
    "transfer_eval",
    "transfer_eval_grid",
    "schur_bound_check",
    "sample_polydisc",
    "flip_permutation",
    "ISOMETRY_TOL",
    "SCHUR_TOL",
]

ISOMETRY_TOL = 1e-10
SCHUR_TOL = 1e-10


@dataclass(frozen=True)
class SpacePartition:
    """Dimensions of the state-space summands ``H_1, ..., H_n``.

    Parameters
    ----------
    dims : tuple of int
        ``dim H_i``; zero is allowed.
    split : tuple of (int, int), optional
        Per-block ``(dim M_i, dim N_i)`` with ``H_i = M_i (+) N_i``.
    """

    dims: tuple
    split: tuple = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ArgumentError("a partition needs at least one block")
        if any(d < 0 for d in dims):
            raise ArgumentError(f"block dimensions must be >= 0, got {dims}")
        object.__setattr__(self, "dims", dims)
        if self.split is not None:
            split = tuple((int(m), int(k)) for m, k in self.split)
            if len(split) != len(dims):
                raise ArgumentError(
                    f"split has {len(split)} pairs for {len(dims)} blocks")
            for i, ((m, k), d) in enumerate(zip(split, dims)):
                if m < 0 or k < 0 or m + k != d:
                    raise ArgumentError(
                        f"split pair {i} = ({m}, {k}) does not sum to {d}")
            object.__setattr__(self, "split", split)

    @property
    def n(self):
        """Number of variables."""
        return len(self.dims)

    @property
    def total(self):
        return sum(self.dims)

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.dims)]).astype(int)

    def block(self, i):
        """Slice of the state indices belonging to ``H_i`` (0-based)."""
        off = self.offsets
        return slice(off[i], off[i + 1])

    def span(self, start, stop):
        """Slice covering ``H_start (+) ... (+) H_{stop-1}`` (0-based)."""
        off = self.offsets
        return slice(off[start], off[stop])

    def m_indices(self, i):
        """State indices of ``M_i`` inside the full state vector."""
        if self.split is None:
            raise ArgumentError("partition has no M/N split")
        start = self.offsets[i]
        return np.arange(start, start + self.split[i][0])

    def n_indices(self, i):
        """State indices of ``N_i`` inside the full state vector."""
        if self.split is None:
            raise ArgumentError("partition has no M/N split")
        start = self.offsets[i] + self.split[i][0]
        return np.arange(start, start + self.split[i][1])

    @property
    def m_dims(self):
        return tuple(m for m, _ in self.split)

    @property
    def n_dims(self):
        return tuple(k for _, k in self.split)

    def diagonal(self, z):
        """Diagonal of ``E(z)``: each ``z_i`` repeated ``dim H_i`` times."""
        return np.repeat(np.asarray(z, dtype=np.complex128), self.dims)


def _as_partition(partition):
    if isinstance(partition, SpacePartition):
        return partition
    return SpacePartition(tuple(partition))


@dataclass(frozen=True, eq=False)
class Colligation:
    """Block operator ``[[a, B], [C, D]]`` on ``C (+) H_1 (+) ... (+) H_n``.

    Blocks are stored as read-only ``complex128`` arrays: ``B`` is
    ``(1, N)``, ``C`` is ``(N, 1)`` and ``D`` is ``(N, N)`` where
    ``N = partition.total``.
    """

    a: complex
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    partition: SpacePartition = field(default=None)

    def __post_init__(self):
        a = complex(self.a)
        if not np.isfinite(a.real) or not np.isfinite(a.imag):
            raise ValueError("constant term must be finite")
        D = np.atleast_2d(np.asarray(self.D, dtype=np.complex128))
        partition = self.partition
        if partition is None:
            partition = SpacePartition((D.shape[0],))
        partition = _as_partition(partition)
        N = partition.total
        B = np.asarray(self.B, dtype=np.complex128)
        C = np.asarray(self.C, dtype=np.complex128)
        if B.ndim < 2:
            B = B.reshape(1, -1)
        if C.ndim < 2:
            C = C.reshape(-1, 1)
        if D.size == 0:
            D = D.reshape(N, N) if N == 0 else D
        for name, arr, shape in (("B", B, (1, N)), ("C", C, (N, 1)),
                                 ("D", D, (N, N))):
            if arr.shape != shape:
                raise DimensionError(
                    f"block {name} has shape {arr.shape}, partition "
                    f"{partition.dims} requires {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"block {name} has non-finite entries")
        for arr in (B, C, D):
            arr.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "partition", partition)

    @classmethod
    def from_matrix(cls, V, partition):
        """Split a square ``(1+N, 1+N)`` matrix into colligation blocks."""
        V = numerics.as_cmatrix(V, "V")
        partition = _as_partition(partition)
        N = partition.total
        if V.shape != (N + 1, N + 1):
            raise DimensionError(
                f"matrix shape {V.shape} does not match partition "
                f"{partition.dims} (expected {(N + 1, N + 1)})")
        return cls(V[0, 0], V[:1, 1:].copy(), V[1:, :1].copy(),
                   V[1:, 1:].copy(), partition)

    @property
    def n(self):
        return self.partition.n

    @property
    def matrix(self):
        return assemble(self)

    def with_partition(self, partition):
        """Same blocks, reinterpreted over another partition of equal size."""
        return Colligation(self.a, self.B, self.C, self.D, partition)

    def __call__(self, *z):
        if len(z) == 1 and np.ndim(z[0]) == 1:
            z = z[0]
        return transfer_eval(self, z)

    def __repr__(self):
        return (f"Colligation(a={self.a!r}, dims={self.partition.dims}, "
                f"split={self.partition.split})")


@dataclass
class GridReport:
    """Transfer-function values on a list of points."""

    points: list
    values: list
    max_modulus: float = 0.0
    max_residual: float = 0.0

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise ValueError("points and values must have equal length")


def assemble(v):
    """The ``(1+N, 1+N)`` matrix ``[[a, B], [C, D]]``."""
    N = v.partition.total
    V = np.empty((N + 1, N + 1), dtype=np.complex128)
    V[0, 0] = v.a
    V[:1, 1:] = v.B
    V[1:, :1] = v.C
    V[1:, 1:] = v.D
    return V


def isometry_residual(V):
    """``||V* V - I||_F`` for any (possibly rectangular) matrix ``V``."""
    V = np.asarray(V, dtype=np.complex128)
    gram = numerics.matmul(numerics.adjoint(V), V)
    return numerics.frobenius_norm(gram - np.eye(V.shape[1]))


def is_isometry(v, tol=ISOMETRY_TOL):
    """Return ``(ok, residual)`` with ``residual = ||V* V - I||_F``."""
    if tol <= 0:
        raise ArgumentError("tol must be positive")
    residual = isometry_residual(assemble(v))
    return residual <= tol, residual


def _check_point(z, n, index=None):
    z = np.asarray(z, dtype=np.complex128).ravel()
    if z.shape[0] != n:
        raise DimensionError(f"point has {z.shape[0]} coordinates, expected {n}")
    if n and np.max(np.abs(z)) >= 1.0:
        where = "" if index is None else f"point {index}: "
        raise DomainError(
            f"{where}{z} is not in the open polydisc", index=index)
    return z


def transfer_eval(v, z):
    """Evaluate ``tau_V(z) = a + B (I - E(z) D)^{-1} E(z) C``.

    Raises
    ------
    DomainError
        If some ``|z_i| >= 1``.
    SingularMatrixError
        If the resolvent does not exist (only for non-contractive ``D``).
    """
    z = _check_point(z, v.n)
    E = np.diag(v.partition.diagonal(z))
    N = v.partition.total
    resolvent_rhs = numerics.matmul(E, v.C)
    lhs = np.eye(N) - numerics.matmul(E, v.D)
    x = numerics.solve(lhs, resolvent_rhs)
    return v.a + complex(numerics.matmul(v.B, x)[0, 0])


def transfer_eval_grid(v, points):
    """Evaluate ``tau_V`` at each point; errors carry the point index."""
    values = []
    pts = []
    for k, z in enumerate(points):
        try:
            z = _check_point(z, v.n, index=k)
            values.append(transfer_eval(v, z))
        except DomainError as exc:
            exc.index = k
            raise
        except Exception as exc:
            exc.args = (f"point {k}: {exc}",) + exc.args[1:]
            raise
        pts.append(z)
    max_modulus = max((abs(w) for w in values), default=0.0)
    return GridReport(pts, values, max_modulus=float(max_modulus))


def sample_polydisc(n, num_points, seed, radius=0.9):
    """Seeded points of the polydisc, each coordinate ``r e^{i t}``.

    ``r`` is uniform on ``[0, radius]`` and ``t`` uniform on ``[0, 2 pi)``.
    Returns an ``(num_points, n)`` complex array.
    """
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.0, radius, size=(num_points, n))
    t = rng.uniform(0.0, 2 * np.pi, size=(num_points, n))
    return r * np.exp(1j * t)


def schur_bound_check(v, num_points=200, seed=42, tol=SCHUR_TOL):
    """Spot-check ``|tau_V| <= 1`` on seeded interior points.

    Returns ``(ok, max_modulus)``.
    """
    report = transfer_eval_grid(v, sample_polydisc(v.n, num_points, seed))
    return report.max_modulus <= 1.0 + tol, report.max_modulus


def flip_permutation(partition):
    """Permutation matrix taking ``(+)_i (M_i (+) N_i)`` to ``((+)M_i) (+) ((+)N_i)``.

    Applied to a state vector ``x`` in the interleaved order, ``P @ x`` lists
    every ``M_i`` component first (in block order), then every ``N_i``.
    """
    if partition.split is None:
        raise ArgumentError("flip requires a partition with an M/N split")
    order = np.concatenate(
        [partition.m_indices(i) for i in range(partition.n)]
        + [partition.n_indices(i) for i in range(partition.n)]).astype(int)
    N = partition.total
    P = np.zeros((N, N), dtype=np.complex128)
    P[np.arange(N), order] = 1.0
    return P
