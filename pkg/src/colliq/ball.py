"""Rectangular colligations for contractive multipliers on the unit ball.

A ball colligation is ``V = [[a, B], [C, D]] : C (+) H -> C (+) H^n`` with
``B`` of shape ``(1, d)``, ``C = [C_1; ...; C_n]`` of shape ``(n d, 1)`` and
``D = [D_1; ...; D_n]`` of shape ``(n d, d)``; each ``D_j`` maps ``H`` to
``H``.  Its transfer function on the open unit ball is::

    tau_V(z) = a + B (I_H - E(z) D)^{-1} E(z) C,   E(z) = [z_1 I_H, ..., z_n I_H]

Only evaluation and the separated-variable structure check are provided;
there is no factor extraction for the ball.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .colligation import ISOMETRY_TOL, SCHUR_TOL, isometry_residual
from .errors import ArgumentError, DimensionError, DomainError, NotIsometricError
from .numerics import frobenius_norm
from .structure import STRUCTURE_TOL, StructureReport

__all__ = [
    "BallColligation",
    "assemble_ball",
    "is_ball_isometry",
    "ball_transfer_eval",
    "sample_ball",
    "ball_bound_check",
    "check_ball_factor_structure",
    "random_isometric_ball_colligation",
    "ball_separated_product",
]


@dataclass(frozen=True, eq=False)
class BallColligation:
    """``[[a, B], [C, D]] : C (+) H -> C (+) H^n`` with ``dim H = d``.

    ``split`` optionally declares ``d = d1 + d2`` for the structure check.
    """

    a: complex
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    n: int
    split: tuple = None

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ArgumentError("a ball colligation needs n >= 1")
        B = np.asarray(self.B, dtype=np.complex128)
        B = B.reshape(1, -1) if B.ndim < 2 else B
        d = B.shape[1]
        C = np.asarray(self.C, dtype=np.complex128)
        if C.ndim < 2:
            C = C.reshape(-1, 1)
        D = np.asarray(self.D, dtype=np.complex128)
        if D.size == 0:
            D = D.reshape(n * d, d)
        for name, arr, shape in (("B", B, (1, d)), ("C", C, (n * d, 1)),
                                 ("D", D, (n * d, d))):
            if arr.shape != shape:
                raise DimensionError(
                    f"block {name} has shape {arr.shape}, expected {shape} "
                    f"for n={n}, d={d}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"block {name} has non-finite entries")
            arr.flags.writeable = False
        split = self.split
        if split is not None:
            split = (int(split[0]), int(split[1]))
            if min(split) < 0 or sum(split) != d:
                raise ArgumentError(f"split {split} does not sum to d={d}")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "split", split)

    @property
    def d(self):
        return self.B.shape[1]

    def C_block(self, j):
        d = self.d
        return self.C[j * d:(j + 1) * d]

    def D_block(self, j):
        d = self.d
        return self.D[j * d:(j + 1) * d]

    @classmethod
    def from_matrix(cls, V, n, split=None):
        """Split a ``(1 + n d, 1 + d)`` matrix into blocks."""
        V = numerics.as_cmatrix(V, "V")
        d = V.shape[1] - 1
        if V.shape[0] != 1 + n * d:
            raise DimensionError(
                f"matrix shape {V.shape} is not (1 + n*d, 1 + d) for n={n}")
        return cls(V[0, 0], V[:1, 1:].copy(), V[1:, :1].copy(),
                   V[1:, 1:].copy(), n, split)

    @property
    def matrix(self):
        return assemble_ball(self)


def assemble_ball(v):
    V = np.empty((1 + v.n * v.d, 1 + v.d), dtype=np.complex128)
    V[0, 0] = v.a
    V[:1, 1:] = v.B
    V[1:, :1] = v.C
    V[1:, 1:] = v.D
    return V


def is_ball_isometry(v, tol=ISOMETRY_TOL):
    """Return ``(ok, ||V* V - I_{1+d}||_F)``."""
    residual = isometry_residual(assemble_ball(v))
    return residual <= tol, residual


def ball_transfer_eval(v, z):
    """Evaluate ``tau_V`` at a point of the open unit ball."""
    z = np.asarray(z, dtype=np.complex128).ravel()
    if z.shape[0] != v.n:
        raise DimensionError(f"point has {z.shape[0]} coordinates, expected {v.n}")
    if np.sum(np.abs(z) ** 2) >= 1.0:
        raise DomainError(f"{z} is not in the open unit ball")
    d = v.d
    E = np.kron(z[np.newaxis, :], np.eye(d))
    lhs = np.eye(d) - numerics.matmul(E, v.D)
    x = numerics.solve(lhs, numerics.matmul(E, v.C))
    return v.a + complex(numerics.matmul(v.B, x)[0, 0])


def sample_ball(n, num_points, seed, radius_sq=0.81):
    """Seeded points ``r u`` with ``u`` uniform on the sphere and ``r^2`` uniform on ``[0, radius_sq]``."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((num_points, n)) + 1j * rng.standard_normal((num_points, n))
    u = g / np.linalg.norm(g, axis=1, keepdims=True)
    r = np.sqrt(rng.uniform(0.0, radius_sq, size=(num_points, 1)))
    return r * u


def ball_bound_check(v, num_points=500, seed=42, tol=SCHUR_TOL):
    """Spot-check ``|tau_V| <= 1`` on seeded ball points; ``(ok, max_modulus)``."""
    worst = max((abs(ball_transfer_eval(v, z))
                 for z in sample_ball(v.n, num_points, seed)), default=0.0)
    return worst <= 1.0 + tol, worst


def check_ball_factor_structure(v, m, tol=STRUCTURE_TOL):
    """Block pattern of a ball multiplier ``phi(z_1..z_m) psi(z_{m+1}..z_n)``.

    With ``H = H_1 (+) H_2`` (the declared split), for ``j <= m``::

        C_j = [C_j(1); 0],   D_j = [[D_j(1), D_j(2)], [0, 0]]

    for ``j > m``::

        C_j = [0; C_j(2)],   D_j = [[0, 0], [0, D_j(3)]]

    and ``a D_i(2) == C_i(1) B(2)`` for ``i <= m``.
    """
    if v.split is None:
        raise ArgumentError("ball structure check needs a declared split d = d1 + d2")
    if not 1 <= m < v.n:
        raise ArgumentError(f"need 1 <= m < n, got m={m}, n={v.n}")
    d1, _ = v.split
    top, bottom = slice(0, d1), slice(d1, v.d)
    B2 = v.B[:, bottom]
    report = StructureReport()
    for j in range(v.n):
        Cj, Dj = v.C_block(j), v.D_block(j)
        idx = j + 1
        if j < m:
            report.require((idx,), frobenius_norm(Cj[bottom]), "C_j(2) == 0 (j <= m)", tol)
            report.require((idx,), frobenius_norm(Dj[bottom, :]),
                           "bottom rows of D_j == 0 (j <= m)", tol)
            coupling = v.a * Dj[top, bottom] - Cj[top] @ B2
            report.require((idx,), frobenius_norm(coupling),
                           "a*D_j(2) == C_j(1)*B(2)", tol)
        else:
            report.require((idx,), frobenius_norm(Cj[top]), "C_j(1) == 0 (j > m)", tol)
            off = np.concatenate([Dj[top, :].ravel(), Dj[bottom, top].ravel()])
            report.require((idx,), frobenius_norm(off),
                           "D_j == [[0, 0], [0, D_j(3)]] (j > m)", tol)
    return report


def random_isometric_ball_colligation(n, d, seed, split=None):
    """First ``1 + d`` columns of a Haar unitary of size ``1 + n d``."""
    U = numerics.haar_unitary(1 + n * d, seed)
    return BallColligation.from_matrix(U[:, :1 + d], n, split)


def ball_separated_product(v1, v2, tol=ISOMETRY_TOL):
    """Ball colligation realizing ``tau_v1(z_1..z_m) tau_v2(z_{m+1}..z_n)``.

    With ``v1 = (alpha, B, C_j, D_j)`` and ``v2 = (beta, F, G_j, H_j)`` the
    result lives on ``H = H_1 (+) H_2`` with::

        a = alpha beta,  B = [B, alpha F],
        C_j = [beta C_j; 0],  D_j = [[D_j, C_j F], [0, 0]]      (j <= m)
        C_j = [0; G_j],       D_j = [[0, 0], [0, H_j]]          (j > m)

    It carries the split ``(d1, d2)`` and passes
    :func:`check_ball_factor_structure` with ``m = v1.n``.
    """
    for name, v in (("first", v1), ("second", v2)):
        ok, residual = is_ball_isometry(v, tol)
        if not ok:
            raise NotIsometricError(f"{name} factor is not isometric "
                                    f"(residual {residual:.3e})", residual)
    d1, d2 = v1.d, v2.d
    alpha, beta = v1.a, v2.a
    n = v1.n + v2.n
    C_blocks = []
    D_blocks = []
    for j in range(v1.n):
        Cj = v1.C_block(j)
        C_blocks.append(np.vstack([beta * Cj, np.zeros((d2, 1))]))
        D_blocks.append(np.block([[v1.D_block(j), Cj @ v2.B],
                                  [np.zeros((d2, d1 + d2))]]))
    for j in range(v2.n):
        C_blocks.append(np.vstack([np.zeros((d1, 1)), v2.C_block(j)]))
        D_blocks.append(np.block([[np.zeros((d1, d1 + d2))],
                                  [np.zeros((d2, d1)), v2.D_block(j)]]))
    return BallColligation(alpha * beta, np.hstack([v1.B, alpha * v2.B]),
                           np.vstack(C_blocks), np.vstack(D_blocks), n,
                           (d1, d2))
