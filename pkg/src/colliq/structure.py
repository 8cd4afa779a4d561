"""Block-pattern checks for the structured colligation classes.

Each checker returns a :class:`StructureReport`.  Equalities are tested in
Frobenius norm against an absolute tolerance: blocks of an isometry have
norm at most one, so absolute and relative scales coincide.  The checkers
are purely algebraic and do not test isometry themselves; the factorization
routines do that before relying on a structure.
"""

from dataclasses import dataclass, field

import numpy as np

from .colligation import SpacePartition, Colligation, flip_permutation
from .errors import ArgumentError, DimensionError, NoWitnessError, ZeroConstantError
from .numerics import adjoint, frobenius_norm

__all__ = [
    "Violation",
    "StructureReport",
    "STRUCTURE_TOL",
    "check_fm",
    "check_fn",
    "check_zero_origin_case1",
    "check_zero_origin_case2",
    "recover_case2_witness",
    "check_chain",
    "flip",
    "check_zero_origin_nvar",
]

STRUCTURE_TOL = 1e-10


@dataclass(frozen=True)
class Violation:
    """A failed constraint: block indices, residual, constraint name."""

    blocks: tuple
    residual: float
    constraint: str


@dataclass
class StructureReport:
    """Outcome of a structure check.

    ``satisfied`` is true exactly when ``violations`` is empty.  ``notes``
    records assumptions the check made along the way.
    """

    violations: list = field(default_factory=list)
    checked: int = 0
    notes: list = field(default_factory=list)

    @property
    def satisfied(self):
        return not self.violations

    def require(self, blocks, residual, constraint, tol):
        self.checked += 1
        if not residual <= tol:
            self.violations.append(Violation(tuple(blocks), float(residual),
                                             constraint))

    def __bool__(self):
        return self.satisfied

    def summary(self):
        lines = ["satisfied" if self.satisfied else
                 f"violated ({len(self.violations)} of {self.checked} constraints)"]
        for v in self.violations:
            lines.append(f"  {v.constraint} at blocks {v.blocks}: residual {v.residual:.3e}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        return "\n".join(lines)


def _gram_scalar(c):
    """``c* c`` for a column ``c``, as a real number."""
    g = (adjoint(c) @ c)
    return float(g.real[0, 0]) if g.size else 0.0


def check_fm(v, m, tol=STRUCTURE_TOL):
    """Separated-variable pattern relative to ``H_1^m (+) H_{m+1}^n``.

    Requires ``D21 == 0`` and ``a D12 == C1 B2``.
    """
    n = v.n
    if not 1 <= m < n:
        raise ArgumentError(f"need 1 <= m < n, got m={m}, n={n}")
    p = v.partition
    first, second = p.span(0, m), p.span(m, n)
    report = StructureReport()
    report.require((2, 1), frobenius_norm(v.D[second, first]), "D21 == 0", tol)
    coupling = v.a * v.D[first, second] - v.C[first] @ v.B[:, second]
    report.require((1, 2), frobenius_norm(coupling), "a*D12 == C1*B2", tol)
    return report


def _split_parts(v):
    p = v.partition
    if p.split is None:
        raise ArgumentError("partition has no M/N split")
    return p, [p.m_indices(i) for i in range(p.n)], [p.n_indices(i) for i in range(p.n)]


def check_fn(v, tol=STRUCTURE_TOL):
    """Same-variable pattern on paired splits ``H_i = M_i (+) N_i``.

    For all ``i, j``: ``D_ij(21) == 0`` and ``a D_ij(12) == C_i(1) B_j(2)``.
    """
    p, M, N = _split_parts(v)
    report = StructureReport()
    for i in range(p.n):
        for j in range(p.n):
            d21 = v.D[np.ix_(N[i], M[j])]
            report.require((i + 1, j + 1), frobenius_norm(d21), "D_ij(21) == 0", tol)
            d12 = v.D[np.ix_(M[i], N[j])]
            coupling = v.a * d12 - v.C[M[i]] @ v.B[:, N[j]]
            report.require((i + 1, j + 1), frobenius_norm(coupling),
                           "a*D_ij(12) == C_i(1)*B_j(2)", tol)
    return report


def _two_blocks(v):
    if v.n != 2:
        raise ArgumentError(
            f"zero-origin checks need a two-block partition, got n={v.n}")
    p = v.partition
    return p.block(0), p.block(1)


def check_zero_origin_case1(v, tol=STRUCTURE_TOL):
    """Pattern for ``theta = phi psi`` with ``phi(0) = 0 != psi(0)``.

    ``V = [[0, B1, 0], [C1, D1, D2], [C2, 0, D4]]`` with
    ``C1 C1* D2 == (C1* C1) D2`` and ``C1* C1 > tol``.
    """
    h1, h2 = _two_blocks(v)
    report = StructureReport()
    report.require((0, 0), abs(v.a), "a == 0", tol)
    report.require((0, 2), frobenius_norm(v.B[:, h2]), "B2 == 0", tol)
    report.require((2, 1), frobenius_norm(v.D[h2, h1]), "D21 == 0", tol)
    C1 = v.C[h1]
    D2 = v.D[h1, h2]
    c1sq = _gram_scalar(C1)
    commut = C1 @ adjoint(C1) @ D2 - c1sq * D2
    report.require((1, 2), frobenius_norm(commut), "C1*C1^* D2 == (C1^* C1) D2", tol)
    report.checked += 1
    if not c1sq > tol:
        report.violations.append(Violation((1, 0), c1sq, "C1^* C1 > 0"))
    return report


def check_zero_origin_case2(v, x, y, tol=STRUCTURE_TOL):
    """Pattern for ``theta = phi psi`` with ``phi(0) = psi(0) = 0``.

    ``V = [[0, B1, 0], [0, D1, D2], [C2, 0, D4]]`` with witnesses ``x``
    (a unit column in ``H_1``) and ``y`` (a row on ``H_2``) such that
    ``x* D1 == 0`` and ``D2 == x y``.
    """
    h1, h2 = _two_blocks(v)
    d1, d2 = v.partition.dims
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != (d1, 1):
        raise DimensionError(f"witness x must have shape {(d1, 1)}, got {x.shape}")
    if y.shape != (1, d2):
        raise DimensionError(f"witness y must have shape {(1, d2)}, got {y.shape}")
    report = StructureReport()
    report.require((0, 0), abs(v.a), "a == 0", tol)
    report.require((1, 0), frobenius_norm(v.C[h1]), "C1 == 0", tol)
    report.require((0, 2), frobenius_norm(v.B[:, h2]), "B2 == 0", tol)
    report.require((2, 1), frobenius_norm(v.D[h2, h1]), "D21 == 0", tol)
    D1 = v.D[h1, h1]
    D2 = v.D[h1, h2]
    report.require((), abs(_gram_scalar(x) - 1.0), "x^* x == 1", tol)
    report.require((1, 1), frobenius_norm(adjoint(x) @ D1), "x^* D1 == 0", tol)
    report.require((1, 2), frobenius_norm(D2 - x @ y), "D2 == x y", tol)
    if min(D2.shape) >= 2:
        sigma = np.linalg.svd(D2, compute_uv=False)
        report.require((1, 2), float(sigma[1]), "rank(D2) <= 1", tol)
    return report


def recover_case2_witness(v, tol=STRUCTURE_TOL):
    """Find ``(x, y)`` for :func:`check_zero_origin_case2`.

    When ``D2 != 0`` the leading singular pair gives ``x`` and ``y``.  When
    ``D2 == 0`` any unit ``x`` orthogonal to the range of ``D1`` works.

    Raises
    ------
    NoWitnessError
        If ``D2`` has rank above one, or no admissible ``x`` exists.
    """
    h1, h2 = _two_blocks(v)
    D1 = v.D[h1, h1]
    D2 = v.D[h1, h2]
    d1 = D1.shape[0]
    if d1 == 0:
        raise NoWitnessError("H_1 is zero-dimensional; no unit witness x exists")
    if frobenius_norm(D2) > tol:
        u, s, vh = np.linalg.svd(D2)
        if len(s) > 1 and s[1] > tol:
            raise NoWitnessError(
                f"D2 has rank > 1 (second singular value {s[1]:.3e})")
        x = u[:, :1]
        y = s[0] * vh[:1, :]
        return x, y
    # D2 == 0: pick x in the orthogonal complement of range(D1)
    u, s, _ = np.linalg.svd(D1)
    free = np.flatnonzero(s <= tol)
    if free.size == 0:
        raise NoWitnessError("D2 == 0 and D1 is onto; no x with x^* D1 == 0")
    x = u[:, free[:1]]
    return x, adjoint(x) @ D2


def check_chain(v, tol=STRUCTURE_TOL):
    """Pattern of a product of one-variable factors.

    ``D_ij == 0`` for ``i > j`` and ``a D_ij == C_i B_j`` for ``i < j``.

    Raises
    ------
    ZeroConstantError
        If ``|a| <= tol``; use the zero-origin checks instead.
    """
    if abs(v.a) <= tol:
        raise ZeroConstantError(
            "chain structure needs a non-zero constant term; "
            "use the zero-origin checks for functions vanishing at 0")
    p = v.partition
    report = StructureReport()
    for i in range(p.n):
        for j in range(p.n):
            bi, bj = p.block(i), p.block(j)
            if i > j:
                report.require((i + 1, j + 1), frobenius_norm(v.D[bi, bj]),
                               "D_ij == 0 (i > j)", tol)
            elif i < j:
                coupling = v.a * v.D[bi, bj] - v.C[bi] @ v.B[:, bj]
                report.require((i + 1, j + 1), frobenius_norm(coupling),
                               "a*D_ij == C_i*B_j (i < j)", tol)
    return report


def flip(v):
    """Conjugate the state space by the flip permutation.

    Returns the colligation ``[[a, B P*], [P C, P D P*]]`` on the two-block
    partition ``((+)M_i, (+)N_i)``.  Its blocks are the arrowhead form
    ``[[a, B(1), B(2)], [C(1), D(1), D(12)], [C(2), D(21), D(2)]]``.
    """
    p = v.partition
    P = flip_permutation(p)
    Pt = adjoint(P)
    two = SpacePartition((sum(p.m_dims), sum(p.n_dims)))
    return Colligation(v.a, v.B @ Pt, P @ v.C, P @ v.D @ Pt, two)


def check_zero_origin_nvar(v, case, x=None, y=None, tol=STRUCTURE_TOL):
    """n-variable zero-origin patterns, checked on the flipped arrowhead form.

    ``case`` is 1 (``psi(0) != 0``) or 2 (``phi(0) = psi(0) = 0``).  For
    case 2 the witnesses default to :func:`recover_case2_witness`.  In both
    cases ``B_i(2) == 0`` is required, since the separated product with a
    vanishing first constant always produces it.
    """
    arrow = flip(v)
    if case == 1:
        report = check_zero_origin_case1(arrow, tol)
        report.notes.append("B_i(2) == 0 required, as in the two-block case")
        return report
    if case == 2:
        if x is None or y is None:
            try:
                x, y = recover_case2_witness(arrow, tol)
            except NoWitnessError as exc:
                report = StructureReport(checked=1)
                report.violations.append(Violation((1, 2), np.inf, str(exc)))
                return report
        return check_zero_origin_case2(arrow, x, y, tol)
    raise ArgumentError(f"case must be 1 or 2, got {case!r}")
