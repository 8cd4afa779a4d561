"""Products and factorizations of isometric colligations.

Product maps build one structured colligation out of two (or more) factor
colligations so that the transfer functions multiply.  Extraction maps run
the other way: given a colligation with the right block pattern they return
factor colligations whose transfer functions multiply back to the original.

Factor extraction fixes the free phase by taking ``beta`` (and, in the
zero-origin case 1, ``x``) positive real.  Any other choice differs by a
unimodular constant, which :func:`kappa_pi_roundtrip` measures.
"""

from dataclasses import dataclass
import warnings

import numpy as np

from .colligation import (
    ISOMETRY_TOL,
    Colligation,
    SpacePartition,
    flip_permutation,
    is_isometry,
    sample_polydisc,
    transfer_eval,
)
from .errors import (
    ArgumentError,
    NotIsometricError,
    StructureError,
    VerificationError,
    ZeroConstantError,
)
from .numerics import adjoint
from . import structure

__all__ = [
    "FactorizationResult",
    "VERIFY_TOL",
    "GRID_POINTS",
    "GRID_SEED",
    "verification_grid",
    "separated_residual",
    "same_point_residual",
    "chain_residual",
    "fm_embeddings",
    "fn_embeddings",
    "product_fm",
    "factor_fm",
    "flip_permutation",
    "product_fn",
    "factor_fn",
    "product_chain",
    "factor_chain",
    "factor_zero_origin_case1",
    "factor_zero_origin_case2",
    "check_and_factor_zero_origin_nvar",
    "embed_fm_into_fn",
    "kappa_pi_roundtrip",
]

VERIFY_TOL = 1e-10
GRID_POINTS = 100
GRID_SEED = 42
ZERO_TOL = 1e-10
# Gram values such as C1* C1 are real; larger imaginary parts mean bad input.
_GRAM_IMAG_TOL = 1e-14


@dataclass
class FactorizationResult:
    """Two factor colligations and the scalars that relate them.

    ``alpha * beta`` equals the constant term of the factored colligation.
    ``residual`` is the largest transfer-identity error on the verification
    grid (``nan`` when verification was not requested).
    ``normalization_gap`` is ``| |a|^2 + C1*C1 - (1 - C2*C2) |``, the
    disagreement between the two equivalent formulas for ``|beta|^2``.
    """

    left: Colligation
    right: Colligation
    alpha: complex
    beta: complex
    residual: float = np.nan
    normalization_gap: float = 0.0


def verification_grid(n, num_points=GRID_POINTS, seed=GRID_SEED):
    return sample_polydisc(n, num_points, seed, radius=0.9)


def separated_residual(v, left, right, points=None):
    """``max |tau_v(z) - tau_left(z') tau_right(z'')|`` with ``z = (z', z'')``."""
    m = left.n
    if points is None:
        points = verification_grid(v.n)
    return max((abs(transfer_eval(v, z)
                    - transfer_eval(left, z[:m]) * transfer_eval(right, z[m:]))
                for z in points), default=0.0)


def same_point_residual(v, left, right, points=None):
    """``max |tau_v(z) - tau_left(z) tau_right(z)|``."""
    if points is None:
        points = verification_grid(v.n)
    return max((abs(transfer_eval(v, z)
                    - transfer_eval(left, z) * transfer_eval(right, z))
                for z in points), default=0.0)


def chain_residual(v, factors, points=None):
    """``max |tau_v(z) - prod_i tau_i(z_i)|`` for one-variable factors."""
    if points is None:
        points = verification_grid(v.n)
    worst = 0.0
    for z in points:
        prod = 1.0 + 0j
        for zi, f in zip(z, factors):
            prod *= transfer_eval(f, [zi])
        worst = max(worst, abs(transfer_eval(v, z) - prod))
    return worst


def _require_isometric(v, tol, name="colligation"):
    ok, residual = is_isometry(v, tol)
    if not ok:
        raise NotIsometricError(
            f"{name} is not isometric (||V*V - I||_F = {residual:.3e})",
            residual=residual)


def _verify(residual, tol, what):
    if not residual <= tol:
        raise VerificationError(
            f"{what}: transfer identity residual {residual:.3e} exceeds {tol:.1e}",
            residual=residual)
    return residual


def _gram(c):
    g = adjoint(c) @ c
    if g.size == 0:
        return 0.0
    g = complex(g[0, 0])
    if abs(g.imag) > _GRAM_IMAG_TOL:
        raise ValueError(f"Gram value {g} is not real")
    return g.real


# --- separated variables ---------------------------------------------------

def fm_embeddings(v1, v2):
    """The padded isometries ``W1 = V1 (+) I`` and ``W2`` with ``W1 W2 = product_fm``."""
    d1, d2 = v1.partition.total, v2.partition.total
    N = d1 + d2
    W1 = np.eye(N + 1, dtype=np.complex128)
    W1[:d1 + 1, :d1 + 1] = v1.matrix
    idx = np.r_[0, d1 + 1:N + 1]
    W2 = np.eye(N + 1, dtype=np.complex128)
    W2[np.ix_(idx, idx)] = v2.matrix
    return W1, W2


def product_fm(v1, v2, verify=False, tol=ISOMETRY_TOL, verify_tol=VERIFY_TOL):
    """Colligation realizing ``tau_v1(z_1..z_m) * tau_v2(z_{m+1}..z_n)``.

    Returns ``[[a1 a2, B1, a1 B2], [a2 C1, D1, C1 B2], [C2, 0, D2]]`` on the
    concatenated partition.

    Raises
    ------
    NotIsometricError
        If either input fails the isometry test at ``tol``.
    VerificationError
        If ``verify`` and the grid residual exceeds ``verify_tol``.
    """
    _require_isometric(v1, tol, "first factor")
    _require_isometric(v2, tol, "second factor")
    d1, d2 = v1.partition.total, v2.partition.total
    a = v1.a * v2.a
    B = np.hstack([v1.B, v1.a * v2.B])
    C = np.vstack([v2.a * v1.C, v2.C])
    D = np.block([[v1.D, v1.C @ v2.B],
                  [np.zeros((d2, d1)), v2.D]])
    v = Colligation(a, B, C, D,
                    SpacePartition(v1.partition.dims + v2.partition.dims))
    if verify:
        _verify(separated_residual(v, v1, v2), verify_tol, "product_fm")
    return v


def factor_fm(v, m, verify=False, tol=ISOMETRY_TOL, zero_tol=ZERO_TOL,
              verify_tol=VERIFY_TOL):
    """Split a separated-variable colligation into its two factors.

    With ``|beta|^2 = |a|^2 + C1* C1`` (``beta > 0``) and ``alpha = a/beta``::

        left  = [[alpha, B1], [C1/beta, D11]]    on H_1 .. H_m
        right = [[beta, B2/alpha], [C2, D22]]    on H_{m+1} .. H_n

    Raises
    ------
    ZeroConstantError
        If ``|a| <= zero_tol``.
    StructureError
        If the separated-variable pattern does not hold.
    """
    _require_isometric(v, tol)
    if abs(v.a) <= zero_tol:
        raise ZeroConstantError(
            f"|a| = {abs(v.a):.3e} is zero; use the zero-origin factorizations")
    report = structure.check_fm(v, m, tol)
    if not report.satisfied:
        raise StructureError(f"separated-variable pattern fails:\n{report.summary()}",
                             report)
    p = v.partition
    first, second = p.span(0, m), p.span(m, p.n)
    C1, C2 = v.C[first], v.C[second]
    beta_sq = abs(v.a) ** 2 + _gram(C1)
    gap = abs(beta_sq - (1.0 - _gram(C2)))
    if gap > VERIFY_TOL:
        warnings.warn(f"|beta|^2 normalizations disagree by {gap:.3e}",
                      RuntimeWarning, stacklevel=2)
    beta = np.sqrt(beta_sq) + 0j
    alpha = v.a / beta
    left = Colligation(alpha, v.B[:, first], C1 / beta, v.D[first, first],
                       SpacePartition(p.dims[:m]))
    right = Colligation(beta, v.B[:, second] / alpha, C2, v.D[second, second],
                        SpacePartition(p.dims[m:]))
    result = FactorizationResult(left, right, alpha, beta, normalization_gap=gap)
    if verify:
        result.residual = _verify(separated_residual(v, left, right),
                                  verify_tol, "factor_fm")
    return result


# --- same variables --------------------------------------------------------

def fn_embeddings(v1, v2):
    """The padded isometries whose product is ``product_fn(v1, v2)``.

    ``W1`` acts as ``v1`` on ``C (+) M`` and as the identity on every
    ``N_i``; ``W2`` acts as ``v2`` on ``C (+) N`` and as the identity on
    every ``M_i``.  Both use the interleaved ``(+)(M_i (+) N_i)`` order.
    """
    p = _fn_partition(v1, v2)
    N = p.total
    m_idx = np.concatenate([p.m_indices(i) for i in range(p.n)]).astype(int) + 1
    n_idx = np.concatenate([p.n_indices(i) for i in range(p.n)]).astype(int) + 1
    W1 = np.eye(N + 1, dtype=np.complex128)
    sel = np.r_[0, m_idx]
    W1[np.ix_(sel, sel)] = v1.matrix
    W2 = np.eye(N + 1, dtype=np.complex128)
    sel = np.r_[0, n_idx]
    W2[np.ix_(sel, sel)] = v2.matrix
    return W1, W2


def _fn_partition(v1, v2):
    if v1.n != v2.n:
        raise ArgumentError(
            f"factors must have the same number of variables ({v1.n} != {v2.n})")
    split = tuple(zip(v1.partition.dims, v2.partition.dims))
    return SpacePartition(tuple(m + k for m, k in split), split)


def product_fn(v1, v2, verify=False, tol=ISOMETRY_TOL, verify_tol=VERIFY_TOL):
    """Colligation realizing ``tau_v1(z) * tau_v2(z)`` on ``(+)(M_i (+) N_i)``.

    With ``v1 = [[alpha, B], [C, D]]`` on ``(+)M_i`` and
    ``v2 = [[beta, F], [G, H]]`` on ``(+)N_i`` the blocks are::

        B^_i = [B_i, alpha F_i],  C^_i = [beta C_i; G_i],
        D^_ij = [[D_ij, C_i F_j], [0, H_ij]]
    """
    p = _fn_partition(v1, v2)
    _require_isometric(v1, tol, "first factor")
    _require_isometric(v2, tol, "second factor")
    alpha, beta = v1.a, v2.a
    P = flip_permutation(p)
    d1, d2 = v1.partition.total, v2.partition.total
    # assemble in the flipped order (+)M (+) (+)N, then un-flip
    B_flip = np.hstack([v1.B, alpha * v2.B])
    C_flip = np.vstack([beta * v1.C, v2.C])
    D_flip = np.block([[v1.D, v1.C @ v2.B],
                       [np.zeros((d2, d1)), v2.D]])
    Pt = adjoint(P)
    v = Colligation(alpha * beta, B_flip @ P, Pt @ C_flip, Pt @ D_flip @ P, p)
    if verify:
        _verify(same_point_residual(v, v1, v2), verify_tol, "product_fn")
    return v


def factor_fn(v, verify=False, tol=ISOMETRY_TOL, zero_tol=ZERO_TOL,
              verify_tol=VERIFY_TOL):
    """Split a same-variable structured colligation into two factors.

    The state space is flipped to ``((+)M_i) (+) ((+)N_i)``, giving the
    arrowhead ``[[a, B(1), B(2)], [C(1), D(1), C(1)B(2)/a], [C(2), 0, D(2)]]``;
    then::

        left  = [[alpha, B(1)], [C(1)/beta, D(1)]]   on (+)M_i
        right = [[beta, B(2)/alpha], [C(2), D(2)]]   on (+)N_i

    with ``beta = sqrt(|a|^2 + C(1)* C(1)) > 0`` and ``alpha = a / beta``.
    """
    _require_isometric(v, tol)
    if abs(v.a) <= zero_tol:
        raise ZeroConstantError(
            f"|a| = {abs(v.a):.3e} is zero; use the zero-origin factorizations")
    report = structure.check_fn(v, tol)
    if not report.satisfied:
        raise StructureError(f"same-variable pattern fails:\n{report.summary()}",
                             report)
    p = v.partition
    inner = factor_fm(structure.flip(v), 1, verify=False, tol=tol,
                      zero_tol=zero_tol)
    left = inner.left.with_partition(SpacePartition(p.m_dims))
    right = inner.right.with_partition(SpacePartition(p.n_dims))
    result = FactorizationResult(left, right, inner.alpha, inner.beta,
                                 normalization_gap=inner.normalization_gap)
    if verify:
        result.residual = _verify(same_point_residual(v, left, right),
                                  verify_tol, "factor_fn")
    return result


# --- chains of one-variable factors ---------------------------------------

def product_chain(vs, verify=False, tol=ISOMETRY_TOL, verify_tol=VERIFY_TOL):
    """Colligation realizing ``prod_i tau_{vs[i]}(z_i)``.

    With ``vs[i] = [[a_i, B^_i], [C^_i, D^_i]]``::

        B_i = (a_1 ... a_{i-1}) B^_i,   C_i = (a_{i+1} ... a_n) C^_i,
        D_ii = D^_i,  D_ij = 0 (i > j),  D_ij = (a_{i+1} ... a_{j-1}) C^_i B^_j (i < j)
    """
    vs = list(vs)
    if not vs:
        raise ArgumentError("product_chain needs at least one factor")
    for k, f in enumerate(vs):
        if f.n != 1:
            raise ArgumentError(f"factor {k} has {f.n} variables; expected 1")
        _require_isometric(f, tol, f"factor {k}")
    consts = np.array([f.a for f in vs])
    dims = tuple(f.partition.total for f in vs)
    p = SpacePartition(dims)
    N = p.total
    B = np.zeros((1, N), dtype=np.complex128)
    C = np.zeros((N, 1), dtype=np.complex128)
    D = np.zeros((N, N), dtype=np.complex128)
    for i, fi in enumerate(vs):
        bi = p.block(i)
        B[:, bi] = np.prod(consts[:i]) * fi.B
        C[bi] = np.prod(consts[i + 1:]) * fi.C
        D[bi, bi] = fi.D
        for j in range(i + 1, len(vs)):
            D[bi, p.block(j)] = np.prod(consts[i + 1:j]) * (fi.C @ vs[j].B)
    v = Colligation(np.prod(consts), B, C, D, p)
    if verify:
        _verify(chain_residual(v, vs), verify_tol, "product_chain")
    return v


def factor_chain(v, verify=False, tol=ISOMETRY_TOL, zero_tol=ZERO_TOL,
                 verify_tol=1e-9):
    """Recover one-variable factors by peeling ``H_1, H_2, ...`` in turn."""
    _require_isometric(v, tol)
    report = structure.check_chain(v, zero_tol)
    if not report.satisfied:
        raise StructureError(f"chain pattern fails:\n{report.summary()}", report)
    if v.n == 1:
        return [v]
    factors = []
    rest = v
    while rest.n > 1:
        step = factor_fm(rest, 1, tol=tol, zero_tol=zero_tol)
        factors.append(step.left)
        rest = step.right
    factors.append(rest)
    if verify:
        _verify(chain_residual(v, factors), verify_tol, "factor_chain")
    return factors


# --- functions vanishing at the origin ------------------------------------

def factor_zero_origin_case1(v, verify=False, tol=ISOMETRY_TOL,
                             verify_tol=VERIFY_TOL):
    """Factor ``V = [[0, B1, 0], [C1, D1, D2], [C2, 0, D4]]`` with ``psi(0) != 0``.

    With ``x = sqrt(C1* C1) > 0``::

        left  = [[0, B1], [C1/x, D1]]            (vanishes at 0)
        right = [[x, C1* D2 / x], [C2, D4]]      (equals x at 0)

    The product identity holds both in separated variables and on the
    diagonal ``z_1 = z_2``.
    """
    _require_isometric(v, tol)
    report = structure.check_zero_origin_case1(v, tol)
    if not report.satisfied:
        raise StructureError(f"zero-origin case 1 fails:\n{report.summary()}",
                             report)
    p = v.partition
    h1, h2 = p.block(0), p.block(1)
    C1 = v.C[h1]
    x = np.sqrt(_gram(C1)) + 0j
    left = Colligation(0.0, v.B[:, h1], C1 / x, v.D[h1, h1],
                       SpacePartition(p.dims[:1]))
    right = Colligation(x, adjoint(C1) @ v.D[h1, h2] / np.conj(x), v.C[h2],
                        v.D[h2, h2], SpacePartition(p.dims[1:]))
    result = FactorizationResult(left, right, 0j, x)
    if verify:
        result.residual = _verify(separated_residual(v, left, right),
                                  verify_tol, "factor_zero_origin_case1")
    return result


def factor_zero_origin_case2(v, x=None, y=None, verify=False, tol=ISOMETRY_TOL,
                             verify_tol=VERIFY_TOL):
    """Factor ``V = [[0, B1, 0], [0, D1, D2], [C2, 0, D4]]`` with ``D2 = x y``.

    ``left = [[0, B1], [x, D1]]`` and ``right = [[0, y], [C2, D4]]``; both
    vanish at the origin.  Missing witnesses are recovered from ``D2``.
    """
    _require_isometric(v, tol)
    if x is None or y is None:
        x, y = structure.recover_case2_witness(v, tol)
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    report = structure.check_zero_origin_case2(v, x, y, tol)
    if not report.satisfied:
        raise StructureError(f"zero-origin case 2 fails:\n{report.summary()}",
                             report)
    p = v.partition
    h1, h2 = p.block(0), p.block(1)
    left = Colligation(0.0, v.B[:, h1], x, v.D[h1, h1], SpacePartition(p.dims[:1]))
    right = Colligation(0.0, y, v.C[h2], v.D[h2, h2], SpacePartition(p.dims[1:]))
    result = FactorizationResult(left, right, 0j, 0j)
    if verify:
        result.residual = _verify(separated_residual(v, left, right),
                                  verify_tol, "factor_zero_origin_case2")
    return result


def check_and_factor_zero_origin_nvar(v, case, witnesses=None, verify=False,
                                      tol=ISOMETRY_TOL, zero_tol=ZERO_TOL,
                                      verify_tol=VERIFY_TOL):
    """Zero-origin factorization in ``n`` variables over split blocks.

    The state space is flipped to ``((+)M_i) (+) ((+)N_i)``, the two-block
    check and factorization of the matching case are applied, and the
    factors are returned on the ``M`` and ``N`` partitions.  Both factors are
    ``n``-variable functions whose product is ``tau_v`` at every point.
    """
    if v.partition.split is None:
        raise ArgumentError("n-variable zero-origin factorization needs an M/N split")
    _require_isometric(v, tol)
    if abs(v.a) > zero_tol:
        raise ZeroConstantError(
            f"|a| = {abs(v.a):.3e} is not zero; use factor_fn instead")
    x, y = witnesses if witnesses is not None else (None, None)
    report = structure.check_zero_origin_nvar(v, case, x, y, tol)
    if not report.satisfied:
        raise StructureError(
            f"zero-origin case {case} fails:\n{report.summary()}", report)
    arrow = structure.flip(v)
    if case == 1:
        inner = factor_zero_origin_case1(arrow, tol=tol)
    else:
        inner = factor_zero_origin_case2(arrow, x, y, tol=tol)
    p = v.partition
    left = inner.left.with_partition(SpacePartition(p.m_dims))
    right = inner.right.with_partition(SpacePartition(p.n_dims))
    result = FactorizationResult(left, right, inner.alpha, inner.beta)
    if verify:
        result.residual = _verify(same_point_residual(v, left, right),
                                  verify_tol, "check_and_factor_zero_origin_nvar")
    return result


# --- embedding and reversibility ------------------------------------------

def embed_fm_into_fn(v, m, pad_dim, tol=ISOMETRY_TOL):
    """Re-express a separated-variable colligation in same-variable form.

    Each ``H_i`` is enlarged by a padding space ``L`` of dimension
    ``pad_dim``: ``K_i = H_i (+) L`` for ``i <= m`` and ``L (+) H_i`` after.
    The blocks of ``v`` keep acting on the ``H_i`` and ``L`` carries the
    identity on the diagonal.
    The split ``M_i = H_i, N_i = L`` (``i <= m``) and ``M_i = L, N_i = H_i``
    (``i > m``) makes the result satisfy the same-variable pattern with the
    same transfer function.
    """
    if pad_dim < 0:
        raise ArgumentError("pad_dim must be non-negative")
    report = structure.check_fm(v, m, tol)
    if not report.satisfied:
        raise StructureError(
            f"separated-variable pattern fails:\n{report.summary()}", report)
    p = v.partition
    L = int(pad_dim)
    split = tuple((d, L) if i < m else (L, d) for i, d in enumerate(p.dims))
    q = SpacePartition(tuple(d + L for d in p.dims), split)
    h_pos = []
    l_pos = []
    for i in range(p.n):
        start = q.offsets[i]
        d = p.dims[i]
        if i < m:
            h_pos.append(np.arange(start, start + d))
            l_pos.append(np.arange(start + d, start + d + L))
        else:
            l_pos.append(np.arange(start, start + L))
            h_pos.append(np.arange(start + L, start + L + d))
    h_pos = np.concatenate(h_pos).astype(int)
    l_pos = np.concatenate(l_pos).astype(int)
    N = q.total
    Y = np.zeros((1, N), dtype=np.complex128)
    Z = np.zeros((N, 1), dtype=np.complex128)
    W = np.zeros((N, N), dtype=np.complex128)
    Y[:, h_pos] = v.B
    Z[h_pos] = v.C
    W[np.ix_(h_pos, h_pos)] = v.D
    W[l_pos, l_pos] = 1.0
    return Colligation(v.a, Y, Z, W, q)


def kappa_pi_roundtrip(v1, v2, tol=ISOMETRY_TOL, zero_tol=ZERO_TOL):
    """Compare ``factor_fn(product_fn(v1, v2))`` with ``(v1, v2)``.

    The extraction can only recover the factors up to a unimodular ``eps``:
    the expected output is ``([[eps alpha, B], [eps C, D]],
    [[conj(eps) beta, conj(eps) F], [G, H]])``.

    Returns
    -------
    eps : complex
        ``alpha_tilde / alpha``.
    max_deviation : float
        Largest entrywise difference from the eps-adjusted pair.
    """
    alpha, beta = v1.a, v2.a
    if abs(alpha * beta) <= zero_tol:
        raise ZeroConstantError("kappa o pi needs alpha * beta != 0")
    result = factor_fn(product_fn(v1, v2, tol=tol), tol=tol, zero_tol=zero_tol)
    eps = result.left.a / alpha
    if abs(abs(eps) - 1.0) > 1e-12:
        raise VerificationError(f"|eps| = {abs(eps)!r} is not 1",
                                residual=abs(abs(eps) - 1.0))
    expect_left = v1.matrix
    expect_left[0, 0] *= eps
    expect_left[1:, :1] *= eps
    expect_right = v2.matrix
    expect_right[0, :] *= np.conj(eps)
    deviation = max(np.max(np.abs(result.left.matrix - expect_left), initial=0.0),
                    np.max(np.abs(result.right.matrix - expect_right), initial=0.0))
    return complex(eps), float(deviation)
