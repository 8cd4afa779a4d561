"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` with exactly two
dimensions; zero-sized axes are allowed so that degenerate (zero-dimensional)
state spaces need no special casing upstream.
"""

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import DimensionError, SingularMatrixError

__all__ = [
    "as_cmatrix",
    "matmul",
    "adjoint",
    "solve",
    "haar_unitary",
    "frobenius_norm",
    "PIVOT_TOL",
]

#: Relative pivot threshold below which :func:`solve` declares singularity.
PIVOT_TOL = 1e-12


def as_cmatrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D ``complex128`` array.

    Scalars become ``(1, 1)`` arrays; 1-D input is rejected because its
    orientation is ambiguous.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def matmul(a, b):
    """Complex matrix product ``a @ b`` with a shape check."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def adjoint(a):
    """Conjugate transpose."""
    return np.conj(np.asarray(a, dtype=np.complex128)).T.copy()


def frobenius_norm(a):
    """Frobenius norm, ``sqrt(sum |a_ij|^2)``; 0 for empty matrices."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a))


def solve(a, b, pivot_tol=PIVOT_TOL):
    """Solve ``a @ x = b`` by LU factorization with partial pivoting.

    Parameters
    ----------
    a : (n, n) array_like
    b : (n, k) array_like
    pivot_tol : float
        The system is declared singular when the smallest pivot magnitude
        falls below ``pivot_tol`` times the largest.

    Returns
    -------
    x : (n, k) ndarray

    Raises
    ------
    DimensionError
        If ``a`` is not square or ``b`` has the wrong number of rows.
    SingularMatrixError
        If ``a`` is singular to working precision.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"coefficient matrix must be square, got {a.shape}")
    if b.ndim != 2 or b.shape[0] != a.shape[0]:
        raise DimensionError(
            f"right-hand side shape {b.shape} does not match {a.shape}")
    if a.shape[0] == 0:
        return np.zeros(b.shape, dtype=np.complex128)

    with warnings.catch_warnings():
        # exact singularity is reported below through the pivot test
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    largest = pivots.max()
    smallest = pivots.min()
    if largest == 0.0 or smallest < pivot_tol * largest:
        condition = np.inf if smallest == 0.0 else largest / smallest
        raise SingularMatrixError(
            f"matrix is singular to working precision "
            f"(pivot ratio {condition:.3g})", condition=condition)
    return lu_solve((lu, piv), b, check_finite=False)


def haar_unitary(dim, seed):
    """Haar-distributed random unitary of size ``dim``.

    A seeded complex Gaussian matrix is QR-factorized and the phases of
    ``diag(R)`` are moved into ``Q``, which makes the distribution exactly
    Haar rather than biased by the QR sign convention.
    """
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim))
         + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    phases = d / np.abs(d)
    return q * phases[np.newaxis, :]
