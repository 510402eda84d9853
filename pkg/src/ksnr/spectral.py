"""Dense non-symmetric eigendecomposition and spectrum-derived functionals.

Conventions used across the package:

* eigenvalues are sorted by non-increasing modulus, ties broken by real part
  then imaginary part (descending), so output order is deterministic;
* the top mode is phase-normalized so that its largest-modulus entry is real
  and positive, and scaled to unit Euclidean norm.
"""

from dataclasses import dataclass

import numpy as np

RESIDUAL_RTOL = 1e-8
TOP_MODE_TIE_RTOL = 1e-9
EIGVEC_COND_LIMIT = 1e12


class EigenSolveError(RuntimeError):
    """The underlying eigenvalue iteration failed to converge."""


class DegenerateSpectrumError(RuntimeError):
    """The requested quantity is undefined for a (near-)tied spectrum."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Sorted eigenvalues with aligned right eigenvectors.

    ``right_eigenvectors[:, k]`` belongs to ``eigenvalues[k]``.  When the
    solver could not produce eigenvectors, ``is_complete`` is False and the
    vector matrix is absent.
    """

    eigenvalues: np.ndarray
    right_eigenvectors: np.ndarray | None
    is_complete: bool

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)


@dataclass(frozen=True)
class HolderConstants:
    """Smoothness constants of the spectral-radius cost.

    ``kappa`` estimates the conditioning of the similarity transform that
    diagonalizes the matrix; ``alpha = 1 / jordan_block_order_m`` and
    ``L = (1 + kappa) * d**2 * (1 + sqrt(d - 1))``.  ``reliable`` is False
    when the eigenvector matrix is numerically defective, in which case the
    block order was not estimated and is reported as 1.
    """

    kappa: float
    L: float
    alpha: float
    jordan_block_order_m: int
    reliable: bool = True


def _check_square(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _sort_order(values: np.ndarray) -> np.ndarray:
    # lexsort uses the last key as primary: modulus, then real, then imag.
    return np.lexsort((-values.imag, -values.real, -np.abs(values)))


def eigvals_sorted(A: np.ndarray) -> np.ndarray:
    """Eigenvalues only, in the package's deterministic order."""
    A = _check_square(A)
    try:
        vals = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError(
            f"eigenvalue iteration did not converge for a {A.shape[0]}x{A.shape[0]} "
            f"matrix with Frobenius norm {np.linalg.norm(A):.3e}"
        ) from exc
    return vals[_sort_order(vals)]


def eig_general(A: np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of a real square matrix.

    Raises :class:`EigenSolveError` when the QR iteration fails.  Falls back
    to an eigenvalue-only result (``is_complete=False``) if eigenvectors are
    unavailable for the given matrix.
    """
    A = _check_square(A)
    try:
        vals, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError:
        try:
            return EigenDecomposition(eigvals_sorted(A), None, False)
        except EigenSolveError:
            raise
    order = _sort_order(vals)
    return EigenDecomposition(vals[order], vecs[:, order], True)


def spectral_radius(A: np.ndarray) -> float:
    """Largest eigenvalue modulus."""
    return float(np.abs(eigvals_sorted(A)[0]))


def abs_eig_sum(A: np.ndarray) -> float:
    """Sum of eigenvalue moduli."""
    return float(np.abs(eigvals_sorted(A)).sum())


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Unit-norm copy of ``v`` whose largest-modulus entry is real positive."""
    v = np.asarray(v, dtype=np.complex128)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot phase-normalize the zero vector")
    v = v / norm
    k = int(np.argmax(np.abs(v)))
    phase = v[k] / abs(v[k])
    return v * np.conj(phase)


def top_mode(A: np.ndarray) -> np.ndarray:
    """Right eigenvector of the largest-modulus eigenvalue, canonicalized.

    Requires a strict modulus gap between the top two eigenvalues (relative
    tolerance ``TOP_MODE_TIE_RTOL``); otherwise the mode is not a continuous
    function of the matrix and :class:`DegenerateSpectrumError` is raised.
    """
    dec = eig_general(A)
    if not dec.is_complete:
        raise DegenerateSpectrumError("eigenvectors unavailable for this matrix")
    moduli = dec.moduli
    if len(moduli) > 1:
        gap = moduli[0] - moduli[1]
        if gap <= TOP_MODE_TIE_RTOL * max(moduli[0], np.finfo(float).tiny):
            raise DegenerateSpectrumError(
                f"top eigenvalue modulus {moduli[0]:.6e} is tied with the second "
                f"({moduli[1]:.6e}); the dominant mode is ill-defined"
            )
    return canonical_phase(dec.right_eigenvectors[:, 0])


def hs_distance_rows(A: np.ndarray, B: np.ndarray,
                     rows: tuple[int, int] | None = None) -> float:
    """Squared Hilbert-Schmidt norm of ``(A - B)`` restricted to ``rows``.

    ``rows`` is a half-open ``(start, stop)`` range of row indices; ``None``
    compares all rows.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    if rows is None:
        rows = (0, A.shape[0])
    start, stop = rows
    if not (0 <= start < stop <= A.shape[0]):
        raise ValueError(f"row range {rows} out of bounds for {A.shape[0]} rows")
    diff = A[start:stop] - B[start:stop]
    return float(np.sum(diff * diff))


def holder_constants(A: np.ndarray) -> HolderConstants:
    """Estimate the Hölder constants of the spectral-radius cost at ``A``.

    ``kappa`` is the 2-norm condition number of the right-eigenvector matrix,
    which upper-bounds the conditioning of the diagonalizing similarity when
    the matrix is diagonalizable.  A condition number above
    ``EIGVEC_COND_LIMIT`` (or a failed eigenvector computation) marks the
    result unreliable: the matrix is numerically defective and the largest
    Jordan block order cannot be estimated from the decomposition.
    """
    A = _check_square(A)
    d = A.shape[0]
    dec = eig_general(A)
    reliable = dec.is_complete
    kappa = np.inf
    if dec.is_complete:
        sv = np.linalg.svd(dec.right_eigenvectors, compute_uv=False)
        kappa = float(sv[0] / sv[-1]) if sv[-1] > 0.0 else np.inf
        if not np.isfinite(kappa) or kappa > EIGVEC_COND_LIMIT:
            reliable = False
    L = (1.0 + kappa) * d**2 * (1.0 + np.sqrt(d - 1.0))
    return HolderConstants(kappa=kappa, L=float(L), alpha=1.0,
                           jordan_block_order_m=1, reliable=reliable)
