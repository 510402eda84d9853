"""Koopman matrix estimation by regularized least squares on feature pairs."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ksnr.features import FeatureMap, featurize_batch


class SingularSystemError(RuntimeError):
    """The unregularized normal equations are singular."""


@dataclass(frozen=True)
class TransitionMatrixPair:
    """Column-aligned predecessor/successor feature matrices, both (d, n)."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        if self.X.shape != self.Y.shape or self.X.ndim != 2:
            raise ValueError(f"misaligned pair matrices: {self.X.shape} vs {self.Y.shape}")
        if self.X.shape[1] < 1:
            raise ValueError("need at least one transition pair")

    @property
    def n(self) -> int:
        return self.X.shape[1]


def assemble_pairs(trajectories, fmap: FeatureMap) -> TransitionMatrixPair:
    """Featurize consecutive observation pairs, trajectory order then time order."""
    if not trajectories:
        raise ValueError("no trajectories given")
    xs, ys = [], []
    for traj in trajectories:
        obs = np.asarray(traj.observations, dtype=np.float64)
        if obs.shape[0] < 2:
            raise ValueError("every trajectory needs at least two observations")
        feats = featurize_batch(fmap, obs)
        xs.append(feats[:-1])
        ys.append(feats[1:])
    X = np.concatenate(xs, axis=0).T
    Y = np.concatenate(ys, axis=0).T
    return TransitionMatrixPair(np.ascontiguousarray(X), np.ascontiguousarray(Y))


def ridge_regression(Y: np.ndarray, X: np.ndarray, ridge: float) -> np.ndarray:
    """Solve ``A = Y X^T (X X^T + ridge I)^-1`` via a Cholesky factorization.

    ``X`` and ``Y`` hold one sample per column.  ``ridge`` must be positive,
    or zero with ``X X^T`` invertible.
    """
    if ridge < 0.0:
        raise ValueError("ridge must be nonnegative")
    d = X.shape[0]
    G = X @ X.T
    G[np.diag_indices(d)] += ridge
    try:
        factor = cho_factor(G, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "feature Gram matrix is singular; use a positive ridge"
        ) from exc
    return cho_solve(factor, X @ Y.T).T


def fit_koopman(pairs: TransitionMatrixPair, ridge: float = 1.0) -> np.ndarray:
    """Regularized least-squares Koopman estimate from transition pairs."""
    return ridge_regression(pairs.Y, pairs.X, ridge)


def save_matrix_csv(A: np.ndarray, path) -> None:
    """Row-major CSV export with a leading dimension header line."""
    A = np.asarray(A, dtype=np.float64)
    with open(path, "w") as fh:
        fh.write(f"# d_phi={A.shape[0]}\n")
        for row in A:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_matrix_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# d_phi="):
            raise ValueError(f"missing dimension header in {path}")
        d = int(header.split("=", 1)[1])
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    A = np.asarray(rows)
    if A.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix in {path}, got {A.shape}")
    return A
