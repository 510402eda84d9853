"""Random Fourier feature maps for observations and for policy parameters.

A map draws frequencies from ``Normal(0, bandwidth**-2)`` and offsets from
``Uniform[0, 2*pi)`` once at construction and is immutable afterwards; the
single-cosine-with-offset variant is used, so each random coordinate is
``sqrt(2/D) * cos(w.x + b)``.  With ``linear_prefix`` the raw input vector is
copied in front of the random block.
"""

from dataclasses import dataclass

import numpy as np

from ksnr import backend

RFF_VARIANT = "cos-offset"


@dataclass(frozen=True)
class FeatureMap:
    input_dim: int
    rff_dim: int
    bandwidth: float
    linear_prefix: bool
    seed: int
    frequencies: np.ndarray  # (rff_dim, input_dim)
    offsets: np.ndarray      # (rff_dim,)

    @property
    def output_dim(self) -> int:
        return self.rff_dim + (self.input_dim if self.linear_prefix else 0)

    @property
    def scale(self) -> float:
        return np.sqrt(2.0 / self.rff_dim) if self.rff_dim else 0.0


def sample_rff(input_dim: int, rff_dim: int, bandwidth: float,
               linear_prefix: bool, seed: int) -> FeatureMap:
    """Draw a feature map; deterministic for a fixed seed."""
    if input_dim < 1:
        raise ValueError("input_dim must be positive")
    if rff_dim < 0:
        raise ValueError("rff_dim must be nonnegative")
    if not bandwidth > 0.0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    rng = np.random.default_rng(seed)
    freqs = rng.normal(0.0, 1.0 / bandwidth, size=(rff_dim, input_dim))
    offsets = rng.uniform(0.0, 2.0 * np.pi, size=rff_dim)
    return FeatureMap(input_dim, rff_dim, float(bandwidth), bool(linear_prefix),
                      int(seed), freqs, offsets)


def featurize(fmap: FeatureMap, x: np.ndarray) -> np.ndarray:
    """Feature vector of a single input."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (fmap.input_dim,):
        raise ValueError(f"expected input of shape ({fmap.input_dim},), got {x.shape}")
    return backend.rff_block(x[None, :], fmap.frequencies, fmap.offsets,
                             fmap.scale, fmap.linear_prefix)[0]


def featurize_batch(fmap: FeatureMap, X: np.ndarray) -> np.ndarray:
    """Feature vectors of a batch of inputs, shape (n, output_dim)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != fmap.input_dim:
        raise ValueError(f"expected inputs of shape (n, {fmap.input_dim}), got {X.shape}")
    return backend.rff_block(X, fmap.frequencies, fmap.offsets,
                             fmap.scale, fmap.linear_prefix)


def kron_feature(phi: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Kronecker product feature: entry ``i*len(zeta)+j`` is ``phi[i]*zeta[j]``."""
    return np.kron(np.asarray(phi, dtype=np.float64),
                   np.asarray(zeta, dtype=np.float64))


def kron_feature_rows(Phi: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Row-wise Kronecker features for a batch of phi vectors, shape (n, d*dz)."""
    Phi = np.asarray(Phi, dtype=np.float64)
    zeta = np.asarray(zeta, dtype=np.float64)
    return (Phi[:, :, None] * zeta[None, None, :]).reshape(Phi.shape[0], -1)


def save_feature_map(fmap: FeatureMap, path) -> None:
    np.savez(path,
             input_dim=fmap.input_dim, rff_dim=fmap.rff_dim,
             bandwidth=fmap.bandwidth, linear_prefix=fmap.linear_prefix,
             seed=fmap.seed, frequencies=fmap.frequencies,
             offsets=fmap.offsets, variant=RFF_VARIANT)


def load_feature_map(path) -> FeatureMap:
    with np.load(path, allow_pickle=False) as data:
        variant = str(data["variant"])
        if variant != RFF_VARIANT:
            raise ValueError(f"unsupported feature variant {variant!r}")
        return FeatureMap(int(data["input_dim"]), int(data["rff_dim"]),
                          float(data["bandwidth"]), bool(data["linear_prefix"]),
                          int(data["seed"]), data["frequencies"], data["offsets"])
