"""Parameterized policies: linear-in-random-features, mixtures of frozen base
policies, and behavior cloning for pretraining."""

from dataclasses import dataclass

import numpy as np

from ksnr import backend, envs
from ksnr.features import FeatureMap, featurize_batch
from ksnr.koopman import ridge_regression

LIMIT_CYCLE_ACTION_BOUND = 3.0
CARTPOLE_ACTION_BOUND = 1.0


@dataclass(frozen=True)
class RffPolicy:
    """Clipped linear policy on a frozen feature map; parameters are the
    row-major entries of W."""

    fmap: FeatureMap
    W: np.ndarray          # (action_dim, output_dim)
    low: np.ndarray        # (action_dim,)
    high: np.ndarray

    def act(self, obs: np.ndarray) -> np.ndarray:
        feats = featurize_batch(self.fmap, np.asarray(obs, dtype=np.float64)[None, :])
        return np.clip(self.W @ feats[0], self.low, self.high)

    @property
    def theta(self) -> np.ndarray:
        return self.W.ravel().copy()


@dataclass(frozen=True)
class MixturePolicy:
    """Weighted combination of frozen base policies, clipped once more after
    mixing."""

    bases: tuple
    weights: np.ndarray
    low: np.ndarray
    high: np.ndarray

    def act(self, obs: np.ndarray) -> np.ndarray:
        mixed = sum(w * base.act(obs) for w, base in zip(self.weights, self.bases))
        return np.clip(mixed, self.low, self.high)


@dataclass(frozen=True)
class RffPolicyFamily:
    """Search space of RffPolicy weight matrices over one shared feature map."""

    fmap: FeatureMap
    action_dim: int
    low: np.ndarray
    high: np.ndarray

    @property
    def param_dim(self) -> int:
        return self.action_dim * self.fmap.output_dim

    def make(self, theta: np.ndarray) -> RffPolicy:
        W = np.asarray(theta, dtype=np.float64).reshape(self.action_dim,
                                                        self.fmap.output_dim)
        return RffPolicy(self.fmap, W, self.low, self.high)

    def act_batch(self, thetas: np.ndarray, obs: np.ndarray) -> np.ndarray:
        W = thetas.reshape(-1, self.action_dim, self.fmap.output_dim)
        feats = featurize_batch(self.fmap, obs)
        acts = np.einsum("baf,bf->ba", W, feats)
        return np.clip(acts, self.low, self.high)

    def rollout_batch(self, env_kind: str, thetas: np.ndarray, x0: np.ndarray,
                      H: int):
        """Fused-kernel rollout of all candidate weight matrices at once."""
        W = np.ascontiguousarray(
            np.asarray(thetas, dtype=np.float64).reshape(
                -1, self.action_dim, self.fmap.output_dim))
        x0 = np.ascontiguousarray(x0, dtype=np.float64)
        fmap = self.fmap
        if env_kind == "limit_cycle":
            return backend.rollout_rff_limit_cycle(
                x0, W, fmap.frequencies, fmap.offsets, fmap.scale,
                fmap.linear_prefix, self.low, self.high, H, envs.LIMIT_CYCLE_DT)
        if env_kind == "cartpole":
            return backend.rollout_rff_cartpole(
                x0, W, fmap.frequencies, fmap.offsets, fmap.scale,
                fmap.linear_prefix, self.low, self.high, H,
                envs.CARTPOLE_FORCE_MAG, *envs.CARTPOLE_PARAMS)
        raise ValueError(f"unknown environment {env_kind!r}")


@dataclass(frozen=True)
class MixturePolicyFamily:
    """Search space of mixture weights over frozen base policies."""

    bases: tuple
    low: np.ndarray
    high: np.ndarray

    @property
    def param_dim(self) -> int:
        return len(self.bases)

    def make(self, theta: np.ndarray) -> MixturePolicy:
        return MixturePolicy(self.bases, np.asarray(theta, dtype=np.float64),
                             self.low, self.high)

    def act_batch(self, thetas: np.ndarray, obs: np.ndarray) -> np.ndarray:
        base_acts = np.stack([
            np.clip(featurize_batch(b.fmap, obs) @ b.W.T, b.low, b.high)
            for b in self.bases
        ])  # (n_bases, B, action_dim)
        mixed = np.einsum("bn,nba->ba", thetas, base_acts)
        return np.clip(mixed, self.low, self.high)

    def rollout_batch(self, env_kind: str, thetas: np.ndarray, x0: np.ndarray,
                      H: int):
        thetas = np.asarray(thetas, dtype=np.float64)
        return envs.rollout_batch_states(
            env_kind, lambda obs: self.act_batch(thetas, obs), x0, H,
            thetas.shape[0])


def clone_policy(demos, fmap: FeatureMap, ridge: float,
                 low: np.ndarray, high: np.ndarray) -> RffPolicy:
    """Ridge-regress demonstrated actions onto features of the observations.

    ``demos`` is a sequence of (observation, action) pairs.
    """
    if not demos:
        raise ValueError("no demonstration pairs given")
    obs = np.asarray([np.asarray(o, dtype=np.float64) for o, _ in demos])
    acts = np.asarray([np.atleast_1d(np.asarray(a, dtype=np.float64)) for _, a in demos])
    Z = featurize_batch(fmap, obs).T
    W = ridge_regression(acts.T, Z, ridge)
    return RffPolicy(fmap, W, np.asarray(low, dtype=np.float64),
                     np.asarray(high, dtype=np.float64))


def save_rff_policy(policy: RffPolicy, path) -> None:
    np.savez(path, W=policy.W, low=policy.low, high=policy.high,
             fmap_input_dim=policy.fmap.input_dim, fmap_rff_dim=policy.fmap.rff_dim,
             fmap_bandwidth=policy.fmap.bandwidth,
             fmap_linear_prefix=policy.fmap.linear_prefix,
             fmap_seed=policy.fmap.seed,
             fmap_frequencies=policy.fmap.frequencies,
             fmap_offsets=policy.fmap.offsets)


def load_rff_policy(path) -> RffPolicy:
    with np.load(path, allow_pickle=False) as data:
        fmap = FeatureMap(int(data["fmap_input_dim"]), int(data["fmap_rff_dim"]),
                          float(data["fmap_bandwidth"]),
                          bool(data["fmap_linear_prefix"]), int(data["fmap_seed"]),
                          data["fmap_frequencies"], data["fmap_offsets"])
        return RffPolicy(fmap, data["W"], data["low"], data["high"])
