"""Cross-entropy search over flat parameter vectors, and the combined
spectrum-plus-cumulative objective it optimizes."""

import logging
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from ksnr import envs
from ksnr.costs import SpectrumCostSpec, StepCostSpec, eval_spectrum_cost, \
    eval_step_cost_batch
from ksnr.koopman import SingularSystemError, TransitionMatrixPair, fit_koopman
from ksnr.features import FeatureMap, featurize_batch
from ksnr.spectral import DegenerateSpectrumError, EigenSolveError

log = logging.getLogger(__name__)


class CemFailure(RuntimeError):
    """Every candidate of an iteration evaluated to a non-finite objective."""


@dataclass(frozen=True)
class CemConfig:
    samples: int
    elite_size: int
    iterations: int
    init_mean: np.ndarray
    init_std: np.ndarray
    std_floor: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.elite_size <= self.samples):
            raise ValueError("need 0 < elite_size <= samples")
        if self.iterations < 1:
            raise ValueError("need at least one iteration")


@dataclass(frozen=True)
class CemIteration:
    iteration: int
    best_value: float        # best over all candidates evaluated so far
    elite_mean_value: float
    std_norm: float
    mean: np.ndarray
    std: np.ndarray


@dataclass(frozen=True)
class CemResult:
    best_theta: np.ndarray
    best_value: float
    history: tuple


def cem_optimize(objective, config: CemConfig) -> CemResult:
    """Diagonal-Gaussian cross-entropy minimization.

    ``objective(thetas, iteration)`` evaluates a (samples, dim) batch of
    candidates and returns their objective values; non-finite values exclude
    a candidate from the elite set.  Returns the best candidate ever
    evaluated, never a refit mean.
    """
    rng = np.random.default_rng(config.seed)
    mean = np.array(config.init_mean, dtype=np.float64)
    std = np.array(config.init_std, dtype=np.float64)
    dim = mean.shape[0]
    best_theta = None
    best_value = np.inf
    history = []
    for it in range(config.iterations):
        thetas = mean + std * rng.standard_normal((config.samples, dim))
        values = np.asarray(objective(thetas, it), dtype=np.float64)
        finite = np.isfinite(values)
        if not finite.any():
            raise CemFailure(f"all {config.samples} candidates were non-finite "
                             f"at iteration {it}")
        idx = np.flatnonzero(finite)
        order = idx[np.argsort(values[idx], kind="stable")]
        elite = order[:min(config.elite_size, len(order))]
        if values[order[0]] < best_value:
            best_value = float(values[order[0]])
            best_theta = thetas[order[0]].copy()
        mean = thetas[elite].mean(axis=0)
        std = np.maximum(thetas[elite].std(axis=0), config.std_floor)
        history.append(CemIteration(it, best_value,
                                    float(values[elite].mean()),
                                    float(np.linalg.norm(std)),
                                    mean.copy(), std.copy()))
    return CemResult(best_theta, best_value, tuple(history))


@dataclass(frozen=True)
class KsnrObjectiveSpec:
    """Pure objective: roll out a policy, fit its Koopman matrix, score the
    spectrum, and add cumulative step costs.

    One initial state is drawn per iteration (derived from ``seed`` and the
    iteration index) and shared across all candidates, so comparisons within
    an iteration are paired.
    """

    env_kind: str
    family: object                 # policy family with rollout_batch/make
    phi_map: FeatureMap
    spectrum_spec: SpectrumCostSpec
    step_cost: StepCostSpec
    horizon: int
    ridge: float = 1.0
    seed: int = 0
    shared_init: bool = True
    theta_penalty: object = None   # optional callable (B, dim) -> (B,)
    init_sampler: object = None    # optional callable rng -> state


def _iteration_init(spec: KsnrObjectiveSpec, iteration: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, iteration]))
    if spec.init_sampler is not None:
        return spec.init_sampler(rng)
    return envs.sample_init(spec.env_kind, rng)


def _spectrum_of_feats(spec: KsnrObjectiveSpec, feats: np.ndarray):
    """Fitted matrix and spectrum cost for one candidate's feature sequence."""
    pairs = TransitionMatrixPair(np.ascontiguousarray(feats[:-1].T),
                                 np.ascontiguousarray(feats[1:].T))
    A = fit_koopman(pairs, spec.ridge)
    return A, eval_spectrum_cost(spec.spectrum_spec, A)


def ksnr_objective(spec: KsnrObjectiveSpec, thetas: np.ndarray,
                   iteration: int) -> np.ndarray:
    """Batched objective values; per-candidate numerical failures become +inf."""
    thetas = np.asarray(thetas, dtype=np.float64)
    x0 = _iteration_init(spec, iteration)
    states, _ = spec.family.rollout_batch(spec.env_kind, thetas, x0, spec.horizon)
    B = states.shape[0]
    obs = envs.observe_batch(spec.env_kind, states)
    flat = featurize_batch(spec.phi_map, obs.reshape(-1, obs.shape[-1]))
    feats = flat.reshape(B, spec.horizon + 1, -1)
    cumulative = eval_step_cost_batch(spec.step_cost, obs[:, :-1]).sum(axis=1)
    values = np.empty(B)
    # BLAS threading only hurts at these matrix sizes (thread sync dwarfs
    # the per-candidate factorizations)
    with threadpool_limits(limits=1):
        for b in range(B):
            try:
                _, spectrum = _spectrum_of_feats(spec, feats[b])
            except (EigenSolveError, DegenerateSpectrumError, SingularSystemError) as exc:
                log.warning("candidate %d failed at iteration %d: %s", b, iteration, exc)
                values[b] = np.inf
                continue
            values[b] = spectrum + cumulative[b]
    if spec.theta_penalty is not None:
        values = values + spec.theta_penalty(thetas)
    return values


def ksnr_evaluate(spec: KsnrObjectiveSpec, theta: np.ndarray, x0: np.ndarray):
    """Detailed single-candidate evaluation from a given initial state.

    Returns the trajectory, the fitted matrix, and both objective parts.
    """
    policy = spec.family.make(np.asarray(theta, dtype=np.float64))
    traj = envs.rollout(spec.env_kind, policy, x0, spec.horizon, spec.step_cost)
    feats = featurize_batch(spec.phi_map, traj.observations)
    A, spectrum = _spectrum_of_feats(spec, feats)
    return {
        "trajectory": traj,
        "koopman": A,
        "spectrum_cost": spectrum,
        "cumulative_cost": traj.cumulative_cost,
        "objective": spectrum + traj.cumulative_cost,
    }


def make_objective(spec: KsnrObjectiveSpec):
    """Adapter for :func:`cem_optimize`."""
    return lambda thetas, iteration: ksnr_objective(spec, thetas, iteration)
