"""Path-integral planner and the cart-pole pretraining curriculum it drives.

The planner exists solely to generate demonstrations for three base policies
(one position shuttle and two cart-velocity targets) which are then cloned
into linear random-feature policies; the shuttle policy additionally yields
the reference Koopman operator used by the imitation experiments.
"""

from dataclasses import dataclass

import numpy as np

from ksnr import envs
from ksnr.features import FeatureMap, sample_rff
from ksnr.koopman import assemble_pairs, fit_koopman
from ksnr.policies import CARTPOLE_ACTION_BOUND, clone_policy

FALL_PENALTY = 100.0


@dataclass(frozen=True)
class MppiConfig:
    control_std: float
    temperature: float
    horizon: int
    samples: int
    action_low: float = -1.0
    action_high: float = 1.0

    def __post_init__(self):
        if min(self.control_std, self.temperature, self.horizon, self.samples) <= 0:
            raise ValueError("all planner parameters must be positive")


def mppi_plan(model_step, cost_fn, state, nominal, config: MppiConfig,
              rng: np.random.Generator):
    """One planning step: returns the action to apply and the shifted nominal.

    ``model_step(states, controls)`` advances a (samples, state_dim) batch one
    step under a (samples,) control column; ``cost_fn(states)`` scores the
    post-step states.  Sampled control sequences are weighted by
    ``exp(-(S_k - min S) / temperature)``, which is always well-defined.
    """
    nominal = np.asarray(nominal, dtype=np.float64)
    if nominal.shape != (config.horizon,):
        raise ValueError(f"nominal controls must have shape ({config.horizon},)")
    eps = rng.normal(0.0, config.control_std, size=(config.samples, config.horizon))
    controls = np.clip(nominal + eps, config.action_low, config.action_high)
    states = np.tile(np.asarray(state, dtype=np.float64), (config.samples, 1))
    total = np.zeros(config.samples)
    for h in range(config.horizon):
        states = model_step(states, controls[:, h])
        total += cost_fn(states)
    weights = np.exp(-(total - total.min()) / config.temperature)
    weights /= weights.sum()
    new_nominal = weights @ controls
    shifted = np.append(new_nominal[1:], new_nominal[-1])
    return float(new_nominal[0]), shifted


def _cartpole_model_step(states, controls):
    return envs.step_batch("cartpole", states, controls[:, None])


def _position_cost(target):
    def cost(states):
        fallen = np.cos(states[:, 2]) < 0.0
        return (states[:, 0] - target) ** 2 + FALL_PENALTY * fallen
    return cost


def _velocity_cost(target):
    def cost(states):
        fallen = np.cos(states[:, 2]) < 0.0
        return (states[:, 1] - target) ** 2 + FALL_PENALTY * fallen
    return cost


def run_mppi_controller(state, cost_fn, n_steps, config: MppiConfig,
                        rng: np.random.Generator):
    """Re-plan every step for ``n_steps`` real steps of the cart-pole.

    Returns the final state and the collected (observation, action) pairs.
    """
    state = np.asarray(state, dtype=np.float64)
    nominal = np.zeros(config.horizon)
    demos = []
    for _ in range(n_steps):
        action, nominal = mppi_plan(_cartpole_model_step, cost_fn, state,
                                    nominal, config, rng)
        demos.append((envs.cartpole_observe(state), np.array([action])))
        state = envs.cartpole_step(state, action)
    return state, demos


@dataclass(frozen=True)
class PretrainConfig:
    mppi_control_std: float = 0.4
    mppi_temperature: float = 0.1
    mppi_samples: int = 524
    iterations: int = 20
    policy_rff_dim: int = 2000
    policy_bandwidth: float = 1.5
    clone_ridge: float = 1.0
    phi_rff_dim: int = 56
    phi_bandwidth: float = 1.5
    fit_ridge: float = 1.0
    a_star_rollouts: int = 20
    a_star_horizon: int = 220
    seed: int = 0


@dataclass(frozen=True)
class PretrainResult:
    policies: tuple          # three cloned base policies
    a_star: np.ndarray       # Koopman matrix fitted on the first policy
    phi_map: FeatureMap
    demo_counts: tuple


# curriculum: (cost kind, target, controller steps, planning horizon);
# the two shuttle movements chain, the velocity movements restart fresh
_SHUTTLE = (("position", -0.3, 100, 100), ("position", 0.3, 120, 120))
_MOVEMENTS = {1: (("velocity", -1.5, 100, 100),),
              2: (("velocity", 1.5, 100, 100),)}


def pretrain_cartpole_policies(config: PretrainConfig,
                               rng: np.random.Generator) -> PretrainResult:
    """Run the three planner curricula, clone each into a policy, and fit the
    reference operator from rollouts of the first one."""
    demos = {0: [], 1: [], 2: []}
    for _ in range(config.iterations):
        state = envs.sample_init("cartpole", rng)
        for kind, target, steps, horizon in _SHUTTLE:
            cfg = MppiConfig(config.mppi_control_std, config.mppi_temperature,
                             horizon, config.mppi_samples)
            cost = _position_cost(target)
            state, pairs = run_mppi_controller(state, cost, steps, cfg, rng)
            demos[0].extend(pairs)
        for idx in (1, 2):
            state = envs.sample_init("cartpole", rng)
            for kind, target, steps, horizon in _MOVEMENTS[idx]:
                cfg = MppiConfig(config.mppi_control_std, config.mppi_temperature,
                                 horizon, config.mppi_samples)
                state, pairs = run_mppi_controller(state, _velocity_cost(target),
                                                   steps, cfg, rng)
                demos[idx].extend(pairs)

    bound = np.array([CARTPOLE_ACTION_BOUND])
    policies = []
    for idx in range(3):
        pmap = sample_rff(4, config.policy_rff_dim, config.policy_bandwidth,
                          False, seed=config.seed + 1000 + idx)
        policies.append(clone_policy(demos[idx], pmap, config.clone_ridge,
                                     -bound, bound))

    phi_map = sample_rff(4, config.phi_rff_dim, config.phi_bandwidth, True,
                         seed=config.seed + 2000)
    rollouts = [envs.rollout("cartpole", policies[0],
                             envs.sample_init("cartpole", rng),
                             config.a_star_horizon)
                for _ in range(config.a_star_rollouts)]
    a_star = fit_koopman(assemble_pairs(rollouts, phi_map), config.fit_ridge)
    return PretrainResult(tuple(policies), a_star, phi_map,
                          tuple(len(demos[i]) for i in range(3)))
