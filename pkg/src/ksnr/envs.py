"""Deterministic discrete-time environments: polar limit-cycle integrator and
an analytic cart-pole on an extended rail.

Both expose pure step functions (state in, state out); rollouts evaluate the
step cost on pre-step observations, so a horizon-H trajectory carries H+1
states and H actions/costs.
"""

from dataclasses import dataclass

import numpy as np

from ksnr import backend
from ksnr.costs import StepCostSpec, eval_step_cost_batch

LIMIT_CYCLE_DT = 0.05

CARTPOLE_GRAVITY = 9.8
CARTPOLE_MASSCART = 1.0
CARTPOLE_MASSPOLE = 0.1
CARTPOLE_HALF_LENGTH = 0.5
CARTPOLE_FORCE_MAG = 10.0
CARTPOLE_DT = 0.02
CARTPOLE_RAIL = 100.0

CARTPOLE_PARAMS = (CARTPOLE_GRAVITY, CARTPOLE_MASSCART, CARTPOLE_MASSPOLE,
                   CARTPOLE_HALF_LENGTH, CARTPOLE_DT, CARTPOLE_RAIL)

ENV_DIMS = {
    # env_kind: (state_dim, obs_dim, action_dim)
    "limit_cycle": (2, 3, 2),
    "cartpole": (4, 4, 1),
}


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray        # (H+1, state_dim)
    observations: np.ndarray  # (H+1, obs_dim)
    actions: np.ndarray       # (H, action_dim)
    step_costs: np.ndarray    # (H,)

    def __post_init__(self):
        H = self.actions.shape[0]
        if self.states.shape[0] != H + 1 or self.observations.shape[0] != H + 1 \
                or self.step_costs.shape[0] != H:
            raise ValueError("misaligned trajectory arrays")

    @property
    def horizon(self) -> int:
        return self.actions.shape[0]

    @property
    def cumulative_cost(self) -> float:
        return float(self.step_costs.sum())


def limit_cycle_step(state: np.ndarray, action: np.ndarray) -> np.ndarray:
    """Euler update with the radius floored at zero."""
    s = np.asarray(state, dtype=np.float64)[None, :]
    a = np.asarray(action, dtype=np.float64)[None, :]
    return backend.limit_cycle_step(np.ascontiguousarray(s),
                                    np.ascontiguousarray(a), LIMIT_CYCLE_DT)[0]


def limit_cycle_observe(state: np.ndarray) -> np.ndarray:
    r, theta = state
    return np.array([r, np.cos(theta), np.sin(theta)])


def cartpole_step(state: np.ndarray, action: float) -> np.ndarray:
    """Semi-implicit Euler step of the frictionless cart-pole.

    The scalar action is clamped to [-1, 1] and scaled by the force
    magnitude; the pole angle is wrapped to (-pi, pi] and the cart position
    clamped to the rail.
    """
    a = min(max(float(np.asarray(action).reshape(())), -1.0), 1.0)
    s = np.ascontiguousarray(np.asarray(state, dtype=np.float64)[None, :])
    force = np.array([CARTPOLE_FORCE_MAG * a])
    return backend.cartpole_step(s, force, *CARTPOLE_PARAMS)[0]


def cartpole_observe(state: np.ndarray) -> np.ndarray:
    return np.asarray(state, dtype=np.float64).copy()


def observe(env_kind, state: np.ndarray) -> np.ndarray:
    if env_kind == "limit_cycle":
        return limit_cycle_observe(state)
    if env_kind == "cartpole":
        return cartpole_observe(state)
    if not isinstance(env_kind, str):
        # custom dynamics object implementing step/observe and the dim fields
        return env_kind.observe(state)
    raise ValueError(f"unknown environment {env_kind!r}")


def observe_batch(env_kind: str, states: np.ndarray) -> np.ndarray:
    """Observations over the leading axes of a stack of states."""
    states = np.asarray(states, dtype=np.float64)
    if env_kind == "limit_cycle":
        return np.stack([states[..., 0], np.cos(states[..., 1]),
                         np.sin(states[..., 1])], axis=-1)
    if env_kind == "cartpole":
        return states.copy()
    raise ValueError(f"unknown environment {env_kind!r}")


def step_batch(env_kind: str, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
    states = np.ascontiguousarray(states, dtype=np.float64)
    actions = np.ascontiguousarray(actions, dtype=np.float64)
    if env_kind == "limit_cycle":
        return backend.limit_cycle_step(states, actions, LIMIT_CYCLE_DT)
    if env_kind == "cartpole":
        forces = CARTPOLE_FORCE_MAG * np.clip(actions[:, 0], -1.0, 1.0)
        return backend.cartpole_step(states, np.ascontiguousarray(forces),
                                     *CARTPOLE_PARAMS)
    raise ValueError(f"unknown environment {env_kind!r}")


def sample_init(env_kind: str, rng: np.random.Generator) -> np.ndarray:
    """Random initial state; limit cycle spreads the radius around 1, the
    cart-pole starts near upright rest."""
    if env_kind == "limit_cycle":
        return np.array([rng.uniform(0.2, 1.8), rng.uniform(0.0, 2.0 * np.pi)])
    if env_kind == "cartpole":
        return rng.uniform(-0.05, 0.05, size=4)
    raise ValueError(f"unknown environment {env_kind!r}")


def rollout(env_kind, policy, x0: np.ndarray, H: int,
            step_cost: StepCostSpec | None = None) -> Trajectory:
    """Act-then-step for H steps; costs are evaluated on pre-step observations."""
    if H < 0:
        raise ValueError("horizon must be nonnegative")
    if isinstance(env_kind, str):
        state_dim, obs_dim, action_dim = ENV_DIMS[env_kind]
    else:
        state_dim, obs_dim, action_dim = (env_kind.state_dim, env_kind.obs_dim,
                                          env_kind.action_dim)
    states = np.empty((H + 1, state_dim))
    observations = np.empty((H + 1, obs_dim))
    actions = np.empty((H, action_dim))
    state = np.asarray(x0, dtype=np.float64)
    states[0] = state
    observations[0] = observe(env_kind, state)
    for h in range(H):
        action = np.atleast_1d(np.asarray(policy.act(observations[h]), dtype=np.float64))
        actions[h] = action
        if env_kind == "limit_cycle":
            state = limit_cycle_step(state, action)
        elif env_kind == "cartpole":
            state = cartpole_step(state, action[0])
        else:
            state = np.asarray(env_kind.step(state, action), dtype=np.float64)
        states[h + 1] = state
        observations[h + 1] = observe(env_kind, state)
    spec = step_cost if step_cost is not None else StepCostSpec("none")
    step_costs = eval_step_cost_batch(spec, observations[:-1]) if H else np.zeros(0)
    return Trajectory(states, observations, actions, step_costs)


def rollout_batch_states(env_kind: str, act_batch_fn, x0: np.ndarray, H: int,
                         batch_size: int):
    """Closed-loop rollout of ``batch_size`` policies from a shared state.

    ``act_batch_fn(obs)`` maps a (B, obs_dim) array to (B, action_dim)
    actions.  Returns states (B, H+1, state_dim) and actions (B, H,
    action_dim).
    """
    state_dim, _, action_dim = ENV_DIMS[env_kind]
    states = np.empty((batch_size, H + 1, state_dim))
    actions = np.empty((batch_size, H, action_dim))
    s = np.tile(np.asarray(x0, dtype=np.float64), (batch_size, 1))
    states[:, 0] = s
    for h in range(H):
        obs = observe_batch(env_kind, s)
        a = act_batch_fn(obs)
        actions[:, h] = a
        s = step_batch(env_kind, s, a)
        states[:, h + 1] = s
    return states, actions


def trajectory_rows(traj: Trajectory, rollout_id: int = 0):
    """CSV rows (rollout, t, state..., action..., cost); the final state row
    carries empty action/cost fields."""
    rows = []
    H = traj.horizon
    for t in range(H + 1):
        row = [rollout_id, t, *traj.states[t]]
        if t < H:
            row.extend(traj.actions[t])
            row.append(traj.step_costs[t])
        else:
            row.extend([""] * (traj.actions.shape[1] + 1))
        rows.append(row)
    return rows
