"""Pure-numpy implementations of the hot kernels.

These are the reference semantics for the compiled core in ``_core.pyx``;
``ksnr.backend`` picks one implementation at import time.  All kernels take
C-contiguous float64 arrays and are pure functions of their inputs.

Kernel surface
--------------
rff_block(x, freqs, offsets, scale, linear_prefix)
    Batched random-feature transform, ``scale * cos(x @ freqs.T + offsets)``
    with an optional copy of the raw input in the leading columns.
limit_cycle_step(states, actions, dt)
    Batched Euler step of the polar integrator (radius floored at 0).
cartpole_step(states, forces, g, masscart, masspole, half_length, dt, rail)
    Batched semi-implicit Euler step of the frictionless cart-pole; the pole
    angle is wrapped to (-pi, pi] and the cart position clamped to the rail.
rollout_rff_limit_cycle / rollout_rff_cartpole
    Closed-loop rollouts of a batch of linear-in-random-features policies,
    one weight matrix per batch entry, shared feature map, clipped actions.
linear_rollout_obs(K, phi0, H, n_obs)
    Propagates phi' = K phi for a batch of matrices and records the first
    ``n_obs`` coordinates at steps 0..H-1.
"""

import numpy as np


def rff_block(x, freqs, offsets, scale, linear_prefix):
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if freqs.shape[0]:
        block = x @ freqs.T
        block += offsets
        np.cos(block, out=block)
        block *= scale
    else:
        block = np.empty((x.shape[0], 0))
    if linear_prefix:
        return np.concatenate([x, block], axis=1)
    return block


def limit_cycle_step(states, actions, dt):
    out = np.empty_like(states)
    out[:, 0] = np.maximum(states[:, 0] + actions[:, 0] * dt, 0.0)
    out[:, 1] = states[:, 1] + actions[:, 1] * dt
    return out


def _wrap_angle(theta):
    return np.pi - (np.pi - theta) % (2.0 * np.pi)


def cartpole_step(states, forces, g, masscart, masspole, half_length, dt, rail):
    p, v, th, om = states[:, 0], states[:, 1], states[:, 2], states[:, 3]
    total_mass = masscart + masspole
    pml = masspole * half_length
    sin_th = np.sin(th)
    cos_th = np.cos(th)
    temp = (forces + pml * om * om * sin_th) / total_mass
    th_acc = (g * sin_th - cos_th * temp) / (
        half_length * (4.0 / 3.0 - masspole * cos_th * cos_th / total_mass)
    )
    x_acc = temp - pml * th_acc * cos_th / total_mass
    out = np.empty_like(states)
    out[:, 1] = v + dt * x_acc
    out[:, 0] = np.clip(p + dt * out[:, 1], -rail, rail)
    out[:, 3] = om + dt * th_acc
    out[:, 2] = _wrap_angle(th + dt * out[:, 3])
    return out


def _policy_actions(obs, W, freqs, offsets, scale, linear_prefix, lo, hi):
    feats = rff_block(obs, freqs, offsets, scale, linear_prefix)
    acts = np.einsum("baf,bf->ba", W, feats)
    np.clip(acts, lo, hi, out=acts)
    return acts


def rollout_rff_limit_cycle(x0, W, freqs, offsets, scale, linear_prefix,
                            lo, hi, H, dt):
    B = W.shape[0]
    states = np.empty((B, H + 1, 2))
    actions = np.empty((B, H, 2))
    s = np.tile(np.asarray(x0, dtype=np.float64), (B, 1))
    states[:, 0] = s
    for h in range(H):
        obs = np.stack([s[:, 0], np.cos(s[:, 1]), np.sin(s[:, 1])], axis=1)
        a = _policy_actions(obs, W, freqs, offsets, scale, linear_prefix, lo, hi)
        actions[:, h] = a
        s = limit_cycle_step(s, a, dt)
        states[:, h + 1] = s
    return states, actions


def rollout_rff_cartpole(x0, W, freqs, offsets, scale, linear_prefix,
                         lo, hi, H, force_mag, g, masscart, masspole,
                         half_length, dt, rail):
    B = W.shape[0]
    states = np.empty((B, H + 1, 4))
    actions = np.empty((B, H, 1))
    s = np.tile(np.asarray(x0, dtype=np.float64), (B, 1))
    states[:, 0] = s
    for h in range(H):
        a = _policy_actions(s, W, freqs, offsets, scale, linear_prefix, lo, hi)
        actions[:, h] = a
        s = cartpole_step(s, force_mag * a[:, 0], g, masscart, masspole,
                          half_length, dt, rail)
        states[:, h + 1] = s
    return states, actions


def linear_rollout_obs(K, phi0, H, n_obs):
    B, d = K.shape[0], K.shape[1]
    out = np.empty((B, H, n_obs))
    phi = np.tile(np.asarray(phi0, dtype=np.float64), (B, 1))
    for h in range(H):
        out[:, h] = phi[:, :n_obs]
        if h + 1 < H:
            phi = np.einsum("bij,bj->bi", K, phi)
    return out
