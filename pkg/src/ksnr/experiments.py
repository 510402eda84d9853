"""Experiment drivers: the desk-scale studies behind the CLI.

Every run writes its resolved configuration (with seed, scale, backend, and
package version) next to its artifacts; reruns with the same configuration
and seed are byte-identical.
"""

import copy
import logging
from pathlib import Path

import numpy as np

import ksnr
from ksnr import envs, kslc3, mppi, plots
from ksnr.backend import BACKEND
from ksnr.cem import CemConfig, KsnrObjectiveSpec, cem_optimize, ksnr_evaluate, \
    make_objective
from ksnr.costs import SpectrumCostSpec, SpectrumTerm, StepCostSpec
from ksnr.features import sample_rff, save_feature_map, load_feature_map
from ksnr.koopman import assemble_pairs, fit_koopman, load_matrix_csv, \
    save_matrix_csv
from ksnr.output import write_csv, write_json
from ksnr.policies import MixturePolicyFamily, RffPolicyFamily, load_rff_policy, \
    save_rff_policy
from ksnr.spectral import spectral_radius, top_mode

log = logging.getLogger(__name__)

EXPERIMENTS = ("limit-cycle-target-train", "limit-cycle-imitate",
               "cartpole-stable", "pretrain-cartpole", "kslc3-cartpole")

# paper-profile defaults; the desk profile halves sample counts and
# iteration/episode counts for workstation runs
DEFAULTS = {
    "limit-cycle-target-train": {
        "train_iterations": 500,
        "horizon": 80,
        "phi_rff_dim": 80,
        "phi_bandwidth": 3.0,
        "phi_seed": 7001,
        "ridge": 1.0,
    },
    "limit-cycle-imitate": {
        "target_dir": None,        # directory of a target-train run, or None
        "target_train": {
            "train_iterations": 500,
            "horizon": 80,
            "phi_rff_dim": 80,
            "phi_bandwidth": 3.0,
            "phi_seed": 7001,
            "ridge": 1.0,
        },
        "imitation": "mode_l1",    # or "hs_imitation"
        "cem": {"samples": 200, "elite_size": 20, "iterations": 50, "std_floor": 1e-3},
        "policy_rff_dim": 50,
        "policy_bandwidth": 2.0,
        "policy_seed": 7002,
        "horizon": 80,
        "ridge": 1.0,
        "eval_rollouts": 5,
    },
    "cartpole-stable": {
        "cem": {"samples": 200, "elite_size": 20, "iterations": 100, "std_floor": 1e-3},
        "phi_rff_dim": 46,         # plus the 4 linear state coordinates
        "phi_bandwidth": 2.0,
        "phi_seed": 7003,
        "policy_rff_dim": 100,
        "policy_bandwidth": 2.0,
        "policy_seed": 7004,
        "horizon": 100,
        "ridge": 1.0,
        "spectrum_weight": 1e4,
        "reward_scale": 1e-3,
        "eval_rollouts": 4,
    },
    "pretrain-cartpole": {
        "mppi_control_std": 0.4,
        "mppi_temperature": 0.1,
        "mppi_samples": 524,
        "curriculum_iterations": 20,
        "policy_rff_dim": 2000,
        "policy_bandwidth": 1.5,
        "clone_ridge": 1.0,
        "phi_rff_dim": 56,
        "phi_bandwidth": 1.5,
        "fit_ridge": 1.0,
        "a_star_rollouts": 20,
        "a_star_horizon": 220,
        "eval_horizon": 500,
    },
    "kslc3-cartpole": {
        "pretrain_dir": None,      # directory of a pretrain-cartpole run, or None
        "pretrain": None,          # inline pretrain overrides when training here
        "episodes": 40,
        "episode_horizon": 500,
        "cem": {"samples": 200, "elite_size": 20, "iterations": 50, "std_floor": 1e-3},
        "d_zeta": 50,
        "zeta_bandwidth": 5.0,
        "zeta_seed": 7005,
        "lambda": 1.0,
        "iota": 1e-4,
        "sigma2": 1e-4,
        "ridge": 1.0,
        "abs_eig_weight": 0.01,
        "step_cost_scale": 1e-4,
        "step_cost_target": 1.5,
        "fall_penalty": 100.0,
        "theta_penalty_weight": 100.0,
        "theta_penalty_limit": 2.0,
        "baseline_seed": 424242,   # task property, shared across learner seeds
    },
}

_HALVED_KEYS = ("train_iterations", "iterations", "samples", "episodes",
                "mppi_samples", "a_star_rollouts")


def _halve(node):
    if isinstance(node, dict):
        out = {}
        for key, value in node.items():
            if key in _HALVED_KEYS and isinstance(value, int):
                out[key] = max(1, value // 2)
            else:
                out[key] = _halve(value)
        return out
    return node


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if key not in out:
            raise ValueError(f"unknown config key {key!r}")
        if isinstance(value, dict) and isinstance(out[key], dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def resolve_config(name: str, overrides=None, scale: str = "desk"):
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")
    if scale not in ("desk", "paper"):
        raise ValueError(f"scale must be 'desk' or 'paper', got {scale!r}")
    cfg = copy.deepcopy(DEFAULTS[name])
    if scale == "desk":
        cfg = _halve(cfg)
    return _merge(cfg, overrides)


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, tag]))


def _cem_config(node, dim, seed: int) -> CemConfig:
    return CemConfig(samples=node["samples"], elite_size=node["elite_size"],
                     iterations=node["iterations"], init_mean=np.zeros(dim),
                     init_std=np.ones(dim), std_floor=node["std_floor"],
                     seed=seed)


def _write_resolved(out_dir: Path, name, cfg, seed, scale):
    write_json(out_dir / "resolved_config.json", {
        "experiment": name, "config": cfg, "seed": seed, "scale": scale,
        "artifact_version": ksnr.__version__, "kernel_backend": BACKEND,
    })


def _write_cem_history(out_dir: Path, history):
    write_csv(out_dir / "cem_history.csv",
              ["iteration", "best", "elite_mean", "std_norm"],
              [[rec.iteration, rec.best_value, rec.elite_mean_value,
                rec.std_norm] for rec in history])


def _write_trajectories(out_dir: Path, trajectories, state_names, action_names):
    header = ["rollout", "t", *state_names, *action_names, "cost"]
    rows = []
    for i, traj in enumerate(trajectories):
        rows.extend(envs.trajectory_rows(traj, rollout_id=i))
    write_csv(out_dir / "trajectories.csv", header, rows)


def _write_metrics(out_dir: Path, metrics: dict):
    write_csv(out_dir / "metrics.csv", ["metric", "value"],
              sorted(metrics.items()))


class _GroundTruthLimitCycle:
    """Exact field of the reference oscillator, read off the observation."""

    def act(self, obs):
        r = obs[0]
        return np.array([r * (1.0 - r * r), 1.0])


def _train_target(config, seed: int):
    phi_map = sample_rff(3, config["phi_rff_dim"], config["phi_bandwidth"],
                         False, seed=config["phi_seed"])
    rng = _rng(seed, 1)
    policy = _GroundTruthLimitCycle()
    trajectories = [
        envs.rollout("limit_cycle", policy,
                     envs.sample_init("limit_cycle", rng), config["horizon"])
        for _ in range(config["train_iterations"])
    ]
    a_star = fit_koopman(assemble_pairs(trajectories, phi_map), config["ridge"])
    return a_star, phi_map


def run_target_train(config, seed: int, out_dir) -> dict:
    """Fit the reference operator of the ground-truth limit cycle."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    a_star, phi_map = _train_target(config, seed)
    rho = spectral_radius(a_star)
    save_matrix_csv(a_star, out_dir / "koopman_target.csv")
    save_feature_map(phi_map, out_dir / "phi_map.npz")
    _write_metrics(out_dir, {"spectral_radius": rho,
                             "n_pairs": config["train_iterations"] * config["horizon"]})
    return {"a_star": a_star, "phi_map": phi_map, "spectral_radius": rho}


def _load_or_train_target(config, seed):
    if config["target_dir"]:
        target_dir = Path(config["target_dir"])
        return (load_matrix_csv(target_dir / "koopman_target.csv"),
                load_feature_map(target_dir / "phi_map.npz"))
    return _train_target(config["target_train"], seed)


def run_limit_cycle_imitate(config, seed: int, out_dir) -> dict:
    """Cross-entropy policy search against a mode (or full-matrix) imitation
    cost on the fitted Koopman operator."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    a_star, phi_map = _load_or_train_target(config, seed)
    if config["imitation"] == "mode_l1":
        target = top_mode(a_star)
        spectrum = SpectrumCostSpec((SpectrumTerm("mode_l1", 1.0, target=target),))
    elif config["imitation"] == "hs_imitation":
        spectrum = SpectrumCostSpec((SpectrumTerm("hs_imitation", 1.0, target=a_star),))
    else:
        raise ValueError(f"unknown imitation cost {config['imitation']!r}")

    bound = np.array([3.0, 3.0])
    family = RffPolicyFamily(
        sample_rff(3, config["policy_rff_dim"], config["policy_bandwidth"],
                   False, seed=config["policy_seed"]),
        2, -bound, bound)
    spec = KsnrObjectiveSpec(
        env_kind="limit_cycle", family=family, phi_map=phi_map,
        spectrum_spec=spectrum, step_cost=StepCostSpec("none"),
        horizon=config["horizon"], ridge=config["ridge"],
        seed=int(_rng(seed, 2).integers(2**31)))
    result = cem_optimize(make_objective(spec),
                          _cem_config(config["cem"], family.param_dim,
                                      int(_rng(seed, 3).integers(2**31))))

    eval_rng = _rng(seed, 4)
    evals, r_errors = [], []
    for _ in range(config["eval_rollouts"]):
        x0 = envs.sample_init("limit_cycle", eval_rng)
        detail = ksnr_evaluate(spec, result.best_theta, x0)
        evals.append(detail)
        radii = detail["trajectory"].states[-20:, 0]
        r_errors.append(float(np.median(np.abs(radii - 1.0))))
    trajectories = [d["trajectory"] for d in evals]
    pooled = fit_koopman(assemble_pairs(trajectories, phi_map), config["ridge"])

    metrics = {
        "spectrum_cost": float(np.mean([d["spectrum_cost"] for d in evals])),
        "cumulative_cost": float(np.mean([d["cumulative_cost"] for d in evals])),
        "spectral_radius": spectral_radius(pooled),
        "median_abs_r_err_last20": float(np.median(r_errors)),
        "best_objective": result.best_value,
    }
    _write_cem_history(out_dir, result.history)
    _write_trajectories(out_dir, trajectories, ["r", "theta"], ["v_r", "v_theta"])
    _write_metrics(out_dir, metrics)
    xy = [(traj.states[:, 0] * np.cos(traj.states[:, 1]),
           traj.states[:, 0] * np.sin(traj.states[:, 1]), f"rollout {i}")
          for i, traj in enumerate(trajectories)]
    plots.line_plot(out_dir / "trajectories_xy.svg", xy,
                    title="final-policy trajectories", xlabel="x", ylabel="y")
    plots.line_plot(out_dir / "radius_traces.svg",
                    [(np.arange(t.states.shape[0]), t.states[:, 0], f"rollout {i}")
                     for i, t in enumerate(trajectories)],
                    title="radius traces", xlabel="step", ylabel="r")
    plots.line_plot(out_dir / "cem_history.svg",
                    [([rec.iteration for rec in result.history],
                      [rec.elite_mean_value for rec in result.history], "elite mean")],
                    title="search progress", xlabel="iteration", ylabel="objective")
    return {"metrics": metrics, "per_rollout_r_err": r_errors,
            "best_theta": result.best_theta}


def _count_sign_changes(values: np.ndarray) -> int:
    signs = np.sign(values[np.abs(values) > 1e-12])
    return int(np.sum(signs[1:] != signs[:-1])) if signs.size else 0


def run_cartpole_stable(config, seed: int, out_dir) -> dict:
    """Velocity-seeking cart-pole search with (or without) the stability-radius
    spectrum cost."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    phi_map = sample_rff(4, config["phi_rff_dim"], config["phi_bandwidth"],
                         True, seed=config["phi_seed"])
    bound = np.array([1.0])
    family = RffPolicyFamily(
        sample_rff(4, config["policy_rff_dim"], config["policy_bandwidth"],
                   False, seed=config["policy_seed"]),
        1, -bound, bound)
    weight = config["spectrum_weight"]
    spectrum = SpectrumCostSpec(
        (SpectrumTerm("stability_radius", weight),) if weight > 0 else ())
    spec = KsnrObjectiveSpec(
        env_kind="cartpole", family=family, phi_map=phi_map,
        spectrum_spec=spectrum,
        step_cost=StepCostSpec("neg_velocity_reward", scale=config["reward_scale"]),
        horizon=config["horizon"], ridge=config["ridge"],
        seed=int(_rng(seed, 2).integers(2**31)))
    result = cem_optimize(make_objective(spec),
                          _cem_config(config["cem"], family.param_dim,
                                      int(_rng(seed, 3).integers(2**31))))

    eval_rng = _rng(seed, 4)
    evals = []
    for _ in range(config["eval_rollouts"]):
        x0 = envs.sample_init("cartpole", eval_rng)
        evals.append(ksnr_evaluate(spec, result.best_theta, x0))
    trajectories = [d["trajectory"] for d in evals]
    pooled = fit_koopman(assemble_pairs(trajectories, phi_map), config["ridge"])
    # per-rollout fits follow the same protocol as the search objective;
    # the pooled fit sees more data and therefore less ridge shrinkage
    rho_single = [spectral_radius(d["koopman"]) for d in evals]
    sign_changes = [_count_sign_changes(t.states[:, 1]) for t in trajectories]
    finals = [abs(float(t.states[-1, 0])) for t in trajectories]

    metrics = {
        "spectrum_cost": float(np.mean([d["spectrum_cost"] for d in evals])),
        "cumulative_cost": float(np.mean([d["cumulative_cost"] for d in evals])),
        "cumulative_reward": -float(np.mean([d["cumulative_cost"] for d in evals])),
        "spectral_radius": spectral_radius(pooled),
        "spectral_radius_single_median": float(np.median(rho_single)),
        "velocity_sign_changes_median": float(np.median(sign_changes)),
        "abs_final_position_median": float(np.median(finals)),
        "best_objective": result.best_value,
    }
    _write_cem_history(out_dir, result.history)
    _write_trajectories(out_dir, trajectories, ["p", "v", "theta", "omega"],
                        ["force"])
    _write_metrics(out_dir, metrics)
    plots.line_plot(out_dir / "velocity_traces.svg",
                    [(np.arange(t.states.shape[0]), t.states[:, 1], f"rollout {i}")
                     for i, t in enumerate(trajectories)],
                    title="cart velocity", xlabel="step", ylabel="v")
    return {"metrics": metrics, "sign_changes": sign_changes,
            "final_positions": finals, "best_theta": result.best_theta}


def _pretrain_config(config, seed: int) -> mppi.PretrainConfig:
    return mppi.PretrainConfig(
        mppi_control_std=config["mppi_control_std"],
        mppi_temperature=config["mppi_temperature"],
        mppi_samples=config["mppi_samples"],
        iterations=config["curriculum_iterations"],
        policy_rff_dim=config["policy_rff_dim"],
        policy_bandwidth=config["policy_bandwidth"],
        clone_ridge=config["clone_ridge"],
        phi_rff_dim=config["phi_rff_dim"],
        phi_bandwidth=config["phi_bandwidth"],
        fit_ridge=config["fit_ridge"],
        a_star_rollouts=config["a_star_rollouts"],
        a_star_horizon=config["a_star_horizon"],
        seed=seed)


def run_pretrain_cartpole(config, seed: int, out_dir) -> dict:
    """Path-integral pretraining of the three base policies and the reference
    operator used by the online learner."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = mppi.pretrain_cartpole_policies(_pretrain_config(config, seed),
                                             _rng(seed, 1))
    for i, policy in enumerate(result.policies):
        save_rff_policy(policy, out_dir / f"policy_{i}.npz")
    save_matrix_csv(result.a_star, out_dir / "koopman_target.csv")
    save_feature_map(result.phi_map, out_dir / "phi_map.npz")

    eval_rng = _rng(seed, 2)
    H = config["eval_horizon"]
    rollouts = [envs.rollout("cartpole", p, envs.sample_init("cartpole", eval_rng), H)
                for p in result.policies]
    upright = [float(np.mean(np.cos(t.states[:, 2]) > 0.0)) for t in rollouts]
    late_v = [float(np.mean(t.states[H // 5:, 1])) for t in rollouts]
    metrics = {
        "rho_a_star": spectral_radius(result.a_star),
        "policy0_upright_fraction": upright[0],
        "policy1_upright_fraction": upright[1],
        "policy2_upright_fraction": upright[2],
        "policy1_mean_velocity": late_v[1],
        "policy2_mean_velocity": late_v[2],
        "demo_counts": sum(result.demo_counts),
    }
    _write_trajectories(out_dir, rollouts, ["p", "v", "theta", "omega"], ["force"])
    _write_metrics(out_dir, metrics)
    return {"result": result, "metrics": metrics, "rollouts": rollouts}


def load_pretrain(out_dir) -> mppi.PretrainResult:
    out_dir = Path(out_dir)
    policies = tuple(load_rff_policy(out_dir / f"policy_{i}.npz") for i in range(3))
    a_star = load_matrix_csv(out_dir / "koopman_target.csv")
    phi_map = load_feature_map(out_dir / "phi_map.npz")
    return mppi.PretrainResult(policies, a_star, phi_map, (0, 0, 0))


def _theta_penalty(weight: float, limit: float):
    def penalty(thetas):
        excess = np.maximum(np.max(np.abs(thetas), axis=1) - limit, 0.0)
        return weight * excess**2
    return penalty


def _kslc3_pretrain(config, pretrain):
    if pretrain is not None:
        return pretrain
    if config["pretrain_dir"]:
        return load_pretrain(config["pretrain_dir"])
    sub = resolve_config("pretrain-cartpole", config["pretrain"] or {}, "desk")
    return mppi.pretrain_cartpole_policies(_pretrain_config(sub, seed=90_000),
                                           _rng(90_000, 1))


def _kslc3_task(config, pretrain):
    """Assemble the search space, costs, and known-model objective spec."""
    bound = np.array([1.0])
    family = MixturePolicyFamily(pretrain.policies, -bound, bound)
    spectrum = SpectrumCostSpec((
        SpectrumTerm("rows_hs_imitation", 1.0, target=pretrain.a_star, rows=(0, 4)),
        SpectrumTerm("abs_eig_sum", config["abs_eig_weight"]),
    ))
    step_cost = StepCostSpec("velocity_target", scale=config["step_cost_scale"],
                             target=config["step_cost_target"],
                             fall_penalty=config["fall_penalty"])
    penalty = _theta_penalty(config["theta_penalty_weight"],
                             config["theta_penalty_limit"])
    base_spec = KsnrObjectiveSpec(
        env_kind="cartpole", family=family, phi_map=pretrain.phi_map,
        spectrum_spec=spectrum, step_cost=step_cost,
        horizon=config["episode_horizon"], ridge=config["ridge"],
        seed=int(_rng(config["baseline_seed"], 2).integers(2**31)),
        theta_penalty=penalty)
    return family, spectrum, step_cost, penalty, base_spec


def compute_kslc3_baseline(config, pretrain=None) -> np.ndarray:
    """Best mixture weights found by cross-entropy search on the true
    environment; the regret baseline is shared by all learner seeds."""
    pretrain = _kslc3_pretrain(config, pretrain)
    family, _, _, _, base_spec = _kslc3_task(config, pretrain)
    result = cem_optimize(make_objective(base_spec),
                          _cem_config(config["cem"], family.param_dim,
                                      int(_rng(config["baseline_seed"], 3)
                                          .integers(2**31))))
    return result.best_theta


def run_kslc3_cartpole(config, seed: int, out_dir, pretrain=None,
                       baseline_theta=None) -> dict:
    """Thompson-sampling online learner on the cart-pole imitation task, with
    a known-model cross-entropy baseline for the regret diagnostics."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pretrain = _kslc3_pretrain(config, pretrain)
    a_star, phi_map = pretrain.a_star, pretrain.phi_map
    family, spectrum, step_cost, penalty, base_spec = _kslc3_task(config, pretrain)
    H = config["episode_horizon"]
    if baseline_theta is None:
        baseline_theta = compute_kslc3_baseline(config, pretrain)

    zeta_map = sample_rff(family.param_dim, config["d_zeta"],
                          config["zeta_bandwidth"], False,
                          seed=config["zeta_seed"])
    spec = kslc3.ThompsonSpec(
        env_kind="cartpole", family=family, phi_map=phi_map, zeta_map=zeta_map,
        spectrum_spec=spectrum,
        cem=_cem_config(config["cem"], family.param_dim,
                        int(_rng(seed, 4).integers(2**31))),
        ridge=config["ridge"], iota=config["iota"], n_obs=4,
        theta_penalty=penalty)
    post = kslc3.Posterior(phi_map.output_dim, config["d_zeta"],
                           lam=config["lambda"], noise_sigma2=config["sigma2"])

    episode_rng = _rng(seed, 5)
    model_rng = _rng(seed, 6)
    records, baselines, base_spectra = [], [], []
    for t in range(config["episodes"]):
        x0 = envs.sample_init("cartpole", episode_rng)
        record, post = kslc3.thompson_episode(post, spec, [(x0, H)], step_cost,
                                              model_rng, t)
        base_eval = ksnr_evaluate(base_spec, baseline_theta, x0)
        records.append(record)
        baselines.append(base_eval["objective"])
        base_spectra.append(base_eval["spectrum_cost"])
        log.info("episode %d: measured spectrum %.4f cumulative %.4f",
                 t, record.spectrum_cost_measured, record.cumulative_cost)

    regret = kslc3.empirical_regret([r.objective for r in records], baselines)
    write_csv(out_dir / "episodes.csv",
              ["t", "spectrum_cost_est", "spectrum_cost_measured",
               "cumulative_cost", "info_gain", "beta_t", "regret"],
              [[r.t, r.spectrum_cost_est, r.spectrum_cost_measured,
                r.cumulative_cost, r.info_gain, r.beta, reg]
               for r, reg in zip(records, regret)])
    kslc3.save_posterior(post, out_dir / "posterior.npz")

    measured = np.array([r.spectrum_cost_measured for r in records])
    objectives = np.array([r.objective for r in records])
    gaps = objectives - np.array(baselines)
    k = min(4, len(records))
    metrics = {
        "spectrum_cost": float(measured[-1]),
        "cumulative_cost": float(records[-1].cumulative_cost),
        "spectrum_first4_mean": float(measured[:k].mean()),
        "spectrum_last4_mean": float(measured[-k:].mean()),
        "gap_first4_mean": float(gaps[:k].mean()),
        "gap_last4_mean": float(gaps[-k:].mean()),
        "baseline_objective_mean": float(np.mean(baselines)),
        "baseline_spectrum_mean": float(np.mean(base_spectra)),
        "final_regret": float(regret[-1]),
        "info_gain_final": records[-1].info_gain,
    }
    _write_metrics(out_dir, metrics)
    ts = np.arange(len(records))
    base_spectrum = float(np.mean(base_spectra))
    plots.line_plot(out_dir / "spectrum_curve.svg",
                    [(ts, measured, "measured"),
                     (ts, [r.spectrum_cost_est for r in records], "model estimate"),
                     (ts, np.full(len(records), base_spectrum), "baseline")],
                    title="spectrum cost over episodes", xlabel="episode",
                    ylabel="spectrum cost")
    plots.line_plot(out_dir / "regret.svg", [(ts, regret, "cumulative regret")],
                    title="empirical regret", xlabel="episode", ylabel="regret")
    return {"records": records, "metrics": metrics, "regret": regret,
            "baseline_objective": baselines, "posterior": post}


_RUNNERS = {
    "limit-cycle-target-train": run_target_train,
    "limit-cycle-imitate": run_limit_cycle_imitate,
    "cartpole-stable": run_cartpole_stable,
    "pretrain-cartpole": run_pretrain_cartpole,
    "kslc3-cartpole": run_kslc3_cartpole,
}


def run_experiment(name: str, overrides=None, scale: str = "desk",
                   seed: int = 0, out_dir=None) -> dict:
    """Resolve the configuration, run the named experiment, and write its
    artifacts under ``out_dir``."""
    config = resolve_config(name, overrides, scale)
    out_dir = Path(out_dir if out_dir is not None else f"runs/{name}-seed{seed}")
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_resolved(out_dir, name, config, seed, scale)
    summary = _RUNNERS[name](config, seed, out_dir)
    log.info("experiment %s (seed %d) artifacts in %s", name, seed, out_dir)
    return summary
