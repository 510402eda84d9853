"""Spectrum costs on Koopman matrices and single-step state costs."""

from dataclasses import dataclass, field

import numpy as np

from ksnr import spectral

SPECTRUM_KINDS = ("stability_radius", "abs_eig_sum", "mode_l1",
                  "hs_imitation", "rows_hs_imitation")
STEP_KINDS = ("none", "neg_velocity_reward", "velocity_target",
              "neg_walker_reward")


@dataclass(frozen=True)
class SpectrumTerm:
    kind: str
    weight: float
    target: np.ndarray | None = None         # mode vector or target matrix
    rows: tuple[int, int] | None = None      # half-open row range

    def __post_init__(self):
        if self.kind not in SPECTRUM_KINDS:
            raise ValueError(f"unknown spectrum term kind {self.kind!r}")
        if self.weight < 0.0:
            raise ValueError("term weights must be nonnegative")
        if self.kind in ("mode_l1", "hs_imitation", "rows_hs_imitation") and self.target is None:
            raise ValueError(f"{self.kind} needs a target")
        if self.kind == "rows_hs_imitation" and self.rows is None:
            raise ValueError("rows_hs_imitation needs a row range")


@dataclass(frozen=True)
class SpectrumCostSpec:
    terms: tuple[SpectrumTerm, ...] = field(default_factory=tuple)

    def needs_eigvals(self) -> bool:
        return any(t.kind in ("stability_radius", "abs_eig_sum") for t in self.terms)

    def needs_mode(self) -> bool:
        return any(t.kind == "mode_l1" for t in self.terms)


def eval_spectrum_cost(spec: SpectrumCostSpec, A: np.ndarray) -> float:
    """Weighted sum of the spectrum-cost terms evaluated at ``A``."""
    A = np.asarray(A, dtype=np.float64)
    moduli = np.abs(spectral.eigvals_sorted(A)) if spec.needs_eigvals() else None
    mode = spectral.top_mode(A) if spec.needs_mode() else None
    total = 0.0
    for term in spec.terms:
        if term.kind == "stability_radius":
            value = max(1.0, float(moduli[0]))
        elif term.kind == "abs_eig_sum":
            value = float(moduli.sum())
        elif term.kind == "mode_l1":
            target = spectral.canonical_phase(term.target)
            if target.shape != mode.shape:
                raise ValueError(f"mode target has shape {target.shape}, "
                                 f"matrix modes have shape {mode.shape}")
            value = float(np.abs(mode - target).sum())
        elif term.kind == "hs_imitation":
            value = spectral.hs_distance_rows(A, term.target)
        else:  # rows_hs_imitation
            value = spectral.hs_distance_rows(A, term.target, term.rows)
        total += term.weight * value
    return total


@dataclass(frozen=True)
class StepCostSpec:
    """Single-step cost on the observation vector (cost = negative reward).

    ``neg_velocity_reward``: ``-scale*|v|`` plus cost 1 while the pole points
    downward.  ``velocity_target``: ``scale*(|v|-target)**2`` plus
    ``fall_penalty`` while the pole points downward.  Both read the cart
    velocity from ``obs[1]`` and the pole angle from ``obs[2]``.
    """

    kind: str = "none"
    scale: float = 0.0
    target: float = 0.0
    fall_penalty: float = 0.0

    def __post_init__(self):
        if self.kind not in STEP_KINDS:
            raise ValueError(f"unknown step cost kind {self.kind!r}")


def eval_step_cost_batch(spec: StepCostSpec, obs: np.ndarray) -> np.ndarray:
    """Vectorized step costs over the leading axes of ``obs``."""
    obs = np.asarray(obs, dtype=np.float64)
    if spec.kind == "none":
        return np.zeros(obs.shape[:-1])
    if spec.kind == "neg_walker_reward":
        raise NotImplementedError("walker environments are not included")
    if obs.shape[-1] < 3:
        raise ValueError(f"cart costs need (p, v, theta, ...) observations, "
                         f"got dimension {obs.shape[-1]}")
    v = obs[..., 1]
    fallen = np.cos(obs[..., 2]) < 0.0
    if spec.kind == "neg_velocity_reward":
        return -spec.scale * np.abs(v) + np.where(fallen, 1.0, 0.0)
    return spec.scale * (np.abs(v) - spec.target) ** 2 + np.where(
        fallen, spec.fall_penalty, 0.0)


def eval_step_cost(spec: StepCostSpec, obs: np.ndarray) -> float:
    return float(eval_step_cost_batch(spec, np.asarray(obs)[None, :])[0])
