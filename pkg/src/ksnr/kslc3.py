"""Online learner: Bayesian linear model over the Kronecker-feature
parameterization, Thompson-sampling episodes, and the regret/information
diagnostics that accompany them.

The model is ``phi' = M' (phi (x) zeta(Theta))`` with i.i.d. Gaussian row
noise, so all output rows share one precision matrix ``P = lambda I + sum z
z^T`` over the Kronecker feature ``z``.  The log-determinant of ``P`` is
tracked through a cached Cholesky factorization; by the matrix determinant
lemma this equals the accumulated ``log(1 + z^T P^-1 z)`` increments of the
rank-one updates.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
from threadpoolctl import threadpool_limits
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from ksnr import envs
from ksnr.cem import CemConfig, CemFailure, cem_optimize
from ksnr.costs import SpectrumCostSpec, StepCostSpec, eval_spectrum_cost, \
    eval_step_cost_batch
from ksnr.features import FeatureMap, featurize, featurize_batch, kron_feature_rows
from ksnr.koopman import assemble_pairs, fit_koopman
from ksnr.spectral import DegenerateSpectrumError, EigenSolveError
from ksnr import backend

log = logging.getLogger(__name__)


class Posterior:
    """Running ridge regression over the Kronecker features.

    Maintains the precision ``P`` and the cross-moment ``S = sum y z^T``;
    the mean operator ``S P^-1`` and the log-determinant are computed from a
    Cholesky factorization that is cached between updates.
    """

    def __init__(self, d_phi: int, d_zeta: int, lam: float = 1.0,
                 noise_sigma2: float = 1e-4):
        if lam <= 0.0:
            raise ValueError("prior parameter lambda must be positive")
        self.d_phi = d_phi
        self.d_zeta = d_zeta
        self.dim = d_phi * d_zeta
        self.lam = float(lam)
        self.noise_sigma2 = float(noise_sigma2)
        self.P = lam * np.eye(self.dim)
        self.S = np.zeros((d_phi, self.dim))
        self.n_updates = 0
        self.logdet_prior = self.dim * np.log(lam)
        self._chol = None
        self._logdet = self.logdet_prior

    def _factor(self):
        if self._chol is None:
            try:
                self._chol = np.linalg.cholesky(self.P)
            except np.linalg.LinAlgError as exc:
                raise np.linalg.LinAlgError(
                    "precision matrix lost positive definiteness"
                ) from exc
            if self._logdet is None:
                self._logdet = float(
                    2.0 * np.log(np.diagonal(self._chol)).sum())
        return self._chol

    def invalidate_cache(self) -> None:
        """Drop cached factorization state after mutating ``P`` directly."""
        self._chol = None
        self._logdet = None

    @property
    def logdet_current(self) -> float:
        if self._logdet is None:
            self._factor()
        return self._logdet

    @property
    def logdet_ratio(self) -> float:
        return self.logdet_current - self.logdet_prior

    @property
    def mean(self) -> np.ndarray:
        L = self._factor()
        half = solve_triangular(L, self.S.T, lower=True)
        return solve_triangular(L.T, half, lower=False).T


def posterior_update(post: Posterior, z: np.ndarray, y: np.ndarray) -> Posterior:
    """Add one transition (or a batch given as rows) to the posterior."""
    z = np.asarray(z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if z.ndim == 1:
        z = z[None, :]
        y = y[None, :]
    if z.shape[1] != post.dim or y.shape[1] != post.d_phi \
            or z.shape[0] != y.shape[0]:
        raise ValueError(f"update shapes {z.shape}/{y.shape} do not match "
                         f"a ({post.d_phi}, {post.d_zeta}) posterior")
    if post._chol is not None and post._logdet is not None:
        # matrix determinant lemma with the pre-update factor avoids a second
        # full factorization: logdet(P + Z^T Z) = logdet(P) + logdet(I + Z P^-1 Z^T)
        V = solve_triangular(post._chol, z.T, lower=True)
        C = V.T @ V
        C[np.diag_indices(C.shape[0])] += 1.0
        post._logdet += float(np.linalg.slogdet(C)[1])
    else:
        post._logdet = None
    post.P += z.T @ z
    post.S += y.T @ z
    post.n_updates += z.shape[0]
    post._chol = None
    return post


def sample_model(post: Posterior, iota: float, rng: np.random.Generator) -> np.ndarray:
    """Draw the model matrix; rows are independent with covariance ``iota P^-1``."""
    if iota < 0.0:
        raise ValueError("covariance scale must be nonnegative")
    mean = post.mean
    if iota == 0.0:
        return mean
    L = post._factor()
    g = rng.standard_normal((post.dim, post.d_phi))
    draw = solve_triangular(L.T, g, lower=False).T
    return mean + np.sqrt(iota) * draw


def koopman_from_model(Mp: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Contract the model blocks with a parameter feature vector.

    Column ``i`` of the result is ``Mp[:, i*d_zeta:(i+1)*d_zeta] @ zeta``, so
    that ``result @ phi == Mp @ kron_feature(phi, zeta)`` identically.
    """
    Mp = np.asarray(Mp, dtype=np.float64)
    zeta = np.asarray(zeta, dtype=np.float64)
    d_phi = Mp.shape[0]
    if Mp.shape[1] != d_phi * zeta.shape[0]:
        raise ValueError(f"model with {Mp.shape[1]} columns does not factor into "
                         f"{d_phi} blocks of {zeta.shape[0]}")
    return Mp.reshape(d_phi, d_phi, zeta.shape[0]) @ zeta


def koopman_from_model_batch(Mp: np.ndarray, zetas: np.ndarray) -> np.ndarray:
    """Koopman matrices for a batch of parameter features, shape (B, d, d)."""
    d_phi = Mp.shape[0]
    blocks = Mp.reshape(d_phi, d_phi, -1)
    return np.einsum("riz,bz->bri", blocks, zetas)


def beta_radius(t: int, sigma2: float, d_phi: int, logdet_ratio: float) -> float:
    """Confidence-ball radius ``20 sigma^2 (d_phi + log t + logdet_ratio)``."""
    if t < 1:
        raise ValueError("episode count t must be at least 1")
    return 20.0 * sigma2 * (d_phi + np.log(t) + logdet_ratio)


def info_gain(post: Posterior) -> float:
    """Realized information gain: twice the posterior/prior log-det ratio."""
    return 2.0 * post.logdet_ratio


def info_gain_log_bound(dim: int, episodes: int, max_horizon: int,
                        feat_bound_sq: float, lam: float,
                        scale: float = 4.0) -> float:
    """Logarithmic growth bound on the information gain, from the trace of
    the accumulated feature outer products."""
    return scale * dim * np.log1p(episodes * max_horizon * feat_bound_sq / lam)


def empirical_regret(objectives, baselines) -> np.ndarray:
    """Cumulative excess of realized objectives over per-episode baselines."""
    objectives = np.asarray(objectives, dtype=np.float64)
    baselines = np.asarray(baselines, dtype=np.float64)
    if objectives.shape != baselines.shape:
        raise ValueError("need one baseline per episode")
    return np.cumsum(objectives - baselines)


@dataclass(frozen=True)
class EpisodeRecord:
    t: int
    theta: np.ndarray
    spectrum_cost_est: float       # on the sampled model at the chosen theta
    spectrum_cost_measured: float  # refit from the episode's real trajectories
    cumulative_cost: float
    objective: float               # measured spectrum + cumulative
    info_gain: float
    beta: float
    n_transitions: int


@dataclass(frozen=True)
class ThompsonSpec:
    """Everything one episode needs besides the posterior and its inputs."""

    env_kind: str
    family: object               # policy family over Theta
    phi_map: FeatureMap
    zeta_map: FeatureMap         # feature map over Theta
    spectrum_spec: SpectrumCostSpec
    cem: CemConfig
    ridge: float = 1.0           # refit ridge for the measured spectrum cost
    iota: float = 1e-4
    n_obs: int = 4               # leading feature coordinates holding the state
    theta_penalty: object = None


def model_objective(spec: ThompsonSpec, Mp: np.ndarray, x0s,
                    step_cost: StepCostSpec):
    """Batched objective under a fixed model matrix: spectrum cost of the
    parameterized operator plus the model-rollout cumulative cost."""
    phi0s = [(featurize(spec.phi_map, envs.observe(spec.env_kind, x0)), H)
             for x0, H in x0s]

    def objective(thetas, iteration):
        zetas = featurize_batch(spec.zeta_map, thetas)
        K = np.ascontiguousarray(koopman_from_model_batch(Mp, zetas))
        B = K.shape[0]
        values = np.zeros(B)
        with threadpool_limits(limits=1):
            for b in range(B):
                try:
                    values[b] = eval_spectrum_cost(spec.spectrum_spec, K[b])
                except (EigenSolveError, DegenerateSpectrumError) as exc:
                    log.warning("model spectrum failed for candidate %d: %s", b, exc)
                    values[b] = np.inf
        for phi0, H in phi0s:
            obs = backend.linear_rollout_obs(K, np.ascontiguousarray(phi0),
                                             H, spec.n_obs)
            values += eval_step_cost_batch(step_cost, obs).sum(axis=1)
        if spec.theta_penalty is not None:
            values = values + spec.theta_penalty(thetas)
        return values

    return objective


def thompson_episode(post: Posterior, spec: ThompsonSpec, x0s,
                     step_cost: StepCostSpec, rng: np.random.Generator,
                     t: int):
    """One episode: sample a model, optimize the model objective, roll the
    chosen parameter out for real, and absorb every transition.

    ``x0s`` is a sequence of (initial state, horizon) pairs.  Transitions
    collected before a failure still advance the posterior.
    """
    Mp_hat = sample_model(post, spec.iota, rng)
    cem_cfg = replace(spec.cem, seed=int(np.random.SeedSequence(
        [spec.cem.seed, t]).generate_state(1)[0]))
    result = cem_optimize(model_objective(spec, Mp_hat, x0s, step_cost), cem_cfg)
    theta = result.best_theta

    policy = spec.family.make(theta)
    zeta = featurize(spec.zeta_map, np.asarray(theta, dtype=np.float64))
    trajectories = []
    n_transitions = 0
    # the posterior absorbs each trajectory as soon as it is collected, so a
    # failure later in the episode does not lose earlier transitions
    for x0, H in x0s:
        traj = envs.rollout(spec.env_kind, policy, x0, H, step_cost)
        trajectories.append(traj)
        feats = featurize_batch(spec.phi_map, traj.observations)
        Z = kron_feature_rows(feats[:-1], zeta)
        posterior_update(post, Z, feats[1:])
        n_transitions += H

    K_est = koopman_from_model(Mp_hat, zeta)
    spectrum_est = eval_spectrum_cost(spec.spectrum_spec, K_est)
    A_measured = fit_koopman(assemble_pairs(trajectories, spec.phi_map), spec.ridge)
    spectrum_measured = eval_spectrum_cost(spec.spectrum_spec, A_measured)
    cumulative = float(sum(traj.cumulative_cost for traj in trajectories))
    record = EpisodeRecord(
        t=t, theta=np.asarray(theta, dtype=np.float64),
        spectrum_cost_est=float(spectrum_est),
        spectrum_cost_measured=float(spectrum_measured),
        cumulative_cost=cumulative,
        objective=float(spectrum_measured + cumulative),
        info_gain=info_gain(post),
        beta=beta_radius(t + 1, post.noise_sigma2, post.d_phi, post.logdet_ratio),
        n_transitions=n_transitions)
    return record, post


def save_posterior(post: Posterior, path) -> None:
    np.savez(path, d_phi=post.d_phi, d_zeta=post.d_zeta, lam=post.lam,
             noise_sigma2=post.noise_sigma2, mean=post.mean, precision=post.P,
             n_updates=post.n_updates)


def load_posterior(path) -> Posterior:
    with np.load(path, allow_pickle=False) as data:
        post = Posterior(int(data["d_phi"]), int(data["d_zeta"]),
                         float(data["lam"]), float(data["noise_sigma2"]))
        post.P = data["precision"].copy()
        post.S = data["mean"] @ post.P
        post.n_updates = int(data["n_updates"])
        post.invalidate_cache()
        return post
