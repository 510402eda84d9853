import numpy as np
import pytest

from ksnr import costs, spectral


def upright_obs(v):
    return np.array([0.0, v, 0.0, 0.0])


def fallen_obs(v):
    return np.array([0.0, v, np.pi, 0.0])


def test_stability_radius_term():
    spec = costs.SpectrumCostSpec((costs.SpectrumTerm("stability_radius", 1e4),))
    A = np.diag([0.5, 0.1])
    assert costs.eval_spectrum_cost(spec, A) == pytest.approx(1e4)
    A = np.diag([1.7, 0.1])
    assert costs.eval_spectrum_cost(spec, A) == pytest.approx(1.7e4)


def test_mode_l1_self_target_is_zero():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 4)) + 2 * np.eye(4)
    target = spectral.top_mode(A)
    spec = costs.SpectrumCostSpec((costs.SpectrumTerm("mode_l1", 1.0, target=target),))
    assert costs.eval_spectrum_cost(spec, A) == pytest.approx(0.0, abs=1e-10)


def test_mode_l1_phase_invariance():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(4, 4)) + 2 * np.eye(4)
    mode = spectral.top_mode(A)
    for phase in np.exp(1j * np.array([0.3, 1.2, -2.5])):
        spec = costs.SpectrumCostSpec(
            (costs.SpectrumTerm("mode_l1", 1.0, target=phase * mode),))
        assert costs.eval_spectrum_cost(spec, A) == pytest.approx(0.0, abs=1e-8)


def test_composite_imitation_cost():
    rng = np.random.default_rng(2)
    A_star = rng.normal(size=(6, 6))
    spec = costs.SpectrumCostSpec((
        costs.SpectrumTerm("rows_hs_imitation", 1.0, target=A_star, rows=(0, 4)),
        costs.SpectrumTerm("abs_eig_sum", 0.01),
    ))
    value = costs.eval_spectrum_cost(spec, A_star)
    oracle = 0.01 * np.abs(np.linalg.eigvals(A_star)).sum()
    assert value == pytest.approx(oracle, abs=1e-8)


def test_hs_imitation_term():
    spec = costs.SpectrumCostSpec(
        (costs.SpectrumTerm("hs_imitation", 2.0, target=np.zeros((2, 2))),))
    assert costs.eval_spectrum_cost(spec, np.eye(2)) == pytest.approx(4.0)


def test_weights_positively_homogeneous():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(5, 5))
    terms = (costs.SpectrumTerm("stability_radius", 3.0),
             costs.SpectrumTerm("abs_eig_sum", 0.25))
    doubled = tuple(costs.SpectrumTerm(t.kind, 2 * t.weight) for t in terms)
    v1 = costs.eval_spectrum_cost(costs.SpectrumCostSpec(terms), A)
    v2 = costs.eval_spectrum_cost(costs.SpectrumCostSpec(doubled), A)
    assert v2 == pytest.approx(2 * v1)


def test_stability_term_floor():
    rng = np.random.default_rng(4)
    spec = costs.SpectrumCostSpec((costs.SpectrumTerm("stability_radius", 1.0),))
    for _ in range(10):
        A = rng.normal(size=(4, 4)) * 0.6
        value = costs.eval_spectrum_cost(spec, A)
        rho = spectral.spectral_radius(A)
        assert value >= 1.0
        assert value == pytest.approx(rho if rho >= 1.0 else 1.0)


def test_term_validation():
    with pytest.raises(ValueError):
        costs.SpectrumTerm("mode_l1", 1.0)  # missing target
    with pytest.raises(ValueError):
        costs.SpectrumTerm("abs_eig_sum", -0.1)
    with pytest.raises(ValueError):
        costs.SpectrumTerm("no_such_kind", 1.0)


def test_step_cost_neg_velocity_reward():
    spec = costs.StepCostSpec("neg_velocity_reward", scale=1e-3)
    assert costs.eval_step_cost(spec, upright_obs(2.0)) == pytest.approx(-0.002)
    assert costs.eval_step_cost(spec, fallen_obs(0.0)) == pytest.approx(1.0)


def test_step_cost_velocity_target():
    spec = costs.StepCostSpec("velocity_target", scale=1e-4, target=1.5,
                              fall_penalty=100.0)
    assert costs.eval_step_cost(spec, upright_obs(1.5)) == pytest.approx(0.0)
    assert costs.eval_step_cost(spec, upright_obs(-1.5)) == pytest.approx(0.0)
    assert costs.eval_step_cost(spec, upright_obs(0.5)) == pytest.approx(1e-4)
    assert costs.eval_step_cost(spec, fallen_obs(1.5)) == pytest.approx(100.0)


def test_step_cost_none_and_walker():
    assert costs.eval_step_cost(costs.StepCostSpec("none"), np.zeros(2)) == 0.0
    with pytest.raises(NotImplementedError):
        costs.eval_step_cost(costs.StepCostSpec("neg_walker_reward"), np.zeros(10))


def test_step_cost_layout_mismatch():
    spec = costs.StepCostSpec("neg_velocity_reward", scale=1e-3)
    with pytest.raises(ValueError):
        costs.eval_step_cost(spec, np.zeros(2))


def test_step_cost_batch_matches_scalar():
    spec = costs.StepCostSpec("velocity_target", scale=1e-4, target=1.5,
                              fall_penalty=100.0)
    rng = np.random.default_rng(5)
    obs = rng.normal(size=(7, 4))
    batch = costs.eval_step_cost_batch(spec, obs)
    for i in range(7):
        assert batch[i] == costs.eval_step_cost(spec, obs[i])
