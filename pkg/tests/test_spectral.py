import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksnr import spectral


def power_iteration_radius(A, iters=20000, tol=1e-12):
    """Oracle: spectral radius via power iteration on normalized iterates."""
    rng = np.random.default_rng(1234)
    v = rng.normal(size=A.shape[0])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(iters):
        w = A @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - prev) < tol * max(1.0, norm):
            break
        prev = norm
    return norm


def companion_roots_abs_sum(A):
    """Oracle: sum of root moduli of the characteristic polynomial."""
    coeffs = np.poly(A)
    return np.abs(np.roots(coeffs)).sum()


def test_eig_diagonal():
    dec = spectral.eig_general(np.diag([2.0, 0.5]))
    assert np.allclose(dec.eigenvalues, [2.0, 0.5])
    assert dec.is_complete


def test_eig_rotation_pure_imaginary():
    dec = spectral.eig_general(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert np.allclose(dec.eigenvalues, [1j, -1j])
    assert np.allclose(np.abs(dec.eigenvalues), 1.0)


def test_eig_residuals_and_power_oracle():
    rng = np.random.default_rng(7)
    A = rng.normal(size=(6, 6))
    dec = spectral.eig_general(A)
    norm_A = np.linalg.norm(A, 2)
    for lam, v in zip(dec.eigenvalues, dec.right_eigenvectors.T):
        assert np.linalg.norm(A @ v - lam * v) <= 1e-8 * norm_A * np.linalg.norm(v)
    # this seed has a real, well-separated dominant eigenvalue
    assert dec.moduli[0] == pytest.approx(power_iteration_radius(A), abs=1e-6)


def test_eig_ordering_deterministic():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(8, 8))
    first = spectral.eig_general(A).eigenvalues
    second = spectral.eig_general(A.copy()).eigenvalues
    assert np.array_equal(first, second)
    moduli = np.abs(first)
    assert np.all(np.diff(moduli) <= 1e-12)


def test_spectral_radius_examples():
    assert spectral.spectral_radius(np.diag([0.5, -2.0])) == pytest.approx(2.0)
    assert spectral.spectral_radius(np.eye(3)) == pytest.approx(1.0)
    rng = np.random.default_rng(12)  # real, well-separated dominant eigenvalue
    A = rng.normal(size=(5, 5))
    assert spectral.spectral_radius(A) == pytest.approx(
        power_iteration_radius(A), abs=1e-6)


def test_abs_eig_sum_examples():
    assert spectral.abs_eig_sum(np.eye(3)) == pytest.approx(3.0)
    assert spectral.abs_eig_sum(np.array([[0.0, -1.0], [1.0, 0.0]])) == pytest.approx(2.0)
    rng = np.random.default_rng(12)
    A = rng.normal(size=(5, 5))
    assert spectral.abs_eig_sum(A) == pytest.approx(
        companion_roots_abs_sum(A), abs=1e-6)


def test_top_mode_diagonal():
    assert np.allclose(spectral.top_mode(np.diag([2.0, 1.0])), [1.0, 0.0])
    assert np.allclose(spectral.top_mode(np.diag([1.0, 2.0])), [0.0, 1.0])


def test_top_mode_residual_and_phase():
    rng = np.random.default_rng(21)
    # random diagonalizable matrix with a clear dominant eigenvalue
    V = rng.normal(size=(4, 4)) + np.eye(4)
    A = V @ np.diag([1.9, 0.8, 0.5, 0.1]) @ np.linalg.inv(V)
    mode = spectral.top_mode(A)
    lam = spectral.eig_general(A).eigenvalues[0]
    assert np.linalg.norm(A @ mode - lam * mode) <= 1e-8
    assert np.linalg.norm(mode) == pytest.approx(1.0)
    k = np.argmax(np.abs(mode))
    assert mode[k].imag == pytest.approx(0.0, abs=1e-12)
    assert mode[k].real > 0


def test_top_mode_tie_raises():
    with pytest.raises(spectral.DegenerateSpectrumError):
        spectral.top_mode(np.eye(3))


def test_top_mode_scale_invariant():
    rng = np.random.default_rng(22)
    A = rng.normal(size=(5, 5)) + 2 * np.eye(5)
    assert np.allclose(spectral.top_mode(A), spectral.top_mode(2.0 * A), atol=1e-8)


def test_hs_distance_rows():
    rng = np.random.default_rng(30)
    A = rng.normal(size=(6, 6))
    B = rng.normal(size=(6, 6))
    assert spectral.hs_distance_rows(A, A, (1, 4)) == 0.0
    assert spectral.hs_distance_rows(np.eye(2), np.zeros((2, 2))) == pytest.approx(2.0)
    # explicit double-loop oracle on rows 0..3
    acc = 0.0
    for i in range(0, 4):
        for j in range(6):
            acc += (A[i, j] - B[i, j]) ** 2
    assert spectral.hs_distance_rows(A, B, (0, 4)) == pytest.approx(acc, abs=1e-12)
    with pytest.raises(ValueError):
        spectral.hs_distance_rows(A, B[:5, :5])
    with pytest.raises(ValueError):
        spectral.hs_distance_rows(A, B, (4, 99))


def test_holder_constants_diag():
    h = spectral.holder_constants(np.diag([3.0, 1.0]))
    assert h.kappa == pytest.approx(1.0)
    assert h.jordan_block_order_m == 1
    assert h.alpha == 1.0
    assert h.L == pytest.approx(16.0)
    assert h.reliable


def test_holder_constants_normal_matrix():
    # any normal matrix has a unitary eigenvector basis
    A = np.array([[0.0, -2.0], [2.0, 0.0]])
    h = spectral.holder_constants(A)
    assert h.kappa == pytest.approx(1.0, abs=1e-10)
    assert h.alpha == 1.0


def test_holder_constants_svd_oracle():
    rng = np.random.default_rng(40)
    V = rng.normal(size=(5, 5)) + 3 * np.eye(5)
    A = V @ np.diag([2.0, 1.5, 1.0, 0.5, 0.25]) @ np.linalg.inv(V)
    h = spectral.holder_constants(A)
    vecs = spectral.eig_general(A).right_eigenvectors
    sv = np.linalg.svd(vecs, compute_uv=False)
    L_oracle = (1.0 + sv[0] / sv[-1]) * 25 * (1.0 + 2.0)
    assert h.L == pytest.approx(L_oracle, rel=1e-6)


def test_holder_constants_defective_flagged():
    A = np.array([[1.0, 1.0], [0.0, 1.0]])  # single 2x2 Jordan block
    h = spectral.holder_constants(A)
    assert not h.reliable


def test_eig_rejects_nonfinite():
    with pytest.raises(ValueError):
        spectral.eig_general(np.array([[np.nan, 0.0], [0.0, 1.0]]))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.floats(0.1, 8.0))
def test_radius_scaling_property(seed, c):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4))
    assert spectral.spectral_radius(c * A) == pytest.approx(
        c * spectral.spectral_radius(A), abs=1e-10, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_abs_eig_sum_dominates_radius(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(5, 5))
    assert spectral.abs_eig_sum(A) >= spectral.spectral_radius(A) - 1e-12


def test_similarity_invariance():
    rng = np.random.default_rng(50)
    for _ in range(20):
        A = rng.normal(size=(5, 5))
        P = rng.normal(size=(5, 5)) + 2 * np.eye(5)
        B = P @ A @ np.linalg.inv(P)
        assert spectral.spectral_radius(B) == pytest.approx(
            spectral.spectral_radius(A), rel=1e-6, abs=1e-6)


def test_conjugate_pair_closure():
    rng = np.random.default_rng(60)
    for _ in range(20):
        vals = spectral.eig_general(rng.normal(size=(6, 6))).eigenvalues
        complex_vals = vals[np.abs(vals.imag) > 1e-12]
        for lam in complex_vals:
            dists = np.abs(complex_vals - np.conj(lam))
            assert dists.min() < 1e-9


def test_large_matrix_decomposes_quickly():
    import time
    rng = np.random.default_rng(70)
    A = rng.normal(size=(200, 200))
    start = time.perf_counter()
    dec = spectral.eig_general(A)
    assert time.perf_counter() - start < 1.0
    assert dec.eigenvalues.shape == (200,)
