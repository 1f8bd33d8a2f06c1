import numpy as np
import pytest

from conftest import numerical_gradient
from sparsebounds.errors import DegenerateModelError, InvalidInputError
from sparsebounds.fisher import (
    FisherMatrix,
    fim_closed_form,
    fim_monte_carlo,
    log_likelihood,
    score,
)
from sparsebounds.model import (
    Measurement,
    ProblemModel,
    SparseSignal,
    generate_gaussian_matrix,
    sample_measurement,
    sigma_x_squared,
)


def small_instance(seed=5, sigma_e=0.3, sigma_n=0.5):
    rng = np.random.default_rng(seed)
    A = generate_gaussian_matrix(4, 6, rng)
    model = ProblemModel(A=A, sigma_e=sigma_e, sigma_n=sigma_n, s=2)
    x = SparseSignal(np.array([1.2, 0.0, 0.0, -0.7, 0.0, 0.0]))
    return model, x


class TestClosedForm:
    def test_reduces_to_classical_fim_without_matrix_noise(self, rng):
        A = generate_gaussian_matrix(5, 3, rng)
        model = ProblemModel(A=A, sigma_e=0.0, sigma_n=0.4, s=2)
        x = SparseSignal(np.array([1.0, 0.0, 2.0]))
        fim = fim_closed_form(model, x)
        np.testing.assert_allclose(fim.J, A.T @ A / 0.16, rtol=1e-12)
        assert fim.sigma_x2 == pytest.approx(0.16)

    def test_identity_at_origin(self):
        model = ProblemModel(A=np.eye(3), sigma_e=0.8, sigma_n=1.0, s=1)
        x = SparseSignal(np.zeros(3))
        fim = fim_closed_form(model, x)
        np.testing.assert_allclose(fim.J, np.eye(3), rtol=1e-12)

    def test_rank_one_excess_over_classical_term(self):
        model, x = small_instance()
        fim = fim_closed_form(model, x)
        sx2 = sigma_x_squared(model, x)
        excess = fim.J - model.A.T @ model.A / sx2
        m = model.m
        expected = (2.0 * m * model.sigma_e**4 / sx2**2) * np.outer(x.x, x.x)
        np.testing.assert_allclose(excess, expected, atol=1e-12)

    def test_symmetry(self):
        model, x = small_instance()
        J = fim_closed_form(model, x).J
        np.testing.assert_array_equal(J, J.T)

    def test_degenerate_model_rejected(self):
        model = ProblemModel(A=np.eye(2), sigma_e=0.0, sigma_n=0.0, s=1)
        x = SparseSignal(np.array([1.0, 0.0]))
        with pytest.raises(DegenerateModelError):
            fim_closed_form(model, x)

    def test_wrapper_requires_square(self):
        with pytest.raises(InvalidInputError):
            FisherMatrix(J=np.ones((2, 3)), sigma_x2=1.0)


class TestLogLikelihood:
    def test_at_mean(self):
        model, x = small_instance()
        sx2 = sigma_x_squared(model, x)
        y = Measurement(model.A @ x.x)
        ll = log_likelihood(model, x, y)
        assert ll == pytest.approx(-0.5 * model.m * np.log(2.0 * np.pi * sx2), rel=1e-14)

    def test_residual_scaling_identity(self, rng):
        # doubling the residual subtracts 3 ||r||^2 / (2 sigma_x^2)
        model, x = small_instance()
        sx2 = sigma_x_squared(model, x)
        r = rng.normal(size=model.m)
        mean = model.A @ x.x
        l1 = log_likelihood(model, x, Measurement(mean + r))
        l2 = log_likelihood(model, x, Measurement(mean + 2.0 * r))
        assert l2 - l1 == pytest.approx(-3.0 * (r @ r) / (2.0 * sx2), rel=1e-12)

    def test_density_normalization(self):
        """exp(log_likelihood) integrates to one over a quadrature grid (m=1)."""
        model = ProblemModel(A=np.array([[2.0]]), sigma_e=0.5, sigma_n=0.3, s=1)
        x = SparseSignal(np.array([1.5]))
        grid = np.linspace(-15.0, 20.0, 20001)
        vals = [np.exp(log_likelihood(model, x, Measurement(np.array([g])))) for g in grid]
        assert np.trapezoid(vals, grid) == pytest.approx(1.0, abs=1e-8)


class TestScore:
    def test_matches_numerical_gradient(self, rng):
        model, x0 = small_instance()
        y = sample_measurement(model, x0, rng)

        def ll_of(v):
            return log_likelihood(model, SparseSignal(v), y)

        analytic = score(model, x0, y)
        numeric = numerical_gradient(ll_of, x0.x, h=1e-6)
        np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-7)

    def test_zero_mean(self):
        model, x = small_instance()
        rng = np.random.default_rng(99)
        draws = 200_000
        acc = np.zeros(model.n)
        acc2 = np.zeros(model.n)
        for _ in range(draws):
            sc = score(model, x, sample_measurement(model, x, rng))
            acc += sc
            acc2 += sc * sc
        mean = acc / draws
        se = np.sqrt((acc2 / draws - mean**2) / draws)
        assert np.all(np.abs(mean) <= 3.0 * se + 1e-12)

    def test_classical_score_when_sigma_e_zero(self, rng):
        A = generate_gaussian_matrix(5, 3, rng)
        model = ProblemModel(A=A, sigma_e=0.0, sigma_n=0.7, s=2)
        x = SparseSignal(np.array([1.0, 0.0, 2.0]))
        y = sample_measurement(model, x, rng)
        r = y.y - A @ x.x
        np.testing.assert_allclose(score(model, x, y), A.T @ r / 0.49, rtol=1e-12)


class TestMonteCarlo:
    def test_matches_closed_form(self):
        model, x = small_instance()
        fim = fim_closed_form(model, x)
        est = fim_monte_carlo(model, x, samples=100_000, rng=np.random.default_rng(2))
        err = np.linalg.norm(est.J - fim.J) / np.linalg.norm(fim.J)
        assert err < 0.05

    def test_error_decreases_with_samples(self):
        model, x = small_instance()
        ref = fim_closed_form(model, x).J
        scale = np.linalg.norm(ref)
        med = []
        for samples in (1_000, 10_000, 100_000):
            errs = [
                np.linalg.norm(fim_monte_carlo(model, x, samples, np.random.default_rng(seed)).J - ref)
                / scale
                for seed in range(5)
            ]
            med.append(np.median(errs))
        assert med[0] > med[1] > med[2]

    def test_deterministic_given_seed(self):
        model, x = small_instance()
        a = fim_monte_carlo(model, x, 5_000, np.random.default_rng(8))
        b = fim_monte_carlo(model, x, 5_000, np.random.default_rng(8))
        np.testing.assert_array_equal(a.J, b.J)

    def test_rejects_nonpositive_samples(self):
        model, x = small_instance()
        with pytest.raises(InvalidInputError):
            fim_monte_carlo(model, x, 0, np.random.default_rng(0))
