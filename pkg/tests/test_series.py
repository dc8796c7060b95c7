import numpy as np
import pytest

from app.exceptions import DomainError, NumericalError
from app.processors.dynamics_processor import f_alpha_prime_array
from app.processors.series_processor import CirclePoints, average, series_processor
from app.schemas.series import SeriesConfig
from app.schemas.sphere import FamilyParams
from app.services.series_service import series_service


@pytest.fixture
def cfg2():
    return SeriesConfig.for_degree(2)


def test_sample_points_are_the_period_n_rotation_numbers():
    points = CirclePoints.sample(-2, 3)
    assert len(points) == 9
    # q^n - 1 = -9, so residues run through -j mod 9
    assert sorted(points.residues.tolist()) == list(range(9))
    moved = points.power(-8)
    assert np.array_equal(np.sort(moved.residues), np.sort(points.residues))


def test_u1_at_one_is_the_geometric_sum(cfg2):
    assert series_service.u1(1.0 + 0j, cfg2) == pytest.approx(2.0 / 3.0, abs=1e-14)


def test_u1_off_the_circle_diverges_for_negative_q(cfg2):
    with pytest.raises(NumericalError):
        series_service.u1(0.9 + 0j, cfg2)
    with pytest.raises(DomainError):
        series_service.u1(0.3 + 0j, cfg2)


def test_points_must_lie_on_the_circle():
    with pytest.raises(DomainError):
        CirclePoints.from_complex(np.array([1.0, 1.1]))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_functional_equations(d):
    cfg = SeriesConfig.for_degree(d)
    assert series_service.u1_equation_residual(cfg) < 1e-10
    assert series_service.u2_equation_residual(cfg) < 1e-10
    assert series_service.reduced_equation_residual(cfg) < 1e-10


@pytest.mark.parametrize("l", [1, 2, 3, -1])
def test_formal_solutions(l):
    assert series_service.formal_solution_residual(l, SeriesConfig.for_degree(3)) < 1e-10


def test_formal_solution_with_exponent_one_is_u1(cfg2):
    points = CirclePoints.uniform(16, offset=0.2)
    u1 = series_processor.u1(points, cfg2.q, cfg2.K)
    assert np.allclose(series_processor.formal_solution(points, cfg2.q, 1, cfg2.K), u1, atol=1e-15)


@pytest.mark.parametrize("q, n", [(-2, 3), (-2, 4), (-2, 5), (-2, 6), (-3, 2), (-3, 3), (-3, 4)])
def test_appendix_sums(q, n):
    records = series_service.appendix_sums(q, n, SeriesConfig.for_degree(-q))
    assert len(records) == 4
    for record in records:
        assert record.residual < 1e-8, record.name


def test_appendix_sums_need_two_periods(cfg2):
    with pytest.raises(DomainError):
        series_service.appendix_sums(-2, 1, cfg2)


def test_vanishing_averages(cfg2):
    records = series_service.vanishing_averages(-2, 5, cfg2)
    assert records
    assert max(r.residual for r in records) < 1e-10


def test_pointwise_tables():
    records = series_service.pointwise_tables(-3, 3, SeriesConfig.for_degree(3))
    assert len(records) == 27
    assert all(r.passed for r in records)


@pytest.mark.parametrize("q, n", [(-2, 3), (-2, 7), (-3, 4), (-5, 2)])
def test_modular_lemma(q, n):
    report = series_service.modular_lemma_check(q, n, 3 * n)
    assert report.passed
    assert report.counterexamples == []


def test_sample_budget_is_enforced():
    with pytest.raises(NumericalError):
        series_service.context(-3, 12)


def test_conjugacy_residual_is_third_order():
    cfg = SeriesConfig.for_degree(3)
    small = np.max(series_service.conjugacy_residuals(0.005, cfg))
    large = np.max(series_service.conjugacy_residuals(0.01, cfg))
    assert large < 1e-3
    assert small < large / 5.0


def test_conjugacy_residual_is_third_order_for_the_quadratic(cfg2):
    small = np.max(series_service.conjugacy_residuals(0.005, cfg2))
    large = np.max(series_service.conjugacy_residuals(0.01, cfg2))
    assert large < 1e-3
    assert small < large / 5.0


def test_squared_modulus_expansion_is_third_order(cfg2):
    small = series_service.squared_modulus_residual(2, 3, 0.01, cfg2)
    large = series_service.squared_modulus_residual(2, 3, 0.04, cfg2)
    assert small < 1e-3
    assert small < large / 8.0


def test_derivative_on_the_motion_is_second_order_accurate():
    q, d, K = -3, 3, 60
    points = CirclePoints.uniform(50, offset=0.1)
    table = series_processor.power_table(points, q, 2 * K + 2)
    sig = table[0]
    u1 = series_processor.u1_from_table(table, q, K)
    u2 = series_processor.u2_from_table(table, q, d, K)

    def gap(alpha):
        moved = sig * (1.0 + u1 * alpha + u2 * alpha ** 2)
        exact = f_alpha_prime_array(moved, alpha, d)
        return np.max(np.abs(series_processor.derivative_on_motion(sig, u1, u2, alpha, q) - exact))

    assert gap(0.01) < 1e-3
    assert gap(0.005) < gap(0.01) / 5.0


def test_average_is_the_plain_mean():
    assert average(np.array([1.0, 2.0, 3.0, 6.0])) == pytest.approx(3.0)


@pytest.mark.slow
def test_second_order_average_sweep():
    sweep = series_service.second_order_sweep(2, 8, D=1.0, alphas=(0.01, 0.02, 0.04))
    assert sweep.expected_coefficient == pytest.approx(2.0)
    assert abs(sweep.slope_fixed_points - 3.0) <= 0.3
    assert sweep.coefficient_error < 0.05


def test_second_order_average_rejects_large_alpha():
    with pytest.raises(DomainError):
        series_service.second_order_average_check(FamilyParams.create(2, 1.0), 4, 1.0, 0.1)


def test_phi_alpha_starts_at_the_identity(cfg2):
    z = np.exp(1j * np.array([0.3, 1.7, 4.0]))
    assert np.allclose(series_service.phi_alpha(z, 0.0, cfg2), z, atol=1e-15)
    with pytest.raises(DomainError):
        series_service.phi_alpha(z, 0.2, cfg2)
