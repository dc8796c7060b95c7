import math

import numpy as np
import pytest

from app.exceptions import DomainError
from app.schemas.dimension import DimensionRecord
from app.schemas.sphere import FamilyParams
from app.services.classification_service import classification_service
from app.services.dimension_service import DimensionService, dimension_service
from app.services.series_service import series_service


@pytest.mark.parametrize("d, n", [(2, 4), (2, 6), (2, 8), (2, 10), (3, 4), (3, 6)])
def test_unperturbed_dimension_has_a_closed_form(d, n):
    estimate = dimension_service.bowen_dimension(FamilyParams.from_alpha(d, 0.0), n)
    expected = math.log(abs((-d) ** n - 1)) / (n * math.log(d))
    assert abs(estimate.D - expected) < 1e-12
    assert abs(estimate.D - 1.0) <= 2.0 * 2.0 / (n * d ** n * math.log(d))


def test_periodic_points_for_large_lambda():
    orbits = dimension_service.periodic_points(FamilyParams.create(2, 1000.0), 10)
    assert len(orbits) == 1023
    assert orbits.max_residual < 1e-10
    assert np.all(orbits.moduli > 1.0)
    assert orbits.min_separation > 1e-8


def test_ifs_bounds_sandwich_the_dimension():
    p = FamilyParams.create(2, 1000.0)
    estimate = dimension_service.bowen_dimension(p, 10)
    bounds = dimension_service.ifs_bounds(p, 10, estimate.D)
    assert bounds.branches == 1023
    assert bounds.s_lower <= bounds.s_upper
    assert bounds.sandwiched


def test_asymptotic_formula_value():
    p = FamilyParams.create(2, 1000.0)
    assert dimension_service.asymptotic_dimension(p) == pytest.approx(1.003607, abs=1e-6)


def test_parameters_outside_the_continuation_range_are_rejected():
    with pytest.raises(DomainError):
        dimension_service.periodic_points(FamilyParams.create(2, 10.0), 4)
    with pytest.raises(DomainError):
        dimension_service.periodic_points(FamilyParams.create(2, 1000.0), 20)


def test_continuation_legs():
    assert dimension_service.continuation_legs(0.0) == 1
    assert dimension_service.continuation_legs(0.1) == 5


def test_fit_error_constant_needs_records():
    with pytest.raises(DomainError):
        dimension_service.fit_error_constant([])


def test_dimension_record_row_matches_header():
    record = dimension_service.dimension_record(FamilyParams.create(2, 1e4), 8)
    assert len(record.row()) == len(DimensionRecord.header())
    assert record.D_formula == pytest.approx(1.0 + 1e4 ** (-2.0 / 3.0) / (4.0 * math.log(2.0)))
    assert record.alpha_modulus == pytest.approx(1e4 ** (-1.0 / 3.0))


def test_worker_count_does_not_change_the_points():
    p = FamilyParams.create(2, 5000.0)
    serial = DimensionService(workers=1).periodic_points(p, 13)
    pooled = DimensionService(workers=2).periodic_points(p, 13)
    assert np.array_equal(serial.points, pooled.points)
    assert dimension_service.pressure_sum(serial, 1.0) == dimension_service.pressure_sum(pooled, 1.0)


@pytest.mark.slow
@pytest.mark.parametrize("d, lam, n", [(2, 1e3, 12), (2, 1e4, 12), (2, 1e5, 12), (3, 1e4, 9), (3, 1e6, 9)])
def test_bowen_dimension_follows_the_asymptotic_formula(d, lam, n):
    p = FamilyParams.create(d, lam)
    estimate = dimension_service.bowen_dimension(p, n)
    assert abs(estimate.D - dimension_service.asymptotic_dimension(p)) <= 3.0 * lam ** (-3.0 / (d + 1))


@pytest.mark.slow
def test_julia_set_approaches_the_unit_circle():
    deviations = [
        dimension_service.julia_circle_deviation(FamilyParams.create(2, lam), 1000)
        for lam in (1e2, 1e3, 1e4, 1e5)
    ]
    assert all(b < a for a, b in zip(deviations, deviations[1:]))
    assert deviations[-1] < 0.05


@pytest.mark.slow
def test_second_order_coefficient_from_one_alpha():
    record = series_service.second_order_coefficient(2, 8, 1.0, 0.02)
    assert record.expected_re == pytest.approx(2.0)
    assert record.passed


def test_multipliers_repel_at_nearly_full_strength():
    orbits = dimension_service.periodic_points(FamilyParams.create(2, 1e5), 10)
    assert np.all(orbits.moduli >= 0.5 * 2 ** 10)


def test_successive_estimates_contract():
    p = FamilyParams.create(2, 1e5)
    estimates = [dimension_service.bowen_dimension(p, n).D for n in range(6, 11)]
    steps = [abs(b - a) for a, b in zip(estimates, estimates[1:])]
    assert all(later < earlier for earlier, later in zip(steps, steps[1:]))


def test_regime_check_accepts_a_quasicircle_parameter():
    alpha = dimension_service.check_regime(FamilyParams.create(2, 1000.0), 4)
    assert alpha == pytest.approx(0.1)


def test_parameters_off_the_quasicircle_locus_are_rejected(monkeypatch):
    monkeypatch.setattr(classification_service, "is_quasicircle", lambda p, cfg=None: False)
    with pytest.raises(DomainError):
        dimension_service.check_regime(FamilyParams.create(2, 1000.0), 4)
    # alpha = 0 stands for lambda = infinity and needs no classification
    assert dimension_service.check_regime(FamilyParams.from_alpha(2, 0.0), 4) == 0
