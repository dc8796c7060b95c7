import pytest

from app.exceptions import DomainError, IndeterminateError
from app.processors.basin_processor import INFINITY, ONE, basin_processor
from app.schemas.sphere import FamilyParams, SpherePoint
from app.schemas.verdict import BasinTestConfig, BasinVerdict, FixedPointStability, VerdictKind
from app.services.classification_service import classification_service
from tests.conftest import LAMBDA_DEPTH_THREE, LAMBDA_NON_ESCAPING, LAMBDA_QUASICIRCLE, LAMBDA_SIEGEL


def test_quasicircle_parameter_has_depth_zero(basin_cfg):
    verdict = classification_service.classify_parameter(FamilyParams.create(2, LAMBDA_QUASICIRCLE), basin_cfg)
    assert verdict.kind == VerdictKind.CAPTURE_DEPTH
    assert verdict.depth == 0
    assert verdict.label == "CaptureDepth(0)"


def test_capture_domain_of_depth_three(basin_cfg):
    verdict = classification_service.classify_parameter(FamilyParams.create(2, LAMBDA_DEPTH_THREE), basin_cfg)
    assert verdict.label == "CaptureDepth(3)"


@pytest.mark.parametrize("lam", [LAMBDA_NON_ESCAPING, LAMBDA_SIEGEL])
def test_non_escaping_parameters(lam, basin_cfg):
    verdict = classification_service.classify_parameter(FamilyParams.create(2, lam), basin_cfg)
    assert verdict.kind == VerdictKind.NON_ESCAPING
    assert verdict.depth is None


def test_lambda_zero_is_degenerate():
    verdict = classification_service.classify_parameter(FamilyParams.create(2, 0.0, degenerate=True))
    assert verdict.kind == VerdictKind.DEGENERATE


@pytest.mark.parametrize("lam", [LAMBDA_QUASICIRCLE, LAMBDA_DEPTH_THREE, LAMBDA_NON_ESCAPING])
def test_verdicts_are_stable_under_a_larger_budget(lam, basin_cfg):
    p = FamilyParams.create(2, lam)
    base = classification_service.classify_parameter(p, basin_cfg)
    assert classification_service.classify_parameter(p, basin_cfg.doubled()).label == base.label
    assert classification_service.classify_parameter(p, basin_cfg.tightened()).label == base.label


def test_quasicircle_predicate(basin_cfg):
    assert classification_service.is_quasicircle(FamilyParams.create(2, LAMBDA_QUASICIRCLE), basin_cfg)
    assert not classification_service.is_quasicircle(FamilyParams.create(2, LAMBDA_DEPTH_THREE), basin_cfg)


def test_equivalent_conditions_agree_in_the_quasicircle_locus(basin_cfg):
    report = classification_service.equiv_condition_check(FamilyParams.create(2, LAMBDA_QUASICIRCLE), basin_cfg)
    assert report.all_equal
    assert report.quasicircle is True


def test_free_critical_points_avoid_the_wrong_basin(quadratic, basin_cfg):
    zero = classification_service.classify_point(quadratic, SpherePoint.finite(0.0), basin_cfg)
    value = classification_service.classify_point(quadratic, SpherePoint.finite(1.0 - quadratic.lam), basin_cfg)
    assert zero.verdict == BasinVerdict.ATTRACTED_TO_ONE
    assert value.verdict == BasinVerdict.ATTRACTED_TO_INFINITY
    assert classification_service.in_immediate_basin(quadratic, SpherePoint.finite(0.0), INFINITY, basin_cfg) is False
    assert classification_service.in_immediate_basin(quadratic, SpherePoint.finite(1.0 - quadratic.lam), ONE, basin_cfg) is False


def test_green_function_scales_by_d_along_orbits(quadratic):
    g0 = classification_service.green_function(quadratic, SpherePoint.finite(0.0))
    # U(0) = T(9) = (1 + 4/8)^2
    g1 = classification_service.green_function(quadratic, SpherePoint.finite(2.25))
    assert 0 < g0.value < float("inf")
    assert not g0.is_center
    assert g1.value == pytest.approx(2.0 * g0.value, rel=1e-5)


def test_green_function_is_infinite_at_the_center(quadratic):
    assert classification_service.green_function(quadratic, SpherePoint.finite(1.0)).is_center


def test_green_function_needs_the_basin_of_one(quadratic):
    with pytest.raises(IndeterminateError):
        classification_service.green_function(quadratic, SpherePoint.finite(-3.0))


def test_center_of_depth_one_is_two():
    center = classification_service.find_center(FamilyParams.create(2, 1.5), 1, 1.5 + 0.0j)
    assert center.converged
    assert abs(center.lam - 2.0) < 1e-10
    assert center.residual < 1e-10


def test_center_of_depth_three_near_the_reference_parameter():
    seed = 1.32 + 1.63j
    center = classification_service.find_center(FamilyParams.create(2, seed), 3, seed)
    assert abs(center.lam - LAMBDA_DEPTH_THREE) < 1e-4
    assert center.residual < 1e-10
    assert center.verdict == "CaptureDepth(3)"


def test_center_depth_must_be_positive(quadratic):
    with pytest.raises(DomainError):
        classification_service.find_center(quadratic, 0, 4.0)


def test_real_fixed_points_for_small_positive_lambda():
    report = classification_service.real_fixed_points(FamilyParams.create(2, 0.5), (1.0, 100.0))
    beyond_one = [fp for fp in report.points if fp.x > 1.0]
    assert beyond_one
    assert beyond_one[-1].multiplier >= 1.0 - 1e-9
    assert report.increasing_on_ray is True


def test_real_fixed_points_are_sorted_and_classified():
    report = classification_service.real_fixed_points(FamilyParams.create(2, 4.0), (1.0, 100.0))
    xs = [fp.x for fp in report.points]
    assert xs == sorted(xs)
    assert any(fp.x > 1.0 for fp in report.points)
    for fp in report.points:
        if fp.stability == FixedPointStability.REPELLING:
            assert abs(fp.multiplier) > 1.0


def test_real_fixed_points_need_a_real_lambda():
    with pytest.raises(DomainError):
        classification_service.real_fixed_points(FamilyParams.create(2, 1.0 + 1.0j), (1.0, 10.0))


def test_enumerate_centers_deduplicates_seeds():
    centers = classification_service.enumerate_centers(2, 1, (1.95, 2.05, -0.05, 0.05), 2)
    assert len(centers) == 1
    assert abs(centers[0].lam - 2.0) < 1e-10


def test_critical_orbit_rejects_lambda_zero():
    with pytest.raises(DomainError):
        classification_service.critical_orbit(FamilyParams.create(2, 0.0, degenerate=True))


@pytest.mark.parametrize("lam", [2.0, 2.05])
def test_depth_one_parameters_fail_every_condition(lam, basin_cfg):
    p = FamilyParams.create(2, lam)
    assert classification_service.classify_parameter(p, basin_cfg).label == "CaptureDepth(1)"
    report = classification_service.equiv_condition_check(p, basin_cfg)
    assert report.conditions == [False] * 5


def test_precritical_point_of_the_center_is_outside_the_immediate_basin(basin_cfg):
    # at lambda = 2, T(0) = 1 so U sends 0 straight onto infinity
    p = FamilyParams.create(2, 2.0)
    assert classification_service.in_immediate_basin(p, SpherePoint.finite(0.0), INFINITY, basin_cfg) is False
    assert classification_service.in_immediate_basin(p, SpherePoint.infinity(), INFINITY, basin_cfg) is True


def test_large_lambda_cubic_satisfies_every_condition(basin_cfg):
    report = classification_service.equiv_condition_check(FamilyParams.create(3, 1e6), basin_cfg)
    assert report.conditions == [True] * 5


@pytest.mark.parametrize(
    "lam", [4.0, 30.0, 2.0, 1.95, 2.0 + 0.05j, 2.1 - 0.05j, 1.9 + 0.1j, LAMBDA_DEPTH_THREE]
)
def test_equivalent_conditions_never_disagree(lam, basin_cfg):
    report = classification_service.equiv_condition_check(FamilyParams.create(2, lam), basin_cfg)
    assert report.undetermined or report.all_equal


@pytest.mark.parametrize("d, lam", [(2, 30.0), (3, 1e4)])
def test_critical_points_of_a_quasicircle_parameter_stay_out_of_the_other_basin(d, lam, basin_cfg):
    p = FamilyParams.create(d, lam)
    assert classification_service.is_quasicircle(p, basin_cfg)
    assert classification_service.in_immediate_basin(p, SpherePoint.finite(0.0), INFINITY, basin_cfg) is False
    assert classification_service.in_immediate_basin(p, SpherePoint.finite(1.0 - p.lam), ONE, basin_cfg) is False


def test_ascent_uses_the_callers_budget(monkeypatch):
    cfg = BasinTestConfig(max_iter=3000, green_eps=1e-9, ascent_max_steps=250, ascent_max_halvings=40)
    original = basin_processor.ascend
    seen = []

    def recording_ascend(*args, **kwargs):
        seen.append(args[6:10])
        return original(*args, **kwargs)

    monkeypatch.setattr(basin_processor, "ascend", recording_ascend)
    classification_service.classify_parameter(FamilyParams.create(2, LAMBDA_DEPTH_THREE), cfg)
    assert seen
    assert all(budget == (1e-9, 3000, 250, 40) for budget in seen)


def test_doubled_config_doubles_the_ascent_budget(basin_cfg):
    doubled = basin_cfg.doubled()
    assert doubled.max_iter == 2 * basin_cfg.max_iter
    assert doubled.ascent_max_steps == 2 * basin_cfg.ascent_max_steps
    assert doubled.green_eps == basin_cfg.green_eps
    assert basin_cfg.tightened().green_eps == pytest.approx(basin_cfg.green_eps / 10.0)
