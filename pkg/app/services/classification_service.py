import cmath
import logging
import math
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from app.config import settings
from app.exceptions import DomainError, IndeterminateError, NumericalError, PottsError
from app.processors.basin_processor import (
    INFINITY,
    ONE,
    UNDETERMINED,
    basin_processor,
)
from app.processors.dynamics_processor import dynamics_processor, t_raw, u_raw
from app.schemas.sphere import FamilyParams, SpherePoint
from app.schemas.verdict import (
    BasinTestConfig,
    BasinVerdict,
    CenterResult,
    CriticalOrbitReport,
    EquivalenceReport,
    FixedPointStability,
    GreenValue,
    ParamVerdict,
    PointVerdict,
    RealFixedPoint,
    RealFixedPointReport,
    VerdictKind,
)

logger = logging.getLogger(__name__)

_CODES = {
    ONE: BasinVerdict.ATTRACTED_TO_ONE,
    INFINITY: BasinVerdict.ATTRACTED_TO_INFINITY,
    UNDETERMINED: BasinVerdict.UNDETERMINED,
}

# ascent starts beyond this chart modulus, or whose U-image is this close to the center, are shifted
_CHART_LIMIT = 1e10
_PRECRITICAL_EPS = 1e-12
_START_SHIFT = 1e-6


def _chart_coordinate(z: SpherePoint, target: int) -> complex:
    return z.offset_from_one() if target == ONE else z.reciprocal()


@lru_cache(maxsize=4096)
def _trap_geometry(lam: complex, d: int, target: int, green_eps: float, max_iter: int) -> Tuple[float, float]:
    """(certified radius, Green ceiling) for the target's chart; cached per parameter."""
    samples = settings.basin.certify_samples
    if target == ONE:
        forbidden = [lam / (cmath.exp(2j * math.pi * k / d) - 1.0) for k in range(1, d)]
    else:
        forbidden = []
        if lam != 1:
            root = cmath.exp(cmath.log(1.0 - lam) / d)
            for k in range(d):
                mu = root * cmath.exp(2j * math.pi * k / d)
                omega = (mu + lam - 1.0) / (mu - 1.0)
                if omega != 0:
                    forbidden.append(1.0 / omega)
    radius = basin_processor.certified_radius(lam, d, target, samples, forbidden)
    ceiling = basin_processor.green_ceiling(lam, d, target, radius, samples, green_eps, max_iter)
    return radius, ceiling


class ClassificationService:
    """Basin membership, capture depth, Green function, centers and real fixed points."""

    def __init__(self):
        self.center_config = settings.center
        self.real_config = settings.real_axis

    # ===== POINTS =====

    def classify_point(self, p: FamilyParams, z: SpherePoint, cfg: Optional[BasinTestConfig] = None) -> PointVerdict:
        cfg = cfg or BasinTestConfig()
        trap = basin_processor.classify(p.lam, p.d, z.to_complex(), cfg.attract_eps, cfg.escape_R, cfg.max_iter)
        modulus = abs(trap.last) if cmath.isfinite(trap.last) else math.inf
        return PointVerdict(verdict=_CODES[trap.code], iterations=trap.iterations, exit_modulus=modulus)

    def in_immediate_basin(
        self,
        p: FamilyParams,
        z: SpherePoint,
        target: int,
        cfg: Optional[BasinTestConfig] = None,
        quasicircle: Optional[bool] = None,
        critical: bool = False,
    ) -> Optional[bool]:
        """
        Membership of z in the Fatou component of `target` (1 or infinity).
        None when the answer could not be determined within budget.
        """
        cfg = cfg or BasinTestConfig()
        verdict = self.classify_point(p, z, cfg).verdict
        if verdict == BasinVerdict.UNDETERMINED:
            return None
        if verdict != _CODES[target]:
            return False
        if quasicircle is None:
            quasicircle = self._zero_in_basin_one(p, cfg)
        if quasicircle:
            # full basins are the immediate ones
            return True
        return self._ascend(p, self._ascent_start(p, z, target), target, cfg, critical)

    def _ascent_start(self, p: FamilyParams, z: SpherePoint, target: int) -> complex:
        """
        Chart coordinate the ascent starts from. A point the chart cannot hold,
        or one that U sends onto the center itself, sits where G is infinite or
        undefined; it is moved off by a small shift first.
        """
        u0 = _chart_coordinate(z, target)
        if u0 == 0:
            return u0
        w = z.to_complex()
        image = u_raw(w, p.lam, p.d)
        if cmath.isnan(image):
            gap = math.inf
        elif target == ONE:
            gap = abs(image - 1.0)
        else:
            gap = 0.0 if cmath.isinf(image) else (math.inf if image == 0 else 1.0 / abs(image))
        if cmath.isfinite(u0) and abs(u0) < _CHART_LIMIT and gap >= _PRECRITICAL_EPS:
            return u0
        shifted = SpherePoint.finite(w + _START_SHIFT * (1.0 + abs(w)) * cmath.exp(1j * math.pi / 5))
        logger.debug(f"Ascent start {w} moved to {shifted.to_complex()} for {p.label()}")
        return _chart_coordinate(shifted, target)

    def _ascend(
        self, p: FamilyParams, u0: complex, target: int, cfg: BasinTestConfig, critical: bool = False
    ) -> Optional[bool]:
        radius, ceiling = _trap_geometry(p.lam, p.d, target, cfg.green_eps, cfg.max_iter)
        result = basin_processor.ascend(
            u0,
            p.lam,
            p.d,
            target,
            radius,
            ceiling,
            cfg.green_eps,
            cfg.max_iter,
            cfg.ascent_max_steps,
            cfg.ascent_max_halvings,
            nudge=critical,
        )
        return result.member

    def _zero_in_basin_one(self, p: FamilyParams, cfg: BasinTestConfig) -> Optional[bool]:
        verdict = self.classify_point(p, SpherePoint.finite(0.0), cfg).verdict
        if verdict == BasinVerdict.UNDETERMINED:
            return None
        if verdict != BasinVerdict.ATTRACTED_TO_ONE:
            return False
        return self._ascend(p, -1.0 + 0.0j, ONE, cfg)

    # ===== PARAMETERS =====

    def classify_parameter(self, p: FamilyParams, cfg: Optional[BasinTestConfig] = None) -> ParamVerdict:
        cfg = cfg or BasinTestConfig()
        if p.is_degenerate:
            return ParamVerdict.degenerate()
        lam, d = p.lam, p.d

        trap = basin_processor.classify(lam, d, 0.0 + 0.0j, cfg.attract_eps, cfg.escape_R, cfg.max_iter)
        if trap.code == UNDETERMINED:
            return ParamVerdict.non_escaping(trap.iterations)

        # T^k(0) lies in the U-basin of 1 exactly for k of this parity
        start = 0 if trap.code == ONE else 1
        radius, _ = _trap_geometry(lam, d, ONE, cfg.green_eps, cfg.max_iter)

        orbit = [0.0 + 0.0j]
        limit = 2 * cfg.max_iter + 2
        for k in range(start, limit + 1, 2):
            while len(orbit) <= k:
                orbit.append(t_raw(orbit[-1], lam, d))
            w = orbit[k]
            if cmath.isfinite(w) and abs(w - 1.0) < radius:
                return ParamVerdict.capture(k, trap.iterations, w)
            if not cmath.isfinite(w):
                continue
            if self._ascend(p, w - 1.0, ONE, cfg):
                return ParamVerdict.capture(k, trap.iterations, w)
        raise NumericalError(
            f"orbit of 0 never reached the certified disk for {p.label()}",
            "error.numerical.depth",
            {"lambda": str(lam)},
        )

    def is_quasicircle(self, p: FamilyParams, cfg: Optional[BasinTestConfig] = None) -> bool:
        verdict = self.classify_parameter(p, cfg)
        return verdict.kind == VerdictKind.CAPTURE_DEPTH and verdict.depth == 0

    def equiv_condition_check(self, p: FamilyParams, cfg: Optional[BasinTestConfig] = None) -> EquivalenceReport:
        cfg = cfg or BasinTestConfig()
        if p.is_degenerate:
            raise DomainError("equivalence check needs lambda != 0", "error.domain.lambda_zero")
        critical = dynamics_processor.critical_data(p)

        zero_in_one = self._zero_in_basin_one(p, cfg)
        shortcut = zero_in_one if zero_in_one is not None else False

        def all_members(points: List[SpherePoint], target: int) -> Optional[bool]:
            answers = [
                self.in_immediate_basin(p, pt, target, cfg, quasicircle=shortcut, critical=True)
                for pt in points
            ]
            if any(a is False for a in answers):
                return False
            if any(a is None for a in answers):
                return None
            return True

        xi_ok = all_members(critical.xi, INFINITY)
        omega_ok = all_members(critical.omega, ONE)
        value_ok = self.in_immediate_basin(
            p, SpherePoint.finite(1.0 - p.lam), INFINITY, cfg, quasicircle=shortcut, critical=True
        )

        verdict = self.classify_parameter(p, cfg)
        quasi = None if verdict.kind == VerdictKind.NON_ESCAPING and zero_in_one is None else (
            verdict.kind == VerdictKind.CAPTURE_DEPTH and verdict.depth == 0
        )
        report = EquivalenceReport(
            quasicircle=quasi,
            xi_in_basin_infinity=xi_ok,
            omega_in_basin_one=omega_ok,
            critical_value_in_basin_infinity=value_ok,
            zero_in_basin_one=zero_in_one,
        )
        logger.debug(f"Equivalence conditions for {p.label()}: {report.conditions}")
        return report

    # ===== GREEN FUNCTION =====

    def green_function(self, p: FamilyParams, z: SpherePoint, k_max: Optional[int] = None, cfg: Optional[BasinTestConfig] = None) -> GreenValue:
        cfg = cfg or BasinTestConfig()
        k_max = k_max or cfg.max_iter
        offset = z.offset_from_one()
        if cmath.isfinite(offset) and abs(offset) < cfg.attract_eps:
            return GreenValue(value=math.inf, is_center=True, k_used=0)
        verdict = self.classify_point(p, z, cfg).verdict
        if verdict != BasinVerdict.ATTRACTED_TO_ONE:
            raise IndeterminateError(
                f"point {z.to_complex()} is not attracted to 1 ({verdict.value})",
                "error.indeterminate.green",
            )
        sample = basin_processor.green(offset, p.lam, p.d, ONE, cfg.attract_eps, k_max, increment_tol=1e-6)
        if sample is None:
            raise IndeterminateError(
                f"green function did not converge within {k_max} iterates",
                "error.indeterminate.green",
            )
        if not math.isfinite(sample.value):
            return GreenValue(value=math.inf, is_center=True, k_used=sample.iterations)
        return GreenValue(
            value=sample.value,
            k_used=sample.iterations,
            increment=abs(sample.value - sample.previous),
        )

    # ===== CENTERS =====

    def _orbit_residual(self, lam: complex, d: int, n: int) -> complex:
        w = 0.0 + 0.0j
        for _ in range(n):
            w = t_raw(w, lam, d)
        return w - 1.0

    def find_center(self, p0: FamilyParams, n: int, seed: complex, cfg: Optional[BasinTestConfig] = None) -> CenterResult:
        if n < 1:
            raise DomainError("center depth must be >= 1", "error.domain.depth")
        conf = self.center_config
        d = p0.d
        lam = complex(seed)
        h = conf.newton_step
        residual = self._orbit_residual(lam, d, n)
        iterations = 0
        for iterations in range(1, conf.max_newton + 1):
            if cmath.isfinite(residual) and abs(residual) < conf.tolerance:
                break
            slope = (self._orbit_residual(lam + h, d, n) - self._orbit_residual(lam - h, d, n)) / (2.0 * h)
            if not cmath.isfinite(slope) or slope == 0 or not cmath.isfinite(residual):
                break
            lam = lam - residual / slope
            residual = self._orbit_residual(lam, d, n)

        converged = cmath.isfinite(residual) and abs(residual) < conf.tolerance
        result = CenterResult(
            lam_re=lam.real,
            lam_im=lam.imag,
            n=n,
            residual=abs(residual) if cmath.isfinite(residual) else math.inf,
            iterations=iterations,
            converged=converged,
        )
        if not converged:
            raise NumericalError(
                f"center search for depth {n} from seed {seed} did not converge (residual {result.residual:.3e})",
                "error.numerical.center",
                {"residual": result.residual, "lambda": str(lam)},
            )
        if lam != 0:
            verdict = self.classify_parameter(FamilyParams.create(d, lam), cfg)
            result.verdict = verdict.label
        logger.info(f"Center of depth {n} at lambda={lam:.10g} (residual {result.residual:.2e})")
        return result

    def enumerate_centers(
        self,
        d: int,
        n: int,
        window: Tuple[float, float, float, float],
        grid: int,
        cfg: Optional[BasinTestConfig] = None,
    ) -> List[CenterResult]:
        """Seed find_center from every grid cell whose parameter has capture depth n."""
        re_min, re_max, im_min, im_max = window
        found: List[CenterResult] = []
        for i in range(grid):
            for j in range(grid):
                lam = complex(
                    re_min + (j + 0.5) * (re_max - re_min) / grid,
                    im_min + (i + 0.5) * (im_max - im_min) / grid,
                )
                if lam == 0:
                    continue
                verdict = self.classify_parameter(FamilyParams.create(d, lam), cfg)
                if verdict.depth != n:
                    continue
                try:
                    center = self.find_center(FamilyParams.create(d, lam), n, lam, cfg)
                except PottsError:
                    continue
                if center.verdict != f"CaptureDepth({n})":
                    continue
                if all(abs(center.lam - c.lam) > self.center_config.dedup_tol for c in found):
                    found.append(center)
        found.sort(key=lambda c: (c.lam_re, c.lam_im))
        return found

    # ===== REAL AXIS =====

    def real_fixed_points(self, p: FamilyParams, interval: Tuple[float, float]) -> RealFixedPointReport:
        if p.lam_im != 0.0:
            raise DomainError("real fixed points need a real lambda", "error.domain.real_lambda")
        a, b = interval
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise DomainError(f"invalid interval [{a}, {b}]", "error.domain.interval")
        lam, d = p.lam, p.d
        conf = self.real_config

        def gap(x: float) -> float:
            value = u_raw(complex(x), lam, d)
            return value.real - x if cmath.isfinite(value) else math.inf

        grid = np.linspace(a, b, conf.grid_points)
        values = np.array([gap(x) for x in grid])
        roots: List[float] = []
        change_indices: List[int] = []
        for i, x in enumerate(grid):
            if values[i] == 0.0:
                roots.append(float(x))
                change_indices.append(i)
        for i in range(len(grid) - 1):
            fa, fb = values[i], values[i + 1]
            if not (math.isfinite(fa) and math.isfinite(fb)) or fa == 0.0 or fb == 0.0:
                continue
            if fa * fb < 0:
                root = optimize.bisect(gap, grid[i], grid[i + 1], xtol=conf.bisect_tol)
                # a sign change across a pole is not a root
                if abs(gap(root)) < 1e-6 * (1.0 + abs(root)):
                    roots.append(float(root))
                    change_indices.append(i)
        change_indices.sort()
        adjacent = any(j - i <= 1 for i, j in zip(change_indices, change_indices[1:]))

        points: List[RealFixedPoint] = []
        for x in sorted(set(roots)):
            multiplier = dynamics_processor.eval_U_prime(p, SpherePoint.finite(x)).real
            if abs(abs(multiplier) - 1.0) <= conf.parabolic_tol:
                stability = FixedPointStability.PARABOLIC
            elif abs(multiplier) < 1.0:
                stability = FixedPointStability.ATTRACTING
            else:
                stability = FixedPointStability.REPELLING
            points.append(RealFixedPoint(x=x, multiplier=multiplier, stability=stability))

        increasing, min_increment = None, None
        ray = grid[grid >= 1.0]
        if lam.real > 0 and ray.size > 1:
            images = np.array([u_raw(complex(x), lam, d).real for x in ray])
            min_increment = float(np.min(np.diff(images)))
            increasing = min_increment >= -1e-12

        return RealFixedPointReport(
            interval=(a, b),
            points=points,
            adjacent_sign_changes=adjacent,
            increasing_on_ray=increasing,
            min_increment=min_increment,
        )

    # ===== CRITICAL ORBITS =====

    def critical_orbit(self, p: FamilyParams) -> CriticalOrbitReport:
        """Residuals of xi -> 1 -> inf -> 1 and omega -> 1-lambda -> 0 -> (1-lambda)^d."""
        data = dynamics_processor.critical_data(p)
        lam, d = p.lam, p.d
        one = SpherePoint.finite(1.0)
        residuals: List[Tuple[str, float]] = []
        for k, xi in enumerate(data.xi):
            image = dynamics_processor.eval_T(p, xi)
            residuals.append((f"T(xi_{k}) = 1", image.chordal_distance(one)))
        residuals.append(("T(1) = inf", dynamics_processor.eval_T(p, one).chordal_distance(SpherePoint.infinity())))
        residuals.append(("T(inf) = 1", dynamics_processor.eval_T(p, SpherePoint.infinity()).chordal_distance(one)))
        target = SpherePoint.finite(1.0 - lam)
        for k, omega in enumerate(data.omega):
            image = dynamics_processor.eval_T(p, omega)
            residuals.append((f"T(omega_{k}) = 1-lambda", image.chordal_distance(target)))
        residuals.append(("T(1-lambda) = 0", dynamics_processor.eval_T(p, target).chordal_distance(SpherePoint.finite(0.0))))
        expected = SpherePoint.finite((1.0 - lam) ** d)
        residuals.append(("T(0) = (1-lambda)^d", dynamics_processor.eval_T(p, SpherePoint.finite(0.0)).chordal_distance(expected)))
        return CriticalOrbitReport(residuals=residuals)


classification_service = ClassificationService()
