import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Optional

import numpy as np
from scipy import optimize

from app.config import settings
from app.exceptions import DomainError, NumericalError, PottsError
from app.processors.orbit_processor import OrbitBlock, forward_residual, min_separation, solve_block
from app.processors.series_processor import CirclePoints
from app.schemas.dimension import DimensionEstimate, DimensionRecord, IfsBounds, PeriodicOrbitSet
from app.schemas.sphere import FamilyParams
from app.services.classification_service import classification_service

logger = logging.getLogger(__name__)

_MIN_BLOCK = 2048


def _solve_block_args(args):
    return solve_block(*args)


class DimensionService:
    """Periodic points of f_alpha on the quasicircle Julia set and Bowen-type dimension estimates."""

    def __init__(self, workers: Optional[int] = None):
        self.config = settings.periodic
        self.workers = workers

    # ===== PERIODIC POINTS =====

    def continuation_legs(self, alpha: complex) -> int:
        return max(1, math.ceil(abs(alpha) / self.config.alpha_step))

    def check_regime(self, p: FamilyParams, n: int) -> complex:
        alpha = p.alpha
        if not math.isfinite(abs(alpha)) or abs(alpha) > self.config.alpha_ceiling:
            raise DomainError(
                f"|alpha| = {abs(alpha):.4g} is outside the continuation range (<= {self.config.alpha_ceiling})",
                "error.domain.alpha",
            )
        if not 1 <= n <= self.config.n_max(p.d):
            raise DomainError(f"period {n} outside 1..{self.config.n_max(p.d)} for d={p.d}", "error.domain.period")
        if alpha != 0 and not classification_service.is_quasicircle(p):
            raise DomainError(
                f"{p.label()} is not a quasicircle parameter",
                "error.domain.quasicircle",
                {"lambda": str(p.lam)},
            )
        return alpha

    def periodic_points(self, p: FamilyParams, n: int, legs: Optional[int] = None) -> PeriodicOrbitSet:
        alpha = self.check_regime(p, n)
        d = p.d
        legs = legs or self.continuation_legs(alpha)
        seeds = CirclePoints.sample(-d, n)
        workers = self.workers or settings.workers

        blocks = [seeds.residues]
        if workers > 1 and len(seeds) >= 2 * _MIN_BLOCK:
            blocks = np.array_split(seeds.residues, min(workers * 4, len(seeds) // _MIN_BLOCK))
        starts = np.cumsum([1] + [len(b) for b in blocks[:-1]])
        jobs = [
            (block, seeds.modulus, alpha, d, n, legs, self.config.newton_max, int(start))
            for block, start in zip(blocks, starts)
        ]

        logger.info(f"Solving {len(seeds)} period-{n} points for {p.label()} in {len(blocks)} block(s), {legs} leg(s)")
        if len(jobs) == 1:
            results: List[OrbitBlock] = [solve_block(*jobs[0])]
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                results = list(executor.map(_solve_block_args, jobs))

        points = np.concatenate([r.points for r in results])
        multipliers = np.concatenate([r.multipliers for r in results])
        residuals = np.concatenate([r.residuals for r in results])

        worst = int(np.argmax(residuals))
        if residuals[worst] >= self.config.residual_tol:
            raise NumericalError(
                f"fixed-point residual {residuals[worst]:.2e} at j={worst + 1}",
                "error.numerical.residual",
                {"j": worst + 1, "residual": float(residuals[worst])},
            )
        gap, i, j = min_separation(points)
        if gap <= self.config.distinct_tol:
            raise NumericalError(
                f"periodic points j={i + 1} and j={j + 1} collided (distance {gap:.2e}); raise the number of legs",
                "error.numerical.collision",
                {"j": i + 1, "k": j + 1, "legs": legs},
            )
        weakest = int(np.argmin(np.abs(multipliers)))
        if abs(multipliers[weakest]) <= 1.0:
            raise NumericalError(
                f"periodic point j={weakest + 1} is not repelling (|multiplier| = {abs(multipliers[weakest]):.4g})",
                "error.numerical.repelling",
                {"j": weakest + 1},
            )

        return PeriodicOrbitSet(
            d=d,
            n=n,
            alpha_re=alpha.real,
            alpha_im=alpha.imag,
            points=points,
            multipliers=multipliers,
            max_residual=float(residuals[worst]),
            min_separation=gap,
        )

    # ===== PRESSURE AND DIMENSION =====

    def pressure_sum(self, orbits: PeriodicOrbitSet, D: float) -> float:
        """A_n(D) = sum |multiplier|^{-D}; exactly rounded so it does not depend on worker count."""
        return math.fsum(np.power(orbits.moduli, -D).tolist())

    def solve_dimension(self, orbits: PeriodicOrbitSet, lo: Optional[float] = None, hi: Optional[float] = None) -> DimensionEstimate:
        lo = self.config.bracket_lo if lo is None else lo
        hi = self.config.bracket_hi if hi is None else hi

        def excess(D: float) -> float:
            return self.pressure_sum(orbits, D) - 1.0

        if not (excess(lo) > 0.0 > excess(hi)):
            raise NumericalError(
                f"A_n(D) - 1 does not change sign on [{lo}, {hi}]",
                "error.numerical.bracket",
                {"lo": lo, "hi": hi, "at_lo": excess(lo), "at_hi": excess(hi)},
            )
        D, info = optimize.bisect(excess, lo, hi, xtol=self.config.bisect_tol, full_output=True)
        tol = self.config.bisect_tol
        return DimensionEstimate(
            D=D,
            n_used=orbits.n,
            residual=abs(excess(D)),
            bracket=(max(lo, D - tol), min(hi, D + tol)),
            iterations=info.iterations,
            alpha_re=orbits.alpha_re,
            alpha_im=orbits.alpha_im,
        )

    def bowen_dimension(self, p: FamilyParams, n: int) -> DimensionEstimate:
        orbits = self.periodic_points(p, n)
        estimate = self.solve_dimension(orbits)
        logger.info(f"Bowen dimension for {p.label()} at n={n}: D={estimate.D:.12f}")
        return estimate

    def asymptotic_dimension(self, p: FamilyParams) -> float:
        if p.is_degenerate:
            raise DomainError("asymptotic dimension needs lambda != 0", "error.domain.lambda_zero")
        return 1.0 + abs(p.lam) ** (-2.0 / (p.d + 1)) / (4.0 * math.log(p.d))

    def julia_circle_deviation(self, p: FamilyParams, n_samples: int) -> float:
        """max ||z| - 1| over the smallest periodic sample with at least n_samples points."""
        n = 1
        while abs((-p.d) ** n - 1) < n_samples and n < self.config.n_max(p.d):
            n += 1
        if abs(p.alpha) == 0:
            return 0.0
        orbits = self.periodic_points(p, n)
        return float(np.max(np.abs(np.abs(orbits.points) - 1.0)))

    # ===== BOUNDS AND FITS =====

    def ifs_bounds(self, p: FamilyParams, n: int, D: Optional[float] = None) -> IfsBounds:
        """
        Per-branch contraction extrema of f^{-n}: the period-(n+1) points are
        assigned to the angularly nearest period-n point; each branch gives
        b = 1/max|(f^n)'| and c = 1/min|(f^n)'|, and s_lower, s_upper solve
        sum b^s = 1 and sum c^s = 1.
        """
        coarse = self.periodic_points(p, n)
        fine = self.periodic_points(p, n + 1)
        alpha, d = coarse.alpha, p.d

        _, fine_derivative = forward_residual(fine.points, alpha, d, n)
        fine_moduli = np.abs(fine_derivative)

        coarse_angles = np.angle(coarse.points)
        order = np.argsort(coarse_angles)
        sorted_angles = coarse_angles[order]
        fine_angles = np.angle(fine.points)
        slot = np.searchsorted(sorted_angles, fine_angles) % sorted_angles.size
        left = (slot - 1) % sorted_angles.size
        dist_right = np.abs(np.angle(np.exp(1j * (fine_angles - sorted_angles[slot]))))
        dist_left = np.abs(np.angle(np.exp(1j * (fine_angles - sorted_angles[left]))))
        branch = order[np.where(dist_right <= dist_left, slot, left)]

        high = coarse.moduli.copy()
        low = coarse.moduli.copy()
        np.maximum.at(high, branch, fine_moduli)
        np.minimum.at(low, branch, fine_moduli)

        def similarity_dimension(ratios: np.ndarray) -> float:
            return optimize.bisect(
                lambda s: math.fsum(np.power(ratios, s).tolist()) - 1.0,
                0.25,
                4.0,
                xtol=self.config.bisect_tol,
            )

        s_lower = similarity_dimension(1.0 / high)
        s_upper = similarity_dimension(1.0 / low)
        return IfsBounds(n=n, branches=len(coarse), s_lower=s_lower, s_upper=s_upper, D=D)

    def fit_error_constant(self, records: Iterable[DimensionRecord]) -> float:
        """C = max |D_bowen - D_formula| / |alpha|^3 over the records."""
        ratios = [r.error / r.alpha_modulus ** 3 for r in records if r.alpha_modulus > 0]
        if not ratios:
            raise DomainError("no records with alpha != 0", "error.domain.records")
        return max(ratios)

    def dimension_record(self, p: FamilyParams, n: int, deviation_samples: int = 0) -> DimensionRecord:
        try:
            estimate = self.bowen_dimension(p, n)
            orbits_deviation = 0.0
            if deviation_samples:
                orbits_deviation = self.julia_circle_deviation(p, deviation_samples)
        except PottsError:
            raise
        except Exception as e:
            logger.error(f"Dimension computation failed for {p.label()}: {e}")
            raise NumericalError(f"dimension computation failed: {e}", "error.numerical.dimension")
        return DimensionRecord(
            d=p.d,
            lam_re=p.lam_re,
            lam_im=p.lam_im,
            alpha_modulus=abs(p.alpha),
            n=n,
            D_bowen=estimate.D,
            D_formula=self.asymptotic_dimension(p),
            residual=estimate.residual,
            deviation=orbits_deviation,
        )


dimension_service = DimensionService()
