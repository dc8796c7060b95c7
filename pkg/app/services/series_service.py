import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import stats

from app.config import settings
from app.exceptions import DomainError, NumericalError, PottsError
from app.processors.dynamics_processor import f_alpha_array, f_alpha_prime_array
from app.processors.series_processor import CirclePoints, average, series_processor
from app.schemas.series import (
    AverageContext,
    IdentityRecord,
    ModularLemmaReport,
    SecondOrderReport,
    SecondOrderSweep,
    SeriesConfig,
)
from app.schemas.sphere import FamilyParams
from app.services.dimension_service import dimension_service

logger = logging.getLogger(__name__)

_CIRCLE_TOL = 1e-12


def _as_array(z) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=complex))


def _unwrap(values: np.ndarray, z):
    return complex(values[0]) if np.ndim(z) == 0 else values


def _richardson(small: SecondOrderReport, large: SecondOrderReport) -> float:
    """|alpha|^2 coefficient of the fixed-point average with the term linear in |alpha| removed."""
    base = float(small.d) ** (-small.n * small.D)

    def coefficient(report: SecondOrderReport) -> float:
        return (report.lhs_fixed_points / base - 1.0) / abs(report.alpha) ** 2

    ratio = abs(large.alpha) / abs(small.alpha)
    return (ratio * coefficient(small) - coefficient(large)) / (ratio - 1.0)


class SeriesService:
    """Second-order motion of the unit circle and the averaging identities built on it."""

    def __init__(self):
        self.config = settings.series

    def context(self, q: int, n: int) -> AverageContext:
        size = abs(q ** n - 1)
        if size > self.config.sample_budget:
            raise NumericalError(
                f"|q^n - 1| = {size} exceeds the sample budget {self.config.sample_budget}",
                "error.numerical.budget",
                {"q": q, "n": n},
            )
        return AverageContext(q=q, n=n)

    def sample(self, ctx: AverageContext) -> CirclePoints:
        return CirclePoints.sample(ctx.q, ctx.n)

    # ===== SERIES =====

    def _circle(self, z) -> CirclePoints:
        zs = _as_array(z)
        if np.any(np.abs(np.abs(zs) - 1.0) > _CIRCLE_TOL):
            raise DomainError("point must lie on the unit circle", "error.domain.circle")
        return CirclePoints.from_complex(zs)

    def u1(self, z, cfg: SeriesConfig):
        zs = _as_array(z)
        moduli = np.abs(zs)
        if np.any((moduli < 0.5) | (moduli > 1.0 + _CIRCLE_TOL)):
            raise DomainError("u1 is defined for 0.5 <= |z| <= 1", "error.domain.series")
        if np.all(np.abs(moduli - 1.0) <= _CIRCLE_TOL):
            values = series_processor.u1(CirclePoints.from_complex(zs), cfg.q, cfg.K)
        else:
            values = series_processor.u1_off_circle(zs, cfg.q, cfg.K)
        return _unwrap(values, z)

    def u2(self, z, cfg: SeriesConfig):
        return _unwrap(series_processor.u2(self._circle(z), cfg.q, cfg.d, cfg.K), z)

    def phi_alpha(self, z, alpha: complex, cfg: SeriesConfig):
        if abs(alpha) > 0.1:
            raise DomainError(f"|alpha| = {abs(alpha):.3g} exceeds 0.1", "error.domain.alpha")
        return _unwrap(series_processor.phi(self._circle(z), alpha, cfg.q, cfg.d, cfg.K), z)

    def formal_solution(self, z, l: int, cfg: SeriesConfig):
        """u(z) = sum_k z^{l q^k} / q^k for an integer l != 0."""
        if l == 0:
            raise DomainError("l must be a nonzero integer", "error.domain.series")
        return _unwrap(series_processor.formal_solution(self._circle(z), cfg.q, l, cfg.K), z)

    def average(self, G: Callable[[CirclePoints], np.ndarray], ctx: AverageContext) -> complex:
        values = np.broadcast_to(np.asarray(G(self.sample(ctx)), dtype=complex), (ctx.size,))
        return average(values)

    # ===== FUNCTIONAL EQUATIONS =====

    def u1_equation_residual(self, cfg: SeriesConfig, count: int = 100) -> float:
        """max |u1(z^q) - q u1(z) + q z| on `count` circle points."""
        points = CirclePoints.uniform(count, offset=0.37)
        z = points.values()
        lhs = series_processor.u1(points.power(cfg.q), cfg.q, cfg.K) - cfg.q * series_processor.u1(points, cfg.q, cfg.K)
        return float(np.max(np.abs(lhs + cfg.q * z)))

    def u2_equation_residual(self, cfg: SeriesConfig, count: int = 100) -> float:
        """max |u2(z^q) - q u2(z) - bracket| with the bracket written out from u1."""
        q, d = cfg.q, cfg.d
        points = CirclePoints.uniform(count, offset=0.37)
        z = points.values()
        w1 = series_processor.u1(points, q, cfg.K)
        z2_term = q * (q + 1) / 2.0 * z ** 2 if d > 2 else 0.0
        bracket = q * (q - 1) / 2.0 * w1 ** 2 - q * (q + 1) * z * w1 + z2_term
        lhs = series_processor.u2(points.power(q), q, d, cfg.K) - q * series_processor.u2(points, q, d, cfg.K)
        return float(np.max(np.abs(lhs - bracket)))

    def reduced_equation_residual(self, cfg: SeriesConfig, count: int = 100) -> float:
        """The reduced right side -q g(z) against the bracket of the u2 equation."""
        q, d = cfg.q, cfg.d
        points = CirclePoints.uniform(count, offset=0.37)
        z = points.values()
        w1 = series_processor.u1(points, q, cfg.K)
        z2_term = q * (q + 1) / 2.0 * z ** 2 if d > 2 else 0.0
        bracket = q * (q - 1) / 2.0 * w1 ** 2 - q * (q + 1) * z * w1 + z2_term
        reduced = -q * series_processor.source(z, w1, q, d)
        return float(np.max(np.abs(reduced - bracket)))

    def formal_solution_residual(self, l: int, cfg: SeriesConfig, count: int = 100) -> float:
        """max |u(z^q) - q u(z) + q z^l| for the formal solution of exponent l."""
        points = CirclePoints.uniform(count, offset=0.37)
        z = points.values()
        lhs = series_processor.formal_solution(points.power(cfg.q), cfg.q, l, cfg.K) - cfg.q * series_processor.formal_solution(
            points, cfg.q, l, cfg.K
        )
        return float(np.max(np.abs(lhs + cfg.q * z ** l)))

    def conjugacy_residuals(self, alpha: complex, cfg: SeriesConfig, count: int = 100) -> np.ndarray:
        """|f_alpha(phi_alpha(z)) - phi_alpha(z^q)| on `count` circle points."""
        points = CirclePoints.uniform(count, offset=0.37)
        moved = series_processor.phi(points, alpha, cfg.q, cfg.d, cfg.K)
        image = series_processor.phi(points.power(cfg.q), alpha, cfg.q, cfg.d, cfg.K)
        return np.abs(f_alpha_array(moved, alpha, cfg.d) - image)

    # ===== MODULAR LEMMA =====

    def modular_lemma_check(self, q: int, n: int, m_range: int) -> ModularLemmaReport:
        if n < 1:
            raise DomainError("n must be >= 1", "error.domain.series")
        M = q ** n - 1
        powers = [q ** m for m in range(m_range + 1)]
        counterexamples = []

        nonzero_powers = True
        for m, value in enumerate(powers):
            if value % M == 0:
                nonzero_powers = False
                counterexamples.append(("power", m, m))

        nonzero_sums = True
        criterion = True
        for m1 in range(m_range + 1):
            for m2 in range(m_range + 1):
                if (powers[m1] + powers[m2]) % M == 0:
                    nonzero_sums = False
                    counterexamples.append(("sum", m1, m2))
                congruent = (powers[m1] - powers[m2]) % M == 0
                if congruent != ((m1 - m2) % n == 0):
                    criterion = False
                    counterexamples.append(("difference", m1, m2))

        return ModularLemmaReport(
            q=q,
            n=n,
            m_range=m_range,
            nonzero_powers=nonzero_powers,
            nonzero_sums=nonzero_sums,
            difference_criterion=criterion,
            counterexamples=counterexamples[:20],
        )

    # ===== AVERAGES =====

    def _terms(self, q: int, n: int, cfg: SeriesConfig):
        ctx = self.context(q, n)
        return series_processor.orbit_terms(self.sample(ctx), q, -q, n, cfg.K)

    def appendix_sums(self, q: int, n: int, cfg: SeriesConfig) -> List[IdentityRecord]:
        if n < 2:
            raise DomainError("appendix sums need n >= 2", "error.domain.series")
        sig, u1, u2 = self._terms(q, n, cfg)
        A = series_processor.a_terms(sig, u1, q)
        totals = [0.0 + 0.0j] * 4
        for m1 in range(n):
            for m2 in range(n):
                totals[0] += average(sig[m1] * np.conj(sig[m2]))
                totals[1] += average(u1[m1] * np.conj(sig[m2]))
                totals[2] += average(u1[m1] * np.conj(u1[m2]))
                totals[3] += average(A[m1] * np.conj(A[m2]))
        return [
            IdentityRecord.create("sum <sigma^(q^m1 - q^m2)>", totals[0], n, 1e-10),
            IdentityRecord.create("sum <u1(sigma^q^m1) sigma^-q^m2>", totals[1], n * q / (q - 1), 1e-9),
            IdentityRecord.create("sum <u1 conj(u1)>", totals[2], n * q ** 2 / (q - 1) ** 2, 1e-9),
            IdentityRecord.create("sum <A_m1 conj(A_m2)>", totals[3], n * q ** 4, 1e-8),
        ]

    def pointwise_tables(self, q: int, n: int, cfg: SeriesConfig) -> List[IdentityRecord]:
        """Entry-by-entry closed forms of the three averaged pairings."""
        sig, u1, _ = self._terms(q, n, cfg)
        M = q ** n - 1
        factor = q ** (2 + n) / ((q ** 2 - 1) * M)
        records = []
        for m1 in range(n):
            for m2 in range(n):
                records.append(
                    IdentityRecord.create(
                        f"<sigma^(q^{m1} - q^{m2})>",
                        average(sig[m1] * np.conj(sig[m2])),
                        1.0 if m1 == m2 else 0.0,
                        1e-10,
                    )
                )
                mixed = q ** (m1 - m2) / M if m1 > m2 else q ** (n - (m2 - m1)) / M
                records.append(
                    IdentityRecord.create(f"<u1(sigma^q^{m1}) sigma^-q^{m2}>", average(u1[m1] * np.conj(sig[m2])), mixed, 1e-10)
                )
                gap = abs(m1 - m2)
                paired = (float(q) ** -gap + float(q) ** -(n - gap)) * factor
                records.append(
                    IdentityRecord.create(f"<u1(sigma^q^{m1}) conj u1(sigma^q^{m2})>", average(u1[m1] * np.conj(u1[m2])), paired, 1e-10)
                )
        return records

    def vanishing_averages(self, q: int, n: int, cfg: SeriesConfig) -> List[IdentityRecord]:
        """First-order averages and the A/B averages that must vanish."""
        sig, u1, u2 = self._terms(q, n, cfg)
        A = series_processor.a_terms(sig, u1, q)
        B = series_processor.b_terms(sig, u1, u2, q)
        records = []
        for m in range(n):
            records.append(IdentityRecord.create(f"<sigma^q^{m}>", average(sig[m]), 0.0, 1e-10))
            records.append(IdentityRecord.create(f"<u1(sigma^q^{m})>", average(u1[m]), 0.0, 1e-10))
            records.append(IdentityRecord.create(f"<u2(sigma^q^{m})>", average(u2[m]), 0.0, 1e-10))
            records.append(IdentityRecord.create(f"<A_{m}>", average(A[m]), 0.0, 1e-10))
            records.append(IdentityRecord.create(f"<conj A_{m}>", average(np.conj(A[m])), 0.0, 1e-10))
            records.append(IdentityRecord.create(f"<B_{m}>", average(B[m]), 0.0, 1e-10))
            for m2 in range(n):
                records.append(IdentityRecord.create(f"<sigma^(q^{m} + q^{m2})>", average(sig[m] * sig[m2]), 0.0, 1e-10))
                records.append(IdentityRecord.create(f"<sigma^q^{m} u1(sigma^q^{m2})>", average(sig[m] * u1[m2]), 0.0, 1e-10))
                records.append(IdentityRecord.create(f"<u1 u1 ({m},{m2})>", average(u1[m] * u1[m2]), 0.0, 1e-10))
                records.append(IdentityRecord.create(f"<A_{m} A_{m2}>", average(A[m] * A[m2]), 0.0, 1e-10))
        return records

    def squared_modulus_residual(self, d: int, n: int, alpha: complex, cfg: SeriesConfig) -> float:
        """
        max over the sample of | |f_alpha'(phi_alpha(sigma^q^m))|^2 - expansion | with the
        expansion q^2 + A alpha + conj(A alpha) + |A alpha|^2 / q^2 + B alpha^2 + conj(B alpha^2).
        """
        q = -d
        sig, u1, u2 = self._terms(q, n, cfg)
        A = series_processor.a_terms(sig, u1, q)
        B = series_processor.b_terms(sig, u1, u2, q)
        moved = sig * (1.0 + u1 * alpha + u2 * alpha ** 2)
        exact = np.abs(f_alpha_prime_array(moved, alpha, d)) ** 2
        Aa, Ba = A * alpha, B * alpha ** 2
        expansion = q ** 2 + 2.0 * Aa.real + np.abs(Aa) ** 2 / q ** 2 + 2.0 * Ba.real
        return float(np.max(np.abs(exact - expansion)))

    # ===== SECOND-ORDER AVERAGE =====

    def second_order_average_check(
        self,
        p: FamilyParams,
        n: int,
        D: float,
        alpha: complex,
        cfg: Optional[SeriesConfig] = None,
    ) -> SecondOrderReport:
        if abs(alpha) > 0.05:
            raise DomainError(f"|alpha| = {abs(alpha):.3g} exceeds 0.05", "error.domain.alpha")
        d, q = p.d, p.q
        cfg = cfg or SeriesConfig.for_degree(d)
        try:
            sig, u1, u2 = self._terms(q, n, cfg)
            moved = sig * (1.0 + u1 * alpha + u2 * alpha ** 2)
            factors = np.abs(f_alpha_prime_array(moved, alpha, d)) ** (-D)
            lhs_motion = average(np.prod(factors, axis=0)).real
            orbits = dimension_service.periodic_points(FamilyParams.from_alpha(d, alpha), n)
            lhs_fixed = dimension_service.pressure_sum(orbits, D) / len(orbits)
        except PottsError:
            raise
        except Exception as e:
            logger.error(f"Second-order average failed for d={d}, n={n}, alpha={alpha}: {e}")
            raise NumericalError(f"second-order average failed: {e}", "error.numerical.series")

        base = abs(q) ** (-n * D)
        growth = D ** 2 * n * abs(alpha) ** 2 / 4.0
        alpha = complex(alpha)
        return SecondOrderReport(
            d=d,
            n=n,
            D=D,
            alpha_re=alpha.real,
            alpha_im=alpha.imag,
            lhs_motion=lhs_motion,
            lhs_fixed_points=lhs_fixed,
            rhs_polynomial=base * (1.0 + growth),
            rhs_exponential=base * math.exp(growth),
        )

    def second_order_sweep(
        self,
        d: int,
        n: int,
        D: float = 1.0,
        alphas: Sequence[float] = (0.01, 0.02, 0.04),
    ) -> SecondOrderSweep:
        """
        Discrepancy slopes in log|alpha| and the |alpha|^2 coefficient by
        Richardson extrapolation from the two smallest alphas.
        """
        if len(alphas) < 3:
            raise DomainError("the sweep needs at least three alphas", "error.domain.alpha")
        p = FamilyParams.create(d, 1.0)
        reports = [self.second_order_average_check(p, n, D, a) for a in alphas]
        log_alpha = np.log(np.abs(alphas))
        slope_motion = stats.linregress(log_alpha, np.log([r.discrepancy_motion for r in reports])).slope
        slope_fixed = stats.linregress(log_alpha, np.log([r.discrepancy_fixed_points for r in reports])).slope
        fitted = max(max(r.discrepancy_motion, r.discrepancy_fixed_points) / abs(r.alpha) ** 3 for r in reports)

        ordered = sorted(reports, key=lambda r: abs(r.alpha))
        quadratic = _richardson(ordered[0], ordered[1])
        logger.info(f"Second-order sweep d={d} n={n}: slopes {slope_motion:.3f}/{slope_fixed:.3f}, coefficient {quadratic:.5f}")
        return SecondOrderSweep(
            reports=reports,
            slope_motion=slope_motion,
            slope_fixed_points=slope_fixed,
            fitted_constant=fitted,
            quadratic_coefficient=quadratic,
            expected_coefficient=D ** 2 * n / 4.0,
        )

    def second_order_coefficient(self, d: int, n: int, D: float, alpha: float, rel_tol: float = 0.05) -> IdentityRecord:
        """The |alpha|^2 coefficient from alpha/2 and alpha against D^2 n / 4."""
        p = FamilyParams.create(d, 1.0)
        small = self.second_order_average_check(p, n, D, alpha / 2.0)
        large = self.second_order_average_check(p, n, D, alpha)
        expected = D ** 2 * n / 4.0
        return IdentityRecord.create(
            f"|alpha|^2 coefficient (n={n}, alpha={alpha:g})",
            _richardson(small, large),
            expected,
            rel_tol * expected,
        )


series_service = SeriesService()
