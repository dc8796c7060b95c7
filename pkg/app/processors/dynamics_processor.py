import cmath
import math
from typing import Tuple

import numpy as np

from app.exceptions import DomainError
from app.schemas.sphere import CriticalData, FamilyParams, SpherePoint

INF = complex(math.inf, 0.0)


def ipow(z: complex, n: int) -> complex:
    """z**n by repeated squaring; never raises OverflowError."""
    result = 1.0 + 0.0j
    base = z
    while n > 0:
        if n & 1:
            result *= base
        n >>= 1
        if n:
            base *= base
    return result


def binomial_tail(x: complex, d: int) -> complex:
    """(1+x)^d - 1 = sum_{i=1}^{d} C(d,i) x^i, evaluated by Horner without cancellation."""
    acc = 0.0 + 0.0j
    for i in range(d, 0, -1):
        acc = acc * x + math.comb(d, i)
    return acc * x


def _overflow_limit(d: int) -> float:
    return 1e300 ** (1.0 / d) / 10.0


def _isinf(z: complex) -> bool:
    return cmath.isinf(z) or cmath.isnan(z)


# ===== RAW KERNELS (plain complex, INF sentinel) =====

def t_raw(z: complex, lam: complex, d: int) -> complex:
    if _isinf(z):
        return 1.0 + 0.0j
    eps = z - 1.0
    if eps == 0:
        return INF
    x = lam / eps
    if _isinf(x) or abs(x) > _overflow_limit(d):
        return INF
    return ipow(1.0 + x, d)


def u_raw(z: complex, lam: complex, d: int) -> complex:
    if lam == 0:
        if _isinf(z):
            return INF
        return ipow((z + d - 1) / d, d)
    return t_raw(t_raw(z, lam, d), lam, d)


def one_chart_step(eps: complex, lam: complex, d: int) -> Tuple[complex, complex]:
    """
    U in the chart z = 1 + eps. Returns (eps', rho) with
    rho = d log(eps') / d log(eps), which tends to d as eps -> 0.
    """
    s = eps + lam
    if s == 0:
        # z = 1 - lam: critical point, T(z) = 0
        return binomial_tail(-lam, d), 0.0 + 0.0j
    geom = 0.0 + 0.0j
    for i in range(d):
        geom += ipow(s, d - 1 - i) * ipow(eps, i)
    big = lam * geom  # s^d - eps^d
    eps_d = ipow(eps, d)
    if big == 0 or _isinf(big) or _isinf(eps_d):
        return INF, INF
    x = lam * eps_d / big
    if abs(x) < 0.5:
        eps_next = binomial_tail(x, d)
    else:
        if abs(x) > _overflow_limit(d):
            return INF, INF
        eps_next = ipow(1.0 + x, d) - 1.0
    if eps_next == 0:
        return 0.0 + 0.0j, INF
    rho = d * d * lam * lam * eps_d * ipow(s, d - 1) * ipow(1.0 + x, d - 1) / (big * big * eps_next)
    return eps_next, rho


def infinity_chart_step(eta: complex, lam: complex, d: int) -> Tuple[complex, complex]:
    """U in the chart z = 1/eta. Returns (eta', rho) with rho -> d as eta -> 0."""
    if eta == 1:
        # z = 1 -> T = inf -> U = 1
        return 1.0 + 0.0j, 0.0 + 0.0j
    x = lam * eta / (1.0 - eta)
    if _isinf(x) or abs(x) > _overflow_limit(d):
        return 1.0 + 0.0j, 0.0 + 0.0j
    delta = binomial_tail(x, d) if abs(x) < 0.5 else ipow(1.0 + x, d) - 1.0
    if delta == 0:
        return 0.0 + 0.0j, INF
    s = delta + lam
    if s == 0:
        return INF, INF
    eta_next = ipow(delta / s, d)
    rho = d * d * lam * lam * eta * ipow(1.0 + x, d - 1) / (delta * s * (1.0 - eta) ** 2)
    return eta_next, rho


# ===== ARRAY KERNELS =====

def t_array(z: np.ndarray, lam, d: int) -> np.ndarray:
    with np.errstate(all="ignore"):
        eps = z - 1.0
        out = (1.0 + lam / eps) ** d
        out = np.where(eps == 0, np.inf + 0j, out)
        out = np.where(np.isfinite(z), out, 1.0 + 0j)
        out = np.where(np.isnan(out), np.inf + 0j, out)
    return out


def u_array(z: np.ndarray, lam, d: int) -> np.ndarray:
    if np.all(np.asarray(lam) == 0):
        with np.errstate(all="ignore"):
            return ((z + d - 1) / d) ** d
    return t_array(t_array(z, lam, d), lam, d)


def f_alpha_array(z: np.ndarray, alpha: complex, d: int) -> np.ndarray:
    w = 1.0 / z
    acc = np.zeros_like(w)
    for i in range(d - 1, -1, -1):
        acc = acc * alpha + math.comb(d, i) * w ** (d - i)
    return acc


def f_alpha_prime_array(z: np.ndarray, alpha: complex, d: int) -> np.ndarray:
    w = 1.0 / z
    acc = np.zeros_like(w)
    for i in range(d - 1, -1, -1):
        acc = acc * alpha + math.comb(d, i) * (i - d) * w ** (d - i + 1)
    return acc


class DynamicsProcessor:
    """Evaluation of T, U, their derivatives, the rescaled family and the critical data."""

    def _require_lambda(self, p: FamilyParams) -> None:
        if p.is_degenerate and not p.degenerate:
            raise DomainError("lambda = 0 requires the degenerate branch", "error.domain.lambda_zero")

    def eval_T(self, p: FamilyParams, z: SpherePoint) -> SpherePoint:
        self._require_lambda(p)
        lam, d = p.lam, p.d
        if z.is_infinity:
            return SpherePoint.finite(1.0)
        if p.is_degenerate:
            # T is constant 1 off its removable singularity
            return SpherePoint.finite(1.0)

        # x = lam / (z - 1); the reciprocal of T is (num / den)^d
        if z.chart == "infinity":
            w = z.value
            if w == 1:
                return SpherePoint.infinity()
            x = lam * w / (1.0 - w)
            num, den = 1.0 - w, 1.0 - w + lam * w
        else:
            eps = z.offset_from_one()
            if eps == 0:
                return SpherePoint.infinity()
            x = lam / eps
            num, den = eps, eps + lam

        if _isinf(x) or abs(x) > _overflow_limit(d):
            return SpherePoint.from_reciprocal(ipow(num / den, d))
        if abs(x) < 0.5:
            return SpherePoint.near_one(binomial_tail(x, d))
        return SpherePoint.finite(ipow(1.0 + x, d))

    def eval_U(self, p: FamilyParams, z: SpherePoint) -> SpherePoint:
        self._require_lambda(p)
        if p.is_degenerate:
            if z.is_infinity:
                return SpherePoint.infinity()
            d = p.d
            if z.chart == "one":
                return SpherePoint.near_one(binomial_tail(z.value / d, d))
            value = ipow((z.to_complex() + d - 1) / d, d)
            return SpherePoint.finite(value)
        return self.eval_T(p, self.eval_T(p, z))

    def eval_T_prime(self, p: FamilyParams, z: complex) -> complex:
        lam, d = p.lam, p.d
        b = z - 1.0
        if b == 0:
            return INF
        return -d * lam * ipow(z + lam - 1.0, d - 1) / ipow(b, d + 1)

    def eval_U_prime(self, p: FamilyParams, z: SpherePoint) -> complex:
        self._require_lambda(p)
        if z.is_infinity:
            raise DomainError("derivative is evaluated at finite points only", "error.domain.infinite_point")
        lam, d = p.lam, p.d
        zc = z.to_complex()
        if p.is_degenerate:
            return ipow((zc + d - 1) / d, d - 1)
        if z.chart == "one":
            b = z.value
            a = b + lam
        else:
            a = zc + lam - 1.0
            b = zc - 1.0
        a_d, b_d = ipow(a, d), ipow(b, d)
        den = ipow(a_d - b_d, d + 1)
        if den == 0 or _isinf(den):
            return INF
        num = d * d * lam * lam * ipow(a, d - 1) * ipow(b, d - 1) * ipow(a_d + (lam - 1.0) * b_d, d - 1)
        return num / den

    def critical_data(self, p: FamilyParams) -> CriticalData:
        if p.is_degenerate:
            raise DomainError("critical data needs lambda != 0", "error.domain.lambda_zero")
        lam, d = p.lam, p.d
        xi = [SpherePoint.infinity()]
        for k in range(1, d):
            zeta = cmath.exp(2j * math.pi * k / d)
            xi.append(SpherePoint.finite((zeta + lam - 1.0) / (zeta - 1.0)))

        omega = []
        if lam == 1:
            # T(z) = (z/(z-1))^d vanishes only at 0
            omega = [SpherePoint.finite(0.0) for _ in range(d)]
        else:
            root = cmath.exp(cmath.log(1.0 - lam) / d)
            for k in range(d):
                mu = root * cmath.exp(2j * math.pi * k / d)
                omega.append(SpherePoint.finite((mu + lam - 1.0) / (mu - 1.0)))

        fixed = [SpherePoint.finite(1.0), SpherePoint.finite(1.0 - lam), SpherePoint.infinity()]
        return CriticalData(xi=xi, omega=omega, fixed_crit=fixed)

    # ===== RESCALED FAMILY =====

    def f_alpha(self, alpha: complex, d: int, z: complex) -> complex:
        if z == 0:
            return INF
        w = 1.0 / z
        acc = 0.0 + 0.0j
        for i in range(d - 1, -1, -1):
            acc = acc * alpha + math.comb(d, i) * ipow(w, d - i)
        return acc

    def f_alpha_prime(self, alpha: complex, d: int, z: complex) -> complex:
        if z == 0:
            return INF
        w = 1.0 / z
        acc = 0.0 + 0.0j
        for i in range(d - 1, -1, -1):
            acc = acc * alpha + math.comb(d, i) * (i - d) * ipow(w, d - i + 1)
        return acc

    def f_alpha_prime_truncated(self, alpha: complex, d: int, z: complex) -> complex:
        """Second-order expansion of f_alpha' in alpha; exact for d = 2, where f_alpha has two terms."""
        q = -d
        value = q * z ** (q - 1) - q * (q + 1) * z ** q * alpha
        if d > 2:
            value += q * (q + 1) * (q + 2) / 2 * z ** (q + 1) * alpha ** 2
        return value

    def eval_f_alpha(self, p: FamilyParams, z: complex) -> complex:
        return self.f_alpha(p.alpha, p.d, z)

    def eval_f_alpha_prime(self, p: FamilyParams, z: complex) -> complex:
        return self.f_alpha_prime(p.alpha, p.d, z)

    def conjugacy_residual(self, p: FamilyParams, z: complex) -> float:
        """|f_alpha(z) - phi(T(phi^{-1}(z)))| with phi(z) = alpha^d (z - 1)."""
        alpha, d = p.alpha, p.d
        scale = ipow(alpha, d)
        image = self.eval_T(p, SpherePoint.near_one(z / scale))
        conjugated = scale * image.offset_from_one()
        return abs(self.f_alpha(alpha, d, z) - conjugated)

    def winding_number(self, p: FamilyParams, radius: float, samples: int = 4096, center: complex = 0.0) -> int:
        """Winding number of U(|z| = radius) around `center`."""
        theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        ring = radius * np.exp(1j * theta)
        values = np.array([u_raw(complex(z), p.lam, p.d) for z in ring]) - center
        phase = np.unwrap(np.angle(np.append(values, values[0])))
        return int(round((phase[-1] - phase[0]) / (2.0 * np.pi)))


dynamics_processor = DynamicsProcessor()
