import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from app.exceptions import NumericalError
from app.processors.dynamics_processor import (
    infinity_chart_step,
    one_chart_step,
    u_array,
    u_raw,
)

ONE = 1
INFINITY = 2
UNDETERMINED = 0

_ESCAPE_CHART = 1e12


@dataclass
class TrapResult:
    code: int
    iterations: int
    last: complex


@dataclass
class GreenSample:
    value: float
    slope: complex          # d h / d u in the target chart
    iterations: int
    previous: float         # estimate one iterate earlier


@dataclass
class AscentResult:
    member: Optional[bool]
    steps: int
    path: List[complex] = field(default_factory=list)


def _chart_step(target: int):
    return one_chart_step if target == ONE else infinity_chart_step


def bottcher_shift(lam: complex, d: int, target: int) -> float:
    """log|c| / (d-1) for the local model u -> c u^d at the target."""
    if target == ONE:
        return math.log(abs(d * lam ** (1 - d))) / (d - 1)
    return d * math.log(d) / (d - 1)


class BasinProcessor:
    """Trap iteration, Green functions and immediate-basin tests for U."""

    # ===== TRAP ITERATION =====

    def classify(self, lam: complex, d: int, z: complex, attract_eps: float, escape_R: float, max_iter: int) -> TrapResult:
        w = z
        for k in range(max_iter + 1):
            if cmath.isinf(w) or cmath.isnan(w) or abs(w) > escape_R:
                self._assert_invariant(lam, d, w, INFINITY, attract_eps, escape_R)
                return TrapResult(INFINITY, k, w)
            if abs(w - 1.0) < attract_eps:
                self._assert_invariant(lam, d, w, ONE, attract_eps, escape_R)
                return TrapResult(ONE, k, w)
            if k < max_iter:
                w = u_raw(w, lam, d)
        return TrapResult(UNDETERMINED, max_iter, w)

    def _assert_invariant(self, lam: complex, d: int, w: complex, code: int, attract_eps: float, escape_R: float) -> None:
        # lambda = 0 makes 1 parabolic; its trap disk is not forward invariant
        if lam == 0 or cmath.isinf(w) or cmath.isnan(w):
            return
        nxt = u_raw(w, lam, d)
        if code == ONE:
            ok = abs(nxt - 1.0) < attract_eps
        else:
            ok = cmath.isinf(nxt) or cmath.isnan(nxt) or abs(nxt) > escape_R
        if not ok:
            raise NumericalError(
                f"trap invariance violated at w={w} (next={nxt}) for lambda={lam}",
                "error.numerical.trap",
                {"lambda": str(lam), "w": str(w)},
            )

    def classify_array(self, lam: complex, d: int, z: np.ndarray, attract_eps: float, escape_R: float, max_iter: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized trap iteration. Returns (codes, iterations, |w| at exit)."""
        flat = np.asarray(z, dtype=complex).ravel()
        codes = np.zeros(flat.shape, dtype=np.int8)
        iters = np.full(flat.shape, max_iter, dtype=np.int32)
        modulus = np.zeros(flat.shape, dtype=float)
        active = np.arange(flat.size)
        w = flat.copy()
        for k in range(max_iter + 1):
            with np.errstate(all="ignore"):
                escaped = ~np.isfinite(w) | (np.abs(w) > escape_R)
                attracted = ~escaped & (np.abs(w - 1.0) < attract_eps)
            done = escaped | attracted
            if done.any():
                idx = active[done]
                codes[idx] = np.where(escaped[done], INFINITY, ONE)
                iters[idx] = k
                with np.errstate(all="ignore"):
                    modulus[idx] = np.where(np.isfinite(w[done]), np.abs(w[done]), np.inf)
                active = active[~done]
                w = w[~done]
            if active.size == 0 or k == max_iter:
                break
            w = u_array(w, lam, d)
        return codes.reshape(np.shape(z)), iters.reshape(np.shape(z)), modulus.reshape(np.shape(z))

    # ===== GREEN FUNCTION =====

    def green(
        self,
        u0: complex,
        lam: complex,
        d: int,
        target: int,
        green_eps: float,
        max_iter: int,
        increment_tol: Optional[float] = None,
    ) -> Optional[GreenSample]:
        """
        Green function of the target's basin at chart coordinate u0:
        G = -d^{-k} (log|u_k| + shift), corrected by the Bottcher constant.
        Stops at the first k with |u_k| < green_eps (and, if given, successive
        estimates closer than increment_tol). Returns None when the orbit
        does not get there.
        """
        if u0 == 0:
            return GreenSample(math.inf, complex(math.nan, 0.0), 0, math.inf)
        step = _chart_step(target)
        shift = bottcher_shift(lam, d, target)
        u = u0
        product = 1.0 + 0.0j
        previous = math.nan
        for k in range(max_iter + 1):
            if not cmath.isfinite(u) or abs(u) > _ESCAPE_CHART:
                return None
            if u == 0:
                return GreenSample(math.inf, complex(math.nan, 0.0), k, previous)
            estimate = -(math.log(abs(u)) + shift) / d ** k
            if abs(u) < green_eps and (increment_tol is None or abs(estimate - previous) < increment_tol):
                return GreenSample(estimate, -product / u0, k, previous)
            previous = estimate
            if k == max_iter:
                break
            u, rho = step(u, lam, d)
            product *= rho / d
        return None

    # ===== CERTIFIED TRAP DISKS =====

    def certified_radius(self, lam: complex, d: int, target: int, samples: int, forbidden: List[complex]) -> float:
        """
        Radius r such that the chart map sends |u| = r into |u| <= r / 2 on
        `samples` points, with no pole (listed in `forbidden`) in |u| <= 2r.
        """
        step = _chart_step(target)
        if target == ONE:
            r = 0.25 * abs(lam) * d ** (-1.0 / (d - 1))
        else:
            r = 0.25 * d ** (-d / (d - 1)) * min(1.0, 1.0 / abs(lam))
        finite_poles = [abs(u) for u in forbidden if cmath.isfinite(u)]
        if finite_poles:
            r = min(r, 0.25 * min(finite_poles))
        theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        for _ in range(80):
            ok = True
            for t in theta:
                image, _ = step(r * cmath.exp(1j * t), lam, d)
                if not cmath.isfinite(image) or abs(image) > 0.5 * r:
                    ok = False
                    break
            if ok:
                return r
            r *= 0.5
        raise NumericalError(f"no certified disk found for lambda={lam}", "error.numerical.certify")

    def green_ceiling(self, lam: complex, d: int, target: int, radius: float, samples: int, green_eps: float, max_iter: int) -> float:
        """Upper bound of G on |u| = radius; inside the basin, G above it forces |u| < radius."""
        step_values = []
        theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        for t in theta:
            sample = self.green(radius * cmath.exp(1j * t), lam, d, target, green_eps, max_iter)
            if sample is not None:
                step_values.append(sample.value)
        if not step_values:
            raise NumericalError(f"green ceiling undefined for lambda={lam}", "error.numerical.certify")
        return max(step_values) + 0.5

    # ===== INTERNAL-RAY ASCENT =====

    def ascend(
        self,
        u0: complex,
        lam: complex,
        d: int,
        target: int,
        radius: float,
        ceiling: float,
        green_eps: float,
        max_iter: int,
        max_steps: int,
        max_halvings: int,
        nudge: bool = False,
        keep_path: bool = False,
    ) -> AscentResult:
        """
        Follow the gradient of the Green function from u0 upward. Reaching the
        certified disk |u| < radius means u0 lies in the immediate basin;
        reaching G >= ceiling outside it means u0 lies in another component.
        `nudge` moves a start point sitting on a critical point of G off it.
        """
        path = [u0] if keep_path else []
        u = u0
        if abs(u) < radius:
            return AscentResult(True, 0, path)
        sample = self.green(u, lam, d, target, green_eps, max_iter)
        if sample is None:
            return AscentResult(None, 0, path)
        if not math.isfinite(sample.value):
            return AscentResult(False, 0, path)
        if nudge or not cmath.isfinite(sample.slope) or sample.slope == 0:
            u = u + 1e-4 * (1.0 + abs(u)) * cmath.exp(1j * math.pi / 7)
            sample = self.green(u, lam, d, target, green_eps, max_iter)
            if sample is None or not cmath.isfinite(sample.slope) or sample.slope == 0:
                return AscentResult(None, 0, path)

        for steps in range(max_steps):
            if abs(u) < radius:
                return AscentResult(True, steps, path)
            if sample.value >= ceiling:
                return AscentResult(False, steps, path)
            t = min(0.3 * sample.value, 0.7)
            accepted = None
            for _ in range(max_halvings):
                halfway = u + 0.5 * t / sample.slope
                mid = self.green(halfway, lam, d, target, green_eps, max_iter)
                if mid is not None and math.isfinite(mid.value) and cmath.isfinite(mid.slope) and mid.slope != 0:
                    candidate = u + t / mid.slope
                    nxt = self.green(candidate, lam, d, target, green_eps, max_iter)
                    if nxt is not None and (
                        not math.isfinite(nxt.value)
                        or sample.value + 0.3 * t <= nxt.value <= sample.value + 3.0 * t
                    ):
                        accepted = (candidate, nxt)
                        break
                t *= 0.5
            if accepted is None:
                return AscentResult(None, steps, path)
            u, sample = accepted
            if keep_path:
                path.append(u)
            if not math.isfinite(sample.value):
                return AscentResult(abs(u) < radius, steps + 1, path)
            if not cmath.isfinite(sample.slope) or sample.slope == 0:
                return AscentResult(abs(u) < radius or None, steps + 1, path)
        return AscentResult(abs(u) < radius or None, max_steps, path)


basin_processor = BasinProcessor()
