from dataclasses import dataclass
from typing import Tuple

import numpy as np

from app.exceptions import NumericalError
from app.processors.dynamics_processor import f_alpha_array, f_alpha_prime_array
from app.processors.series_processor import CirclePoints

_NEWTON_STOP = 1e-14


@dataclass
class OrbitBlock:
    points: np.ndarray        # z_0 of each orbit
    multipliers: np.ndarray   # (f^n)'(z_0)
    residuals: np.ndarray     # |f^n(z_0) - z_0| by forward iteration


def newton_cycle(Z: np.ndarray, alpha: complex, d: int, newton_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Multiple-shooting Newton on f(z_m) = z_{m+1 mod n} for every row of Z.
    Returns the refined Z and the per-row max residual.
    """
    n = Z.shape[1]
    residual = np.full(Z.shape[0], np.inf)
    for _ in range(newton_max):
        with np.errstate(all="ignore"):
            F = f_alpha_array(Z, alpha, d) - np.roll(Z, -1, axis=1)
            slope = f_alpha_prime_array(Z, alpha, d)
        residual = np.max(np.abs(F), axis=1)
        # converged rows are frozen so a row's result does not depend on its block
        active = ~(residual < _NEWTON_STOP)
        if not np.any(active):
            break

        # delta_{m+1} = slope_m delta_m + F_m closes on itself after n steps
        P = np.ones(Z.shape[0], dtype=complex)
        S = np.zeros(Z.shape[0], dtype=complex)
        for m in range(n):
            S = slope[:, m] * S + F[:, m]
            P = P * slope[:, m]
        delta = np.empty_like(Z)
        with np.errstate(all="ignore"):
            delta[:, 0] = -S / (P - 1.0)
            # backward sweep divides by the expanding derivative
            nxt = delta[:, 0]
            for m in range(n - 1, 0, -1):
                delta[:, m] = (nxt - F[:, m]) / slope[:, m]
                nxt = delta[:, m]
        Z = np.where(active[:, None], Z + delta, Z)
    return Z, residual


def forward_residual(z0: np.ndarray, alpha: complex, d: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """|f^n(z0) - z0| and (f^n)'(z0) along the forward orbit."""
    w = z0.copy()
    multiplier = np.ones_like(z0)
    with np.errstate(all="ignore"):
        for _ in range(n):
            multiplier = multiplier * f_alpha_prime_array(w, alpha, d)
            w = f_alpha_array(w, alpha, d)
    return np.abs(w - z0), multiplier


def solve_block(
    residues: np.ndarray, modulus: int, alpha: complex, d: int, n: int, legs: int, newton_max: int, first_j: int = 1
) -> OrbitBlock:
    """
    Continue the alpha = 0 fixed points exp(2 pi i r / modulus) of f^n to alpha
    in `legs` equal steps. Module-level so process pools can pickle it.
    """
    q = -d
    seeds = CirclePoints(residues=residues, modulus=modulus)
    columns = []
    current = seeds
    for _ in range(n):
        columns.append(current.values())
        current = current.power(q)
    Z = np.stack(columns, axis=1)

    for leg in range(1, legs + 1):
        step_alpha = alpha * leg / legs
        Z, residual = newton_cycle(Z, step_alpha, d, newton_max)
        bad = np.flatnonzero(~np.isfinite(residual) | (residual > 1e-9))
        if bad.size:
            raise NumericalError(
                f"Newton continuation failed for seed j={first_j + int(bad[0])} at alpha step {leg}/{legs}",
                "error.numerical.newton",
                {"j": first_j + int(bad[0]), "alpha_step": leg, "legs": legs, "residual": float(residual[bad[0]])},
            )

    points = Z[:, 0]
    residuals, _ = forward_residual(points, alpha, d, n)
    multipliers = np.prod(f_alpha_prime_array(Z, alpha, d), axis=1)
    return OrbitBlock(points=points, multipliers=multipliers, residuals=residuals)


def min_separation(points: np.ndarray) -> Tuple[float, int, int]:
    """Smallest gap between angularly adjacent points (wrapping), with the pair's indices."""
    if points.size < 2:
        return np.inf, 0, 0
    order = np.argsort(np.angle(points))
    ring = points[order]
    gaps = np.abs(np.roll(ring, -1) - ring)
    i = int(np.argmin(gaps))
    return float(gaps[i]), int(order[i]), int(order[(i + 1) % order.size])
