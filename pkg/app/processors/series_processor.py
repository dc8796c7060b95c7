from typing import Optional, Tuple

import numpy as np

from app.exceptions import DomainError, NumericalError

_CIRCLE_TOL = 1e-12


class CirclePoints:
    """
    Points sigma = exp(2 pi i t) on the unit circle that can be raised to huge
    integer powers. Exact points carry integer residues r with t = r / modulus;
    generic points carry float turns t in [0, 1).
    """

    def __init__(self, residues: Optional[np.ndarray] = None, modulus: Optional[int] = None, turns: Optional[np.ndarray] = None):
        if residues is not None:
            self.residues = np.asarray(residues, dtype=np.int64)
            self.modulus = int(modulus)
            self.turns = None
        else:
            self.residues = None
            self.modulus = None
            self.turns = np.mod(np.asarray(turns, dtype=float), 1.0)

    @classmethod
    def sample(cls, q: int, n: int) -> "CirclePoints":
        """t_j = j / (q^n - 1), j = 1..|q^n - 1|."""
        m = q ** n - 1
        size = abs(m)
        sign = 1 if m > 0 else -1
        j = np.arange(1, size + 1, dtype=np.int64)
        return cls(residues=np.mod(sign * j, size), modulus=size)

    @classmethod
    def uniform(cls, count: int, offset: float = 0.0) -> "CirclePoints":
        return cls(turns=(np.arange(count) + offset) / count)

    @classmethod
    def from_complex(cls, z) -> "CirclePoints":
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(np.abs(np.abs(z) - 1.0) > _CIRCLE_TOL):
            raise DomainError("points must lie on the unit circle", "error.domain.circle")
        return cls(turns=np.angle(z) / (2.0 * np.pi))

    @property
    def exact(self) -> bool:
        return self.residues is not None

    def __len__(self) -> int:
        return len(self.residues) if self.exact else len(self.turns)

    def power(self, e: int) -> "CirclePoints":
        if self.exact:
            factor = e % self.modulus
            return CirclePoints(residues=np.mod(self.residues * factor, self.modulus), modulus=self.modulus)
        return CirclePoints(turns=np.mod(self.turns * float(e), 1.0))

    def values(self) -> np.ndarray:
        if self.exact:
            return np.exp(2j * np.pi * self.residues / self.modulus)
        return np.exp(2j * np.pi * self.turns)

    def angles(self) -> np.ndarray:
        if self.exact:
            return 2.0 * np.pi * self.residues / self.modulus
        return 2.0 * np.pi * self.turns


def average(values: np.ndarray) -> complex:
    """Mean over the sample (numpy's pairwise summation, fixed order)."""
    values = np.asarray(values)
    return complex(np.sum(values) / values.size)


class SeriesProcessor:
    """
    Second-order motion of the unit circle under f_alpha:
    phi(z) = z (1 + u1(z) alpha + u2(z) alpha^2).
    """

    def power_table(self, points: CirclePoints, q: int, length: int) -> np.ndarray:
        """Rows l = 0..length-1 hold sigma^{q^l}."""
        table = np.empty((length, len(points)), dtype=complex)
        current = points
        for l in range(length):
            table[l] = current.values()
            current = current.power(q)
        return table

    def u1_from_table(self, table: np.ndarray, q: int, K: int, shift: int = 0) -> np.ndarray:
        """u1(sigma^{q^shift}) = sum_{l=0}^{K} sigma^{q^{shift+l}} / q^l."""
        acc = np.zeros(table.shape[1], dtype=complex)
        for l in range(K, -1, -1):
            acc = acc + table[shift + l] / float(q) ** l
        return acc

    def source(self, w: np.ndarray, u1w: np.ndarray, q: int, d: int) -> np.ndarray:
        """g(w) with u2(z^q) - q u2(z) = -q g(z)."""
        s2 = 0.0 if d == 2 else (q + 1) / 2.0
        return (q + 1) * w * u1w - (q - 1) / 2.0 * u1w ** 2 - s2 * w ** 2

    def u2_from_table(self, table: np.ndarray, q: int, d: int, K: int, shift: int = 0) -> np.ndarray:
        acc = np.zeros(table.shape[1], dtype=complex)
        for k in range(K, -1, -1):
            w = table[shift + k]
            u1w = self.u1_from_table(table, q, K, shift + k)
            acc = acc + self.source(w, u1w, q, d) / float(q) ** k
        return acc

    def u1(self, points: CirclePoints, q: int, K: int) -> np.ndarray:
        table = self.power_table(points, q, K + 1)
        return self.u1_from_table(table, q, K)

    def u1_off_circle(self, z: np.ndarray, q: int, K: int) -> np.ndarray:
        """u1 at 0.5 <= |z| <= 1 with explicit moduli; fails loudly if a term overflows."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any((np.abs(z) < 0.5) | (np.abs(z) > 1.0 + _CIRCLE_TOL)):
            raise DomainError("u1 is defined for 0.5 <= |z| <= 1", "error.domain.series")
        log_r = np.log(np.abs(z))
        turns = np.angle(z) / (2.0 * np.pi)
        acc = np.zeros(z.shape, dtype=complex)
        exponent = 1
        for k in range(K + 1):
            with np.errstate(over="ignore"):
                modulus = np.exp(float(exponent) * log_r)
            term = modulus * np.exp(2j * np.pi * np.mod(turns * float(exponent), 1.0)) / float(q) ** k
            if not np.all(np.isfinite(term)):
                raise NumericalError(
                    f"series term {k} overflows off the unit circle",
                    "error.numerical.series_divergence",
                    {"k": k},
                )
            acc = acc + term
            exponent *= q
        return acc

    def u2(self, points: CirclePoints, q: int, d: int, K: int) -> np.ndarray:
        table = self.power_table(points, q, 2 * K + 2)
        return self.u2_from_table(table, q, d, K)

    def formal_solution(self, points: CirclePoints, q: int, l: int, K: int) -> np.ndarray:
        """sum_k z^{l q^k} / q^k, the solution of u(z^q) - q u(z) = -q z^l."""
        table = self.power_table(points.power(l), q, K + 1)
        return self.u1_from_table(table, q, K)

    def phi(self, points: CirclePoints, alpha: complex, q: int, d: int, K: int) -> np.ndarray:
        table = self.power_table(points, q, 2 * K + 2)
        z = table[0]
        return z * (1.0 + self.u1_from_table(table, q, K) * alpha + self.u2_from_table(table, q, d, K) * alpha ** 2)

    # ===== APPENDIX TERMS =====

    def orbit_terms(self, points: CirclePoints, q: int, d: int, n: int, K: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        For m = 0..n-1 the rows sigma^{q^m}, u1(sigma^{q^m}), u2(sigma^{q^m}),
        each of shape (n, |sample|).
        """
        table = self.power_table(points, q, n + 2 * K + 2)
        sig = np.stack([table[m] for m in range(n)])
        u1 = np.stack([self.u1_from_table(table, q, K, m) for m in range(n)])
        u2 = np.stack([self.u2_from_table(table, q, d, K, m) for m in range(n)])
        return sig, u1, u2

    def a_terms(self, sig: np.ndarray, u1: np.ndarray, q: int) -> np.ndarray:
        return q ** 2 * (q - 1) * u1 - q ** 2 * (q + 1) * sig

    def b_terms(self, sig: np.ndarray, u1: np.ndarray, u2: np.ndarray, q: int) -> np.ndarray:
        return (
            q ** 2 * (q + 1) * (q + 2) / 2.0 * sig ** 2
            + q ** 2 * (q - 1) * (q - 2) / 2.0 * u1 ** 2
            - q ** 3 * (q + 1) * sig * u1
            + q ** 2 * (q - 1) * u2
        )

    def derivative_on_motion(self, sig: np.ndarray, u1: np.ndarray, u2: np.ndarray, alpha: complex, q: int) -> np.ndarray:
        """Second-order expansion of f_alpha'(phi_alpha(z)) in alpha."""
        first = (q - 1) * u1 - (q + 1) * sig
        second = (q - 1) * (q - 2) / 2.0 * u1 ** 2 - q * (q + 1) * sig * u1 + (q - 1) * u2
        if q < -2:
            second = second + (q + 1) * (q + 2) / 2.0 * sig ** 2
        return q * sig ** (q - 1) * (1.0 + first * alpha + second * alpha ** 2)


series_processor = SeriesProcessor()
