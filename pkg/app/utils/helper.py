import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from app.exceptions import DomainError

logger = logging.getLogger(__name__)


def parse_complex(text: str, flag: str = "value") -> complex:
    """
    Parse a command-line complex number.

    Accepts "re,im" pairs and bare reals ("4" reads as 4+0i).
    """
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) == 1:
        parts.append("0")
    if len(parts) != 2 or not all(parts):
        raise DomainError(f"{flag}: expected 're,im', got {text!r}", "error.domain.flag")
    try:
        value = complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise DomainError(f"{flag}: expected 're,im', got {text!r}", "error.domain.flag")
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"{flag}: {text!r} is not finite", "error.domain.flag")
    return value


def parse_float_tuple(text: str, length: int, flag: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(p) for p in str(text).split(","))
    except ValueError:
        raise DomainError(f"{flag}: expected {length} comma-separated numbers, got {text!r}", "error.domain.flag")
    if len(values) != length:
        raise DomainError(f"{flag}: expected {length} comma-separated numbers, got {text!r}", "error.domain.flag")
    return values


def parse_int_list(text: str, flag: str) -> List[int]:
    try:
        return [int(p) for p in str(text).split(",") if p.strip()]
    except ValueError:
        raise DomainError(f"{flag}: expected comma-separated integers, got {text!r}", "error.domain.flag")


def parse_float_list(text: str, flag: str) -> List[float]:
    try:
        return [float(p) for p in str(text).split(",") if p.strip()]
    except ValueError:
        raise DomainError(f"{flag}: expected comma-separated numbers, got {text!r}", "error.domain.flag")


def read_lambda_lines(lines: Sequence[str], source: str = "lambda list") -> List[complex]:
    """One "re,im" per line; blank lines and # comments are skipped."""
    values = []
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        values.append(parse_complex(line, f"{source}:{number}"))
    return values


def load_lambda_list(values: Optional[Sequence[str]] = None, path: Optional[str] = None) -> List[complex]:
    """Lambdas from repeated --lambda flags followed by those of a --lambda-file."""
    lambdas = [parse_complex(v, "--lambda") for v in values or []]
    if path:
        file_path = Path(path)
        if not file_path.is_file():
            raise DomainError(f"--lambda-file: {path} does not exist", "error.domain.flag")
        lambdas.extend(read_lambda_lines(file_path.read_text().splitlines(), str(file_path)))
        logger.debug(f"Read lambda list from {path}")
    return lambdas

