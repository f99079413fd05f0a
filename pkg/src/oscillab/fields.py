"""Periodic complex fields on a uniform grid."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidFieldError, ParameterError


@dataclass
class ComplexField:
    """Samples of a complex function on the uniform periodic grid x_j = j*length/n."""

    length: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.length <= 0:
            raise ParameterError("field length must be positive")
        if self.values.ndim != 1 or self.values.size < 2 or self.values.size % 2:
            raise ParameterError("field needs an even number of samples")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * (self.length / self.n)

    def copy(self) -> "ComplexField":
        return ComplexField(self.length, self.values.copy())


def require_finite(field: ComplexField) -> None:
    if not np.all(np.isfinite(field.values)):
        raise InvalidFieldError("field contains non-finite samples")


def solution_norm(field: ComplexField) -> float:
    """N = sqrt((2/L) * integral |U|^2 dx), rectangle rule (exact for periodic data)."""
    return float(np.sqrt(2.0 * np.mean(np.abs(field.values) ** 2)))


def grid_field(fn, n: int, length: float) -> ComplexField:
    """Sample a callable fn(x) on the standard grid."""
    x = np.arange(n) * (length / n)
    return ComplexField(length, np.asarray(fn(x), dtype=complex))
