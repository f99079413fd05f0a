"""Fourier pseudospectral operations on periodic fields.

Conventions: forward transform is unnormalized, the inverse divides by n
(numpy default).  Mode m of an n-point field carries wavenumber
k_m = 2*pi*m/length with m in {-n/2, ..., n/2 - 1} in fft ordering.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .fields import ComplexField

# Zero-padding ratio used to dealias the cubic product.
PAD_NUM, PAD_DEN = 3, 2


@dataclass
class SpectralField:
    """Unnormalized Fourier coefficients of a periodic complex field."""

    length: float
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @property
    def n(self) -> int:
        return self.coeffs.size


def wavenumbers(n: int, length: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)


def to_spectral(field: ComplexField) -> SpectralField:
    return SpectralField(field.length, np.fft.fft(field.values))


def from_spectral(spec: SpectralField) -> ComplexField:
    if spec.n % 2:
        raise ShapeError("spectral array must have even length")
    return ComplexField(spec.length, np.fft.ifft(spec.coeffs))


def second_derivative_hat(coeffs: np.ndarray, length: float) -> np.ndarray:
    """Multiply by -k_m^2; the Nyquist mode is zeroed."""
    n = coeffs.size
    out = coeffs * (-wavenumbers(n, length) ** 2)
    out[n // 2] = 0.0
    return out


def second_derivative(field: ComplexField) -> ComplexField:
    hat = second_derivative_hat(np.fft.fft(field.values), field.length)
    return ComplexField(field.length, np.fft.ifft(hat))


def pad_coeffs(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Embed n unnormalized coefficients into m slots; the Nyquist mode is dropped."""
    n = coeffs.shape[-1]
    if m < n:
        raise ShapeError("padded size must not be smaller than the original")
    h = n // 2
    out = np.zeros(coeffs.shape[:-1] + (m,), dtype=complex)
    out[..., :h] = coeffs[..., :h]
    out[..., m - h + 1:] = coeffs[..., n - h + 1:]
    return out


def truncate_coeffs(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Restrict m unnormalized coefficients to the n lowest modes (Nyquist zeroed)."""
    m = coeffs.shape[-1]
    if n > m:
        raise ShapeError("truncated size must not exceed the original")
    h = n // 2
    out = np.zeros(coeffs.shape[:-1] + (n,), dtype=complex)
    out[..., :h] = coeffs[..., :h]
    out[..., n - h + 1:] = coeffs[..., m - h + 1:]
    return out


def padded_size(n: int) -> int:
    return (PAD_NUM * n) // PAD_DEN


def cubic_term_hat(coeffs: np.ndarray, c: complex) -> np.ndarray:
    """Coefficients of c*|u|^2*u with zero-padded (3/2 rule) dealiasing."""
    n = coeffs.size
    m = padded_size(n)
    fine = np.fft.ifft(pad_coeffs(coeffs, m)) * (m / n)
    w = c * (np.abs(fine) ** 2) * fine
    return truncate_coeffs(np.fft.fft(w), n) * (n / m)


def cubic_term(field: ComplexField, c_re: float, c_im: float) -> ComplexField:
    hat = cubic_term_hat(np.fft.fft(field.values), complex(c_re, c_im))
    return ComplexField(field.length, np.fft.ifft(hat))
