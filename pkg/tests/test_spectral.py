import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscillab.errors import ShapeError
from oscillab.fields import ComplexField
from oscillab.spectral import (
    cubic_term,
    from_spectral,
    pad_coeffs,
    padded_size,
    second_derivative,
    second_derivative_hat,
    to_spectral,
    truncate_coeffs,
    wavenumbers,
)


def random_field(n=64, length=7.0, seed=0):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return ComplexField(length, vals)


def test_wavenumbers():
    k = wavenumbers(8, 4.0)
    assert k[0] == 0.0
    assert k[1] == pytest.approx(2 * math.pi / 4.0, rel=1e-15)
    assert k[-1] == pytest.approx(-2 * math.pi / 4.0, rel=1e-15)


@given(seed=st.integers(0, 1000))
def test_spectral_roundtrip(seed):
    field = random_field(seed=seed)
    back = from_spectral(to_spectral(field))
    assert np.max(np.abs(back.values - field.values)) < 1e-12


def test_second_derivative_of_mode():
    n, length = 64, 5.0
    k = 3 * (2 * math.pi / length)
    x = np.arange(n) * (length / n)
    field = ComplexField(length, np.exp(1j * k * x))
    got = second_derivative(field).values
    assert np.max(np.abs(got + k**2 * field.values)) < 1e-10


def test_second_derivative_gaussian():
    n, length = 256, 30.0
    x = np.arange(n) * (length / n) - 15.0
    f = np.exp(-(x**2))
    exact = (4 * x**2 - 2) * f
    got = second_derivative(ComplexField(length, f.astype(complex))).values
    assert np.max(np.abs(got - exact)) < 1e-8


def test_second_derivative_zeroes_nyquist():
    n, length = 16, 2.0
    coeffs = np.zeros(n, dtype=complex)
    coeffs[n // 2] = 1.0  # pure Nyquist content
    assert np.all(second_derivative_hat(coeffs, length) == 0.0)


def test_pad_truncate_roundtrip():
    rng = np.random.default_rng(3)
    coeffs = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    coeffs[32] = 0.0  # Nyquist is dropped by design
    back = truncate_coeffs(pad_coeffs(coeffs, 96), 64)
    assert np.max(np.abs(back - coeffs)) < 1e-14


def test_pad_truncate_batched():
    # batched leading axes must pad along the last axis only
    rng = np.random.default_rng(4)
    coeffs = rng.standard_normal((4, 64)) + 0j
    out = pad_coeffs(coeffs, 96)
    assert out.shape == (4, 96)
    assert truncate_coeffs(out, 64).shape == (4, 64)


def test_pad_truncate_shape_errors():
    coeffs = np.zeros(64, dtype=complex)
    with pytest.raises(ShapeError):
        pad_coeffs(coeffs, 32)
    with pytest.raises(ShapeError):
        truncate_coeffs(coeffs, 128)


def test_padded_size():
    assert padded_size(64) == 96
    assert padded_size(640) == 960


@given(seed=st.integers(0, 500))
def test_cubic_term_matches_fine_grid(seed):
    """The 3/2-rule product must equal the exact product of the band-limited
    field computed on a twice-finer grid and then truncated."""
    n, length = 48, 11.0
    rng = np.random.default_rng(seed)
    hat = np.zeros(n, dtype=complex)
    keep = n // 3
    hat[:keep] = rng.standard_normal(keep) + 1j * rng.standard_normal(keep)
    hat[-keep:] = rng.standard_normal(keep) + 1j * rng.standard_normal(keep)
    field = ComplexField(length, np.fft.ifft(hat))

    got = cubic_term(field, -1.0, -2.5).values

    fine_vals = np.fft.ifft(pad_coeffs(hat, 2 * n)) * 2.0
    w = (-1.0 - 2.5j) * np.abs(fine_vals) ** 2 * fine_vals
    exact = np.fft.ifft(truncate_coeffs(np.fft.fft(w), n) / 2.0)
    assert np.max(np.abs(got - exact)) < 1e-10 * max(1.0, np.max(np.abs(exact)))
