"""Floquet analysis of the flat (k = 0) subharmonic response.

Writing U = u + i*v and linearizing the forced model about U = 0 at zero
wavenumber gives the real system

    (d/dt - mu) u = -omega v,
    (d/dt - mu) v =  omega u + F cos(2t) u,

equivalent to the damped Mathieu equation

    L u = u'' - 2 mu u' + (mu^2 + omega^2 + omega F cos(2t)) u = 0.

The 2:1 subharmonic onset F_c is the smallest forcing with a non-trivial
2*pi-periodic solution built from odd harmonics.  Two independent routes are
provided: a truncated harmonic (Hill) eigenproblem, and bisection on the
Floquet multipliers of the monodromy matrix over one forcing period pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.optimize

from .core import ModelParams
from .errors import CriticalForcingNotFoundError, ParameterError, ShapeError

DEFAULT_HARMONICS = 16  # J: odd harmonics up to |2J + 1|


def growth_rate(k, p: ModelParams):
    """sigma(k) = mu - alpha k^2 + i (omega - beta k^2) for the unforced zero state."""
    k = np.asarray(k, dtype=float)
    out = p.mu - p.alpha * k**2 + 1j * (p.omega - p.beta * k**2)
    return out if out.ndim else complex(out)


def weak_critical_forcing(mu: float, nu: float) -> float:
    """Small-damping onset estimate F = 4*sqrt(mu^2 + nu^2)."""
    return 4.0 * math.hypot(mu, nu)


def time_inner_product(f, g):
    """<f, g> = (1/2pi) integral_0^{2pi} conj(f) g dt on a uniform period grid."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ShapeError("inner product needs equal sample counts")
    return complex(np.mean(np.conj(f) * g))


def eval_series(coeffs: np.ndarray, harmonics: np.ndarray, t, derivative: int = 0):
    """Evaluate sum_m c_m (i m)^d e^{i m t} at times t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    factors = coeffs * (1j * harmonics) ** derivative
    return np.exp(1j * np.outer(t, harmonics)) @ factors


@dataclass
class FloquetPair:
    """Critical eigenfunction p1 (and adjoint) of the damped Mathieu operator.

    Coefficients are stored over the odd harmonics m; both functions are real
    (conjugate-symmetric coefficients).  The companion component is
    q1 = -(p1' - mu p1)/omega, and the complex response p1 + i q1 is
    normalized to unit time-averaged modulus, with the e^{i t} coefficient
    gauge-fixed to positive real part.
    """

    f_c: float
    mu: float
    omega: float
    harmonics: np.ndarray
    p1_coeffs: np.ndarray
    p1_adj_coeffs: np.ndarray

    @property
    def q1_coeffs(self) -> np.ndarray:
        return (self.mu - 1j * self.harmonics) * self.p1_coeffs / self.omega

    @property
    def u_coeffs(self) -> np.ndarray:
        """Coefficients of the complex response p1 + i q1."""
        return self.p1_coeffs + 1j * self.q1_coeffs

    def p1(self, t, derivative: int = 0):
        return eval_series(self.p1_coeffs, self.harmonics, t, derivative).real

    def q1(self, t, derivative: int = 0):
        return eval_series(self.q1_coeffs, self.harmonics, t, derivative).real

    def p1_adj(self, t, derivative: int = 0):
        return eval_series(self.p1_adj_coeffs, self.harmonics, t, derivative).real

    def u(self, t):
        return eval_series(self.u_coeffs, self.harmonics, t)

    def mathieu_residual(self) -> float:
        """Max modulus of L p1 coefficients on the extended harmonic set."""
        m_ext = np.arange(self.harmonics.min() - 2, self.harmonics.max() + 3, 2)
        a_ext = np.zeros(m_ext.size, dtype=complex)
        a_ext[np.isin(m_ext, self.harmonics)] = self.p1_coeffs
        d = self.mu**2 + self.omega**2 - m_ext**2 - 2j * self.mu * m_ext
        res = d * a_ext
        coupling = 0.5 * self.omega * self.f_c
        res[1:] += coupling * a_ext[:-1]
        res[:-1] += coupling * a_ext[1:]
        return float(np.max(np.abs(res)))


def _hill_matrices(mu: float, omega: float, j_trunc: int):
    """Diagonal and coupling blocks of the odd-harmonic Hill system
    d_m a_m + (omega F / 2)(a_{m-2} + a_{m+2}) = 0."""
    m = np.arange(-(2 * j_trunc + 1), 2 * j_trunc + 2, 2)
    d = np.diag(mu**2 + omega**2 - m.astype(float) ** 2 - 2j * mu * m)
    w = np.zeros_like(d)
    idx = np.arange(m.size - 1)
    w[idx, idx + 1] = 0.5 * omega
    w[idx + 1, idx] = 0.5 * omega
    return m, d, w


def _null_vector(a: np.ndarray) -> np.ndarray:
    _, s, vh = scipy.linalg.svd(a)
    if s[-1] > 1e-6 * s[0]:
        raise CriticalForcingNotFoundError(0.0, 0.0,
                                           "harmonic system is not singular at F_c")
    return np.conj(vh[-1])


def _realize(coeffs: np.ndarray, harmonics: np.ndarray) -> np.ndarray:
    """Rotate a null vector by a global phase so the function it represents
    is real, i.e. coefficients become conjugate-symmetric under m -> -m."""
    flipped = np.conj(coeffs[::-1])  # harmonics are symmetric about zero
    denom = np.vdot(coeffs, coeffs)
    rho = np.vdot(coeffs, flipped) / denom
    if abs(abs(rho) - 1.0) > 1e-8:
        raise CriticalForcingNotFoundError(0.0, 0.0,
                                           "critical eigenvector is not real")
    out = coeffs * np.exp(1j * np.angle(rho) / 2.0)
    sym_err = np.max(np.abs(np.conj(out[::-1]) - out))
    if sym_err > 1e-8 * np.max(np.abs(out)):
        raise CriticalForcingNotFoundError(0.0, 0.0,
                                           "failed to gauge-fix a real eigenvector")
    # exact symmetrization to suppress roundoff
    return 0.5 * (out + np.conj(out[::-1]))


def mathieu_critical(p: ModelParams, j_trunc: int = DEFAULT_HARMONICS) -> FloquetPair:
    """Smallest positive forcing with a 2*pi-periodic Mathieu solution.

    Solves the generalized eigenproblem D a = -F W a on the truncated odd
    harmonics, then extracts the critical eigenfunction and its adjoint
    (the operator with the sign of the damping reversed) at F_c.
    """
    if p.mu >= 0:
        raise ParameterError("subharmonic onset needs damping mu < 0")
    harmonics, d, w = _hill_matrices(p.mu, p.omega, j_trunc)
    vals = scipy.linalg.eigvals(d, w)
    cand = -vals
    real = cand[np.abs(cand.imag) <= 1e-8 * (1.0 + np.abs(cand.real))].real
    positive = np.sort(real[real > 1e-12])
    if positive.size == 0:
        raise CriticalForcingNotFoundError(0.0, float("inf"),
                                           "no real positive Hill eigenvalue")
    f_c = float(positive[0])

    a = _realize(_null_vector(d + f_c * w), harmonics)
    adj = _realize(_null_vector(np.conj(d) + f_c * w), harmonics)

    # normalize <p1 + i q1, p1 + i q1> = 1 and fix the sign gauge
    u_coeffs = a * (p.omega + harmonics + 1j * p.mu) / p.omega
    a = a / math.sqrt(float(np.sum(np.abs(u_coeffs) ** 2)))
    i_one = int(np.nonzero(harmonics == 1)[0][0])
    if (a[i_one] * (p.omega + 1.0 + 1j * p.mu)).real < 0:
        a = -a
    # adjoint sign: make <p1_adj, p1> positive (scale cancels in all ratios)
    if float(np.real(np.vdot(adj, a))) < 0:
        adj = -adj
    return FloquetPair(f_c=f_c, mu=p.mu, omega=p.omega, harmonics=harmonics,
                       p1_coeffs=a, p1_adj_coeffs=adj)


# ---- monodromy route ----

def _monodromy(f: float, mu: float, omega: float) -> np.ndarray:
    """Fundamental matrix of the damped Mathieu equation over one forcing
    period pi, integrated as u' = v, v' = 2 mu v - (mu^2 + omega^2
    + omega f cos 2t) u."""
    w0_sq = mu**2 + omega**2

    def rhs(t, y):
        coeff = w0_sq + omega * f * math.cos(2.0 * t)
        u1, v1, u2, v2 = y
        return [v1, 2.0 * mu * v1 - coeff * u1,
                v2, 2.0 * mu * v2 - coeff * u2]

    sol = scipy.integrate.solve_ivp(rhs, (0.0, math.pi), [1.0, 0.0, 0.0, 1.0],
                                    method="DOP853", rtol=1e-12, atol=1e-14)
    y = sol.y[:, -1]
    return np.array([[y[0], y[2]], [y[1], y[3]]])


def floquet_multipliers(f: float, p: ModelParams) -> np.ndarray:
    """Multipliers of the flat-state linearization over one forcing period."""
    return np.linalg.eigvals(_monodromy(f, p.mu, p.omega))


def monodromy_critical(p: ModelParams, f_hi: float | None = None,
                       max_doublings: int = 8) -> float:
    """Critical forcing located by bisection on the subharmonic criterion
    trace(Phi) + 1 + e^{2 mu pi} = 0 (a multiplier crossing -1)."""
    if p.mu >= 0:
        raise ParameterError("subharmonic onset needs damping mu < 0")
    offset = 1.0 + math.exp(2.0 * math.pi * p.mu)

    def crit(f):
        phi = _monodromy(f, p.mu, p.omega)
        return phi[0, 0] + phi[1, 1] + offset

    f_lo = 0.0
    if f_hi is None:
        f_hi = max(2.0 * weak_critical_forcing(p.mu, p.omega - 1.0), 8.0 * abs(p.mu))
    for _ in range(max_doublings):
        if crit(f_hi) < 0.0:
            break
        f_hi *= 2.0
    else:
        raise CriticalForcingNotFoundError(f_lo, f_hi)
    return float(scipy.optimize.brentq(crit, f_lo, f_hi, xtol=1e-12, rtol=1e-14))
