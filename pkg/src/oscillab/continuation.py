"""Steady states, pseudo-arclength continuation, and stability flags.

Steady solutions of the amplitude equation, and time-periodic solutions of
the forced model written as a truncated harmonic expansion
U(x, t) = sum_j U_j(x) e^{i j t} over j in {-3, -1, 1, 3}, are found by
Newton iteration on the periodic pseudospectral collocation residual.  The
conjugate couplings make the systems only real-linear, so Newton runs on the
stacked real and imaginary parts with a matrix-free Krylov solver
preconditioned by the inverse diagonal symbol of the linear part.
Reflection symmetry about the domain centre is imposed on every iterate,
which quotients out translations.  Branches are traced with secant
pseudo-arclength steps; folds are flagged at sign changes of the parameter
increment and refined with a local quadratic fit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse.linalg

from . import etd, spectral
from .core import FcglParams, ModelParams
from .errors import DivergenceError, ParameterError, StalledBranchError
from .fields import ComplexField

TWO_PI = 2.0 * math.pi


def reflect(values: np.ndarray) -> np.ndarray:
    """Samples of x -> f(-x) on the periodic grid (reflection through x = 0)."""
    return np.roll(values[..., ::-1], 1, axis=-1)


def _gmres(op, rhs, M=None, rtol=1e-8, restart=150, maxiter=4):
    kwargs = dict(M=M, atol=0.0, restart=restart, maxiter=maxiter)
    try:
        x, _ = scipy.sparse.linalg.gmres(op, rhs, rtol=rtol, **kwargs)
    except TypeError:  # older scipy spells the relative tolerance "tol"
        x, _ = scipy.sparse.linalg.gmres(op, rhs, tol=rtol, **kwargs)
    return x


# ---- steady amplitude-equation problem ----

class FcglSteadyProblem:
    """Residual, matrix-free Jacobian, and preconditioner for steady states
    of the forced amplitude equation; the continuation parameter is gamma."""

    def __init__(self, params: FcglParams, n: int = 512, length: float = 20.0 * math.pi):
        self.params = params
        self.n = n
        self.length = length
        self.pad = spectral.padded_size(n)
        d2 = -spectral.wavenumbers(n, length) ** 2
        d2[n // 2] = 0.0
        self.symbol = (params.mu + 1j * params.nu) + (params.alpha + 1j * params.beta) * d2
        self.size = 2 * n

    def unpack(self, z: np.ndarray) -> np.ndarray:
        return z[: self.n] + 1j * z[self.n:]

    def pack(self, a: np.ndarray) -> np.ndarray:
        return np.concatenate([a.real, a.imag])

    def symmetrize(self, z: np.ndarray) -> np.ndarray:
        a = self.unpack(z)
        return self.pack(0.5 * (a + reflect(a)))

    def norm_of(self, z: np.ndarray) -> float:
        a = self.unpack(z)
        return float(np.sqrt(2.0 * np.mean(np.abs(a) ** 2)))

    def _fine(self, a_hat: np.ndarray) -> np.ndarray:
        return np.fft.ifft(spectral.pad_coeffs(a_hat, self.pad)) * (self.pad / self.n)

    def _coarse_hat(self, w_fine: np.ndarray) -> np.ndarray:
        return spectral.truncate_coeffs(np.fft.fft(w_fine), self.n) * (self.n / self.pad)

    def residual(self, z: np.ndarray, gamma: float) -> np.ndarray:
        a = self.unpack(z)
        a_hat = np.fft.fft(a)
        fine = self._fine(a_hat)
        w = self.params.c * (np.abs(fine) ** 2) * fine
        out = np.fft.ifft(self.symbol * a_hat + self._coarse_hat(w)) + gamma * np.conj(a)
        return self.pack(out)

    def jacobian(self, z: np.ndarray, gamma: float):
        a_hat = np.fft.fft(self.unpack(z))
        fine = self._fine(a_hat)
        two_abs2 = 2.0 * np.abs(fine) ** 2
        sq = fine**2
        c = self.params.c

        def matvec(dz):
            d = self.unpack(np.asarray(dz))
            d_hat = np.fft.fft(d)
            d_fine = self._fine(d_hat)
            w = c * (two_abs2 * d_fine + sq * np.conj(d_fine))
            out = np.fft.ifft(self.symbol * d_hat + self._coarse_hat(w)) + gamma * np.conj(d)
            return self.pack(out)

        return scipy.sparse.linalg.LinearOperator(
            (self.size, self.size), matvec=matvec, dtype=float)

    def dparam(self, z: np.ndarray, gamma: float) -> np.ndarray:
        return self.pack(np.conj(self.unpack(z)))

    def preconditioner(self, floor: float = 1e-2):
        sym = self.symbol.copy()
        small = np.abs(sym) < floor
        sym[small] = floor * np.exp(1j * np.angle(sym[small]))

        def apply(z):
            a_hat = np.fft.fft(self.unpack(np.asarray(z))) / sym
            return self.pack(np.fft.ifft(a_hat))

        return scipy.sparse.linalg.LinearOperator(
            (self.size, self.size), matvec=apply, dtype=float)

    def field_of(self, z: np.ndarray) -> ComplexField:
        return ComplexField(self.length, self.unpack(z))


# ---- harmonic collocation problem for the forced model ----

DEFAULT_PDE_HARMONICS = (-3, -1, 1, 3)


class PdeHarmonicProblem:
    """Time-periodic states of the forced model as coupled harmonic profiles.

    The residual of harmonic j is

        (mu + i(omega - j)) U_j + (alpha + i beta) U_j'' + N_j = 0

    with N_j the projection of C|U|^2 U + i Re(U) F cos(2t) onto e^{i j t},
    evaluated by collocation at n_colloc equispaced times (alias-free for the
    retained odd harmonics).  The continuation parameter is F.
    """

    def __init__(self, params: ModelParams, n: int = 1280,
                 length: float = 200.0 * math.pi,
                 harmonics=DEFAULT_PDE_HARMONICS, n_colloc: int = 16):
        self.params = params
        self.n = n
        self.length = length
        self.harmonics = np.asarray(harmonics, dtype=int)
        nh = self.harmonics.size
        if n_colloc <= 4 * int(np.max(np.abs(self.harmonics))):
            raise ParameterError("n_colloc too small to dealias the cubic in time")
        self.pad = spectral.padded_size(n)
        d2 = -spectral.wavenumbers(n, length) ** 2
        d2[n // 2] = 0.0
        self.symbol = ((params.mu + 1j * (params.omega - self.harmonics))[:, None]
                       + (params.alpha + 1j * params.beta) * d2[None, :])
        t = TWO_PI * np.arange(n_colloc) / n_colloc
        self.carrier = np.exp(1j * np.outer(t, self.harmonics))        # (M, nh)
        self.project = np.exp(-1j * np.outer(self.harmonics, t)) / n_colloc
        self.cos2t = np.cos(2.0 * t)
        self.size = 2 * nh * n

    def unpack(self, z: np.ndarray) -> np.ndarray:
        half = self.size // 2
        nh = self.harmonics.size
        return (z[:half] + 1j * z[half:]).reshape(nh, self.n)

    def pack(self, profiles: np.ndarray) -> np.ndarray:
        return np.concatenate([profiles.real.ravel(), profiles.imag.ravel()])

    def symmetrize(self, z: np.ndarray) -> np.ndarray:
        p = self.unpack(z)
        return self.pack(0.5 * (p + reflect(p)))

    def norm_of(self, z: np.ndarray) -> float:
        """Time-averaged solution norm, sqrt((2/L) int sum_j |U_j|^2 dx)."""
        p = self.unpack(z)
        return float(np.sqrt(2.0 * np.sum(np.abs(p) ** 2) / self.n))

    def _fine(self, p_hat: np.ndarray) -> np.ndarray:
        return np.fft.ifft(spectral.pad_coeffs(p_hat, self.pad), axis=-1) * (self.pad / self.n)

    def _coarse(self, w_fine: np.ndarray) -> np.ndarray:
        hat = spectral.truncate_coeffs(np.fft.fft(w_fine, axis=-1), self.n)
        return np.fft.ifft(hat, axis=-1) * (self.n / self.pad)

    def _collocation(self, z: np.ndarray) -> np.ndarray:
        """Fast-frame samples U(x, t_i) on the dealiasing grid, shape (M, pad)."""
        p_hat = np.fft.fft(self.unpack(z), axis=-1)
        return self.carrier @ self._fine(p_hat)

    def residual(self, z: np.ndarray, f: float) -> np.ndarray:
        p = self.unpack(z)
        lin = np.fft.ifft(self.symbol * np.fft.fft(p, axis=-1), axis=-1)
        u = self._collocation(z)
        w = self.params.c * (np.abs(u) ** 2) * u
        w += (1j * f) * self.cos2t[:, None] * u.real
        return self.pack(lin + self._coarse(self.project @ w))

    def jacobian(self, z: np.ndarray, f: float):
        u = self._collocation(z)
        two_abs2 = 2.0 * np.abs(u) ** 2
        sq = u**2
        c = self.params.c

        def matvec(dz):
            dp = self.unpack(np.asarray(dz))
            dp_hat = np.fft.fft(dp, axis=-1)
            lin = np.fft.ifft(self.symbol * dp_hat, axis=-1)
            du = self.carrier @ self._fine(dp_hat)
            dw = c * (two_abs2 * du + sq * np.conj(du))
            dw += (1j * f) * self.cos2t[:, None] * du.real
            return self.pack(lin + self._coarse(self.project @ dw))

        return scipy.sparse.linalg.LinearOperator(
            (self.size, self.size), matvec=matvec, dtype=float)

    def dparam(self, z: np.ndarray, f: float) -> np.ndarray:
        u = self._collocation(z)
        w = 1j * self.cos2t[:, None] * u.real
        return self.pack(self._coarse(self.project @ w))

    def preconditioner(self, floor: float = 2e-2):
        sym = self.symbol.copy()
        small = np.abs(sym) < floor
        sym[small] = floor * np.exp(1j * np.angle(sym[small]))

        def apply(z):
            p_hat = np.fft.fft(self.unpack(np.asarray(z)), axis=-1) / sym
            return self.pack(np.fft.ifft(p_hat, axis=-1))

        return scipy.sparse.linalg.LinearOperator(
            (self.size, self.size), matvec=apply, dtype=float)

    def reconstruct(self, z: np.ndarray, t: float = 0.0) -> ComplexField:
        p = self.unpack(z)
        phases = np.exp(1j * self.harmonics * t)
        return ComplexField(self.length, phases @ p)


# ---- converged state containers ----

@dataclass
class SteadyFcglState:
    field: ComplexField
    gamma: float
    residual_norm: float
    iterations: int


@dataclass
class HarmonicPdeState:
    length: float
    harmonics: np.ndarray
    profiles: np.ndarray          # (n_harmonics, n) complex
    f: float
    residual_norm: float = math.nan

    @property
    def n(self) -> int:
        return self.profiles.shape[-1]

    def reconstruct(self, t: float = 0.0) -> ComplexField:
        phases = np.exp(1j * self.harmonics * t)
        return ComplexField(self.length, phases @ self.profiles)

    @property
    def norm(self) -> float:
        return float(np.sqrt(2.0 * np.sum(np.abs(self.profiles) ** 2) / self.n))


# ---- Newton solver ----

def newton_solve(problem, z0: np.ndarray, param: float, tol: float = 1e-10,
                 max_iter: int = 25, gmres_restart: int = 150):
    """Damped inexact Newton on the packed real system; returns (z, res, iters)."""
    precond = problem.preconditioner()
    z = problem.symmetrize(np.asarray(z0, dtype=float))
    r = problem.residual(z, param)
    rn = float(np.max(np.abs(r)))
    for it in range(max_iter):
        if rn < tol:
            return z, rn, it
        inner_rtol = 1e-4 if rn > 1e-4 else 1e-8
        dz = _gmres(problem.jacobian(z, param), -r, M=precond,
                    rtol=inner_rtol, restart=gmres_restart)
        accepted = False
        for scale in (1.0, 0.5, 0.25, 0.125):
            z_try = problem.symmetrize(z + scale * dz)
            r_try = problem.residual(z_try, param)
            rn_try = float(np.max(np.abs(r_try)))
            if rn_try < rn or rn_try < tol:
                z, r, rn = z_try, r_try, rn_try
                accepted = True
                break
        if not accepted:
            raise DivergenceError(rn)
    if rn < tol:
        return z, rn, max_iter
    raise DivergenceError(rn)


def newton_fcgl(seed: ComplexField, gamma: float, params: FcglParams,
                tol: float = 1e-10, max_iter: int = 25) -> SteadyFcglState:
    """Converge a steady amplitude-equation state from a seed field."""
    problem = FcglSteadyProblem(replace(params, gamma=gamma), n=seed.n,
                                length=seed.length)
    z, rn, it = newton_solve(problem, problem.pack(seed.values), gamma,
                             tol=tol, max_iter=max_iter)
    return SteadyFcglState(field=problem.field_of(z), gamma=gamma,
                           residual_norm=rn, iterations=it)


def newton_pde(seed: HarmonicPdeState, f: float, params: ModelParams,
               tol: float = 1e-10, max_iter: int = 25) -> HarmonicPdeState:
    """Converge a harmonic time-periodic state of the forced model."""
    problem = PdeHarmonicProblem(params, n=seed.n, length=seed.length,
                                 harmonics=tuple(seed.harmonics))
    z, rn, _ = newton_solve(problem, problem.pack(seed.profiles), f,
                            tol=tol, max_iter=max_iter)
    return HarmonicPdeState(length=seed.length, harmonics=problem.harmonics,
                            profiles=problem.unpack(z), f=f, residual_norm=rn)


# ---- snapshot projection ----

def project_snapshots(fields: list[ComplexField], times: np.ndarray,
                      harmonics=DEFAULT_PDE_HARMONICS, f: float = math.nan
                      ) -> HarmonicPdeState:
    """Least-squares fit of harmonic profiles to stroboscopically offset
    snapshots; for equispaced times this is the discrete Fourier projection
    P_j = (1/M) sum_s U(x, t_s) e^{-i j t_s}."""
    harmonics = np.asarray(harmonics, dtype=int)
    stack = np.stack([fld.values for fld in fields])          # (M, n)
    design = np.exp(1j * np.outer(np.asarray(times), harmonics))
    profiles, *_ = np.linalg.lstsq(design, stack, rcond=None)
    return HarmonicPdeState(length=fields[0].length, harmonics=harmonics,
                            profiles=profiles, f=f)


def timestepper_harmonics(stepper: etd.SpectralStepper, f: float,
                          harmonics=DEFAULT_PDE_HARMONICS,
                          n_snapshots: int = 16) -> HarmonicPdeState:
    """Collect n_snapshots over one response period and project; the stepper
    dt must divide the snapshot spacing 2*pi/n_snapshots."""
    spacing = TWO_PI / n_snapshots
    sub = int(round(spacing / stepper.scheme.dt))
    if abs(sub * stepper.scheme.dt - spacing) > 1e-9 * spacing:
        raise ParameterError("dt must divide the snapshot spacing")
    fields, times = [], []
    for _ in range(n_snapshots):
        fields.append(stepper.field)
        times.append(stepper.t)
        stepper.run(sub)
    return project_snapshots(fields, np.asarray(times), harmonics, f=f)


# ---- branches ----

@dataclass
class ContinuationControls:
    ds0: float = 0.01
    ds_min: float = 1e-5
    ds_max: float = 0.05
    grow: float = 1.3
    fast_iters: int = 3
    max_points: int = 300
    param_min: float = -math.inf
    param_max: float = math.inf
    norm_max: float = math.inf
    tol: float = 1e-10
    max_corrector: int = 8
    gmres_restart: int = 150


@dataclass
class BranchPoint:
    index: int
    param: float
    norm: float
    z: np.ndarray = field(repr=False)
    arclength: float = 0.0
    stability: str = "unclassified"
    fold: bool = False


@dataclass
class Branch:
    points: list[BranchPoint]
    folds: list[float]

    @property
    def params(self) -> np.ndarray:
        return np.array([pt.param for pt in self.points])

    @property
    def norms(self) -> np.ndarray:
        return np.array([pt.norm for pt in self.points])


class _CorrectorFailed(Exception):
    pass


def _wnorm(dz: np.ndarray, dp: float) -> float:
    return math.sqrt(float(dz @ dz) / dz.size + dp * dp)


def _corrector(problem, precond, z_pred, p_pred, tau_z, tau_p, controls):
    z, pm = z_pred.copy(), p_pred
    nz = z.size
    row = math.sqrt(float(tau_z @ tau_z) / nz**2 + tau_p**2)
    for it in range(1, controls.max_corrector + 1):
        r = problem.residual(z, pm)
        cons = (float(tau_z @ (z - z_pred)) / nz + tau_p * (pm - p_pred)) / row
        if max(float(np.max(np.abs(r))), abs(cons)) < controls.tol:
            return z, pm, it
        rn = float(np.max(np.abs(r)))
        inner_rtol = 1e-5 if rn > 1e-5 else 1e-8
        jac = problem.jacobian(z, pm)
        rp = problem.dparam(z, pm)

        def matvec(dy):
            dz, dp = dy[:nz], dy[nz]
            top = jac.matvec(dz) + rp * dp
            bot = (float(tau_z @ dz) / nz + tau_p * dp) / row
            return np.concatenate([top, [bot]])

        def mprec(dy):
            return np.concatenate([precond.matvec(dy[:nz]), dy[nz:]])

        op = scipy.sparse.linalg.LinearOperator((nz + 1, nz + 1),
                                                matvec=matvec, dtype=float)
        mop = scipy.sparse.linalg.LinearOperator((nz + 1, nz + 1),
                                                 matvec=mprec, dtype=float)
        rhs = -np.concatenate([r, [cons]])
        dy = _gmres(op, rhs, M=mop, rtol=inner_rtol,
                    restart=controls.gmres_restart)
        z = problem.symmetrize(z + dy[:nz])
        pm += float(dy[nz])
    # accept late convergence if the last update got us there
    r = problem.residual(z, pm)
    cons = (float(tau_z @ (z - z_pred)) / nz + tau_p * (pm - p_pred)) / row
    if max(float(np.max(np.abs(r))), abs(cons)) < controls.tol:
        return z, pm, controls.max_corrector
    raise _CorrectorFailed


def _initial_tangent(problem, precond, z, param, direction, restart):
    rp = problem.dparam(z, param)
    b = _gmres(problem.jacobian(z, param), -rp, M=precond, rtol=1e-8,
               restart=restart)
    scale = _wnorm(b, 1.0)
    tz, tp = b / scale, 1.0 / scale
    if math.copysign(1.0, tp) != math.copysign(1.0, direction):
        tz, tp = -tz, -tp
    return tz, tp


def continue_branch(problem, z0: np.ndarray, param0: float, direction: int = -1,
                    controls: ContinuationControls | None = None) -> Branch:
    """Trace a solution branch from a converged starting point.

    direction sets the initial parameter direction (+1 or -1).  Steps adapt
    between ds_min and ds_max: halve on corrector failure, grow after fast
    convergence.  Raises StalledBranchError (carrying the partial branch)
    when the step size underflows.
    """
    controls = controls or ContinuationControls()
    precond = problem.preconditioner()
    z, rn, _ = newton_solve(problem, z0, param0, tol=controls.tol)
    points = [BranchPoint(index=0, param=param0, norm=problem.norm_of(z), z=z)]
    tau_z, tau_p = _initial_tangent(problem, precond, z, param0, direction,
                                    controls.gmres_restart)
    param = param0
    ds = controls.ds0
    arclength = 0.0
    while len(points) < controls.max_points:
        z_pred = z + ds * tau_z
        p_pred = param + ds * tau_p
        try:
            z_new, p_new, iters = _corrector(problem, precond, z_pred, p_pred,
                                             tau_z, tau_p, controls)
        except _CorrectorFailed:
            ds *= 0.5
            if ds < controls.ds_min:
                branch = Branch(points=points, folds=[])
                _mark_folds(branch)
                raise StalledBranchError(branch)
            continue
        dz, dp = z_new - z, p_new - param
        step = _wnorm(dz, dp)
        tau_z, tau_p = dz / step, dp / step
        z, param = z_new, p_new
        arclength += step
        points.append(BranchPoint(index=len(points), param=param,
                                  norm=problem.norm_of(z), z=z,
                                  arclength=arclength))
        if iters <= controls.fast_iters:
            ds = min(ds * controls.grow, controls.ds_max)
        if not (controls.param_min <= param <= controls.param_max):
            break
        if points[-1].norm > controls.norm_max:
            break
    branch = Branch(points=points, folds=[])
    _mark_folds(branch)
    return branch


def _mark_folds(branch: Branch) -> None:
    """Flag turning points and refine each fold parameter by a quadratic fit
    of param against arclength through the three bracketing points."""
    pts = branch.points
    folds = []
    for i in range(len(pts) - 2):
        d1 = pts[i + 1].param - pts[i].param
        d2 = pts[i + 2].param - pts[i + 1].param
        if d1 == 0.0 or d2 == 0.0 or math.copysign(1.0, d1) == math.copysign(1.0, d2):
            continue
        s = np.array([pts[i].arclength, pts[i + 1].arclength, pts[i + 2].arclength])
        p = np.array([pts[i].param, pts[i + 1].param, pts[i + 2].param])
        coeff = np.polyfit(s - s[1], p, 2)
        if coeff[0] != 0.0:
            s_star = -coeff[1] / (2.0 * coeff[0])
            s_star = min(max(s_star, s[0] - s[1]), s[2] - s[1])
            p_star = float(np.polyval(coeff, s_star))
        else:
            p_star = pts[i + 1].param
        pts[i + 1].fold = True
        folds.append(p_star)
    branch.folds = folds


def merge_branches(back: Branch, forward: Branch) -> Branch:
    """Join two branches traced in opposite directions from one seed point."""
    pts = [replace_pt for replace_pt in reversed(back.points[1:])] + forward.points
    merged = []
    arc = 0.0
    prev = None
    for i, pt in enumerate(pts):
        if prev is not None:
            arc += _wnorm(pt.z - prev.z, pt.param - prev.param)
        merged.append(BranchPoint(index=i, param=pt.param, norm=pt.norm, z=pt.z,
                                  arclength=arc, stability=pt.stability))
        prev = pt
    out = Branch(points=merged, folds=[])
    _mark_folds(out)
    return out


# ---- stability ----

def leading_rates_fcgl(problem: FcglSteadyProblem, z: np.ndarray, gamma: float,
                       k: int = 4, horizon: float = 1.0, dt: float = 0.005,
                       seed: int = 0) -> np.ndarray:
    """Leading eigenvalue growth rates of the linearization about a steady
    state, from Arnoldi iteration on the time-horizon propagator (the
    linearized equation is integrated with the same exponential scheme)."""
    p = problem.params
    a_hat = np.fft.fft(problem.unpack(z))
    fine = problem._fine(a_hat)
    two_abs2 = 2.0 * np.abs(fine) ** 2
    sq = fine**2
    c = p.c
    scheme = etd.make_scheme(etd.fcgl_linear_symbol(p, problem.n, problem.length), dt)
    n_steps = int(round(horizon / dt))

    def nonlinear(d_hat, t):
        d_fine = problem._fine(d_hat)
        w = c * (two_abs2 * d_fine + sq * np.conj(d_fine)) + gamma * np.conj(d_fine)
        return problem._coarse_hat(w)

    def propagate(v):
        d_hat = np.fft.fft(problem.unpack(np.asarray(v)))
        stepper = etd.Etd2Stepper(scheme, nonlinear, d_hat)
        stepper.run(n_steps)
        return problem.pack(np.fft.ifft(stepper.u))

    op = scipy.sparse.linalg.LinearOperator((problem.size, problem.size),
                                            matvec=propagate, dtype=float)
    v0 = np.random.default_rng(seed).standard_normal(problem.size)
    vals = scipy.sparse.linalg.eigs(op, k=k, which="LM", v0=v0, tol=1e-9,
                                    return_eigenvectors=False)
    rates = np.log(np.abs(vals)) / horizon
    return np.sort(rates)[::-1]


def classify_stability_fcgl(problem: FcglSteadyProblem, z: np.ndarray,
                            gamma: float, threshold: float = 1e-8) -> str:
    try:
        rates = leading_rates_fcgl(problem, z, gamma)
    except Exception:
        return "indeterminate"
    return "stable" if rates[0] < threshold else "unstable"


def classify_stability_pde(state: HarmonicPdeState, params: ModelParams,
                           periods: int = 40, noise: float = 1e-6,
                           rng_seed: int = 0, steps_per_period: int = 200,
                           threshold: float = 1e-4):
    """Time-stepping stability flag: perturb the reconstruction by relative
    noise, evolve, and fit the exponential growth of the stroboscopic
    deviation.  Returns (label, fitted_rate)."""
    p = replace(params, f=state.f)
    dt = TWO_PI / steps_per_period
    base = state.reconstruct(0.0)
    rng = np.random.default_rng(rng_seed)
    rms = math.sqrt(float(np.mean(np.abs(base.values) ** 2)))
    bump = noise * rms * (rng.standard_normal(base.n)
                          + 1j * rng.standard_normal(base.n)) / math.sqrt(2.0)
    pert = ComplexField(base.length, base.values + bump)
    st_base = etd.make_pde_stepper(base, p, dt)
    st_pert = etd.make_pde_stepper(pert, p, dt)
    times, devs = [], []
    for k in range(periods):
        st_base.run(steps_per_period)
        st_pert.run(steps_per_period)
        diff = float(np.sqrt(2.0 * np.sum(np.abs(st_pert.u - st_base.u) ** 2))
                     / st_base.u.size)
        times.append(st_base.t)
        devs.append(diff)
    times = np.asarray(times)
    devs = np.asarray(devs)
    norm0 = state.norm
    ok = (devs > 1e-13) & (devs < 1e-2 * norm0)
    if np.count_nonzero(ok) < 5:
        return "indeterminate", math.nan
    rate = float(np.polyfit(times[ok], np.log(devs[ok]), 1)[0])
    label = "stable" if rate < threshold else "unstable"
    return label, rate


def classify_branch(branch: Branch, classify, stride: int = 1) -> None:
    """Apply classify(z, param) -> label to every stride-th point in place."""
    for pt in branch.points:
        if stride > 0 and pt.index % stride == 0:
            pt.stability = classify(pt.z, pt.param)


# ---- branch comparison ----

def _monotone_segments(params: np.ndarray, norms: np.ndarray, fold_idx):
    cuts = [0] + [i for i in fold_idx] + [len(params) - 1]
    segs = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a >= 1:
            segs.append((params[a:b + 1], norms[a:b + 1]))
    return segs


def branch_overlay_max_diff(branch_a: Branch, branch_b: Branch,
                            param_map=None, norm_map=None,
                            max_segments: int = 3, samples: int = 40) -> float:
    """Largest relative norm difference between two branches compared
    segment-by-segment between folds, after mapping branch_b coordinates
    through param_map/norm_map.  Returns nan when nothing overlaps."""
    param_map = param_map or (lambda x: x)
    norm_map = norm_map or (lambda x: x)
    pa, na = branch_a.params, branch_a.norms
    pb = np.array([param_map(v) for v in branch_b.params])
    nb = np.array([norm_map(v) for v in branch_b.norms])
    fa = [pt.index for pt in branch_a.points if pt.fold]
    fb = [pt.index for pt in branch_b.points if pt.fold]
    segs_a = _monotone_segments(pa, na, fa)[:max_segments]
    segs_b = _monotone_segments(pb, nb, fb)[:max_segments]
    worst = math.nan
    for (qa, ma), (qb, mb) in zip(segs_a, segs_b):
        lo = max(qa.min(), qb.min())
        hi = min(qa.max(), qb.max())
        if hi <= lo:
            continue
        grid = np.linspace(lo, hi, samples)
        ia = np.argsort(qa)
        ib = np.argsort(qb)
        va = np.interp(grid, qa[ia], ma[ia])
        vb = np.interp(grid, qb[ib], mb[ib])
        rel = np.max(np.abs(va - vb) / np.maximum(np.abs(vb), 1e-30))
        worst = rel if math.isnan(worst) else max(worst, rel)
    return worst
