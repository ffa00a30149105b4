"""Classical dynamics with mass and proper time as a canonical pair.

The extended phase space is ``(x, p, tau, m)`` evolved in laboratory time
``t`` by

    xdot = dH/dp,   pdot = -dH/dx,   taudot = (1/c^2) dH/dm,   mdot = -(1/c^2) dH/dtau.

Integration is fixed-step classical RK4.  Potentials are supplied in closed
form; gauge-consistent potentials obey ``dphi/dt + phi dphi/dtau / c^2 = 0``,
whose implicit solutions are handled by :func:`gauge_solve`.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import OptimizeWarning, brentq, curve_fit


class IntegrationError(RuntimeError):
    """Raised when an integrated trajectory leaves the physical domain (mass <= 0)."""


class RootNotBracketedError(ValueError):
    pass


class ShockError(ValueError):
    """The implicit gauge solution is multivalued at the requested point."""


@dataclass
class VarMassState:
    x: float
    p: float
    tau: float
    mass: float
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p, self.tau, self.mass], dtype=float)

    @classmethod
    def from_array(cls, y, t=0.0) -> VarMassState:
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]), float(t))


@dataclass(frozen=True)
class IntegratorConfig:
    h: float = 1e-3
    t_end: float = 1.0
    stride: int = 1
    t0: float = 0.0

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step h must be positive")
        if self.t_end < self.t0:
            raise ValueError("t_end must not precede t0")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    @property
    def steps(self) -> int:
        n = (self.t_end - self.t0) / self.h
        return int(round(n))


def rk4_integrate(rhs, y0, config: IntegratorConfig):
    """Classical RK4 with fixed step.  Returns ``(t, Y)`` sampled every ``stride`` steps."""
    y = np.array(y0, dtype=float)
    t = config.t0
    h = config.h
    ts, ys = [t], [y.copy()]
    for i in range(1, config.steps + 1):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = config.t0 + i * h
        if i % config.stride == 0 or i == config.steps:
            ts.append(t)
            ys.append(y.copy())
    return np.array(ts), np.array(ys)


@dataclass
class VarMassTrajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    tau: np.ndarray
    mass: np.ndarray
    phi: np.ndarray
    extra: dict = field(default_factory=dict)

    @property
    def velocity(self) -> np.ndarray:
        return self.p / self.mass

    def state(self, i: int) -> VarMassState:
        return VarMassState(self.x[i], self.p[i], self.tau[i], self.mass[i], self.t[i])

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "p", "tau", "mass", "phi"])
            for row in zip(self.t, self.x, self.p, self.tau, self.mass, self.phi):
                w.writerow([f"{v:.17g}" for v in row])


# --- potentials ----------------------------------------------------------------


def _zero(*args):
    return 0.0


@dataclass(frozen=True)
class GravPotential:
    """Gravitational potential ``phi(x, tau, t)`` with its x and tau partials."""

    value: Callable = _zero
    dx: Callable = _zero
    dtau: Callable = _zero


@dataclass(frozen=True)
class ExternalPotential:
    """Non-gravitational potential ``V(x, t)`` and its gradient."""

    value: Callable = _zero
    dx: Callable = _zero

    @classmethod
    def harmonic(cls, k: float, center: float = 0.0) -> ExternalPotential:
        return cls(lambda x, t: 0.5 * k * (x - center) ** 2, lambda x, t: k * (x - center))


def uniform_field(g: float) -> GravPotential:
    """``phi = g x``, independent of proper time."""
    return GravPotential(lambda x, tau, t: g * x, lambda x, tau, t: g, _zero)


def harmonic_well(k: float) -> GravPotential:
    return GravPotential(lambda x, tau, t: 0.5 * k * x * x, lambda x, tau, t: k * x, _zero)


# --- equations of motion -------------------------------------------------------


def derivatives_free(state: VarMassState, c: float = 1.0):
    """Hamilton's equations for ``H = sqrt(p^2 c^2 + m^2 c^4)``."""
    e = math.sqrt(state.p**2 * c**2 + state.mass**2 * c**4)
    if e == 0:
        raise ValueError("p^2 c^2 + m^2 c^4 must be positive")
    return state.p * c**2 / e, 0.0, state.mass * c**2 / e, 0.0


def derivatives_grav(state: VarMassState, phi: GravPotential, V: ExternalPotential | None = None, c: float = 1.0):
    """Hamilton's equations for ``H = m c^2 + p^2/2m + m phi + V``."""
    x, p, tau, m, t = state.x, state.p, state.tau, state.mass, state.t
    if m <= 0:
        raise IntegrationError(f"mass became non-positive (m={m:.6g}) at t={t:.6g}")
    v = p / m
    pdot = -m * phi.dx(x, tau, t)
    if V is not None:
        pdot -= V.dx(x, t)
    taudot = 1.0 - 0.5 * v * v / c**2 + phi.value(x, tau, t) / c**2
    mdot = -m * phi.dtau(x, tau, t) / c**2
    return v, pdot, taudot, mdot


def _state_rhs(deriv):
    def rhs(t, y):
        return np.array(deriv(VarMassState(y[0], y[1], y[2], y[3], t)), dtype=float)

    return rhs


def free_run(state: VarMassState, config: IntegratorConfig, c: float = 1.0) -> VarMassTrajectory:
    cfg = IntegratorConfig(config.h, config.t_end, config.stride, state.t)
    t, Y = rk4_integrate(_state_rhs(lambda s: derivatives_free(s, c)), state.as_array(), cfg)
    return VarMassTrajectory(t, Y[:, 0], Y[:, 1], Y[:, 2], Y[:, 3], np.zeros_like(t))


def grav_run(
    state: VarMassState, phi: GravPotential, config: IntegratorConfig, V: ExternalPotential | None = None, c: float = 1.0
) -> VarMassTrajectory:
    cfg = IntegratorConfig(config.h, config.t_end, config.stride, state.t)
    t, Y = rk4_integrate(_state_rhs(lambda s: derivatives_grav(s, phi, V, c)), state.as_array(), cfg)
    phis = np.array([phi.value(x, tau, tt) for x, tau, tt in zip(Y[:, 0], Y[:, 2], t)], dtype=float)
    return VarMassTrajectory(t, Y[:, 0], Y[:, 1], Y[:, 2], Y[:, 3], phis)


# --- Hamiltonians and Euler homogeneity ----------------------------------------


def free_hamiltonian(c: float = 1.0):
    def H(x, p, tau, m, t=0.0):
        return math.sqrt(p * p * c * c + m * m * c**4)

    return H


def grav_hamiltonian(phi: GravPotential | None = None, V: ExternalPotential | None = None, c: float = 1.0):
    phi = phi or GravPotential()

    def H(x, p, tau, m, t=0.0):
        out = m * c * c + p * p / (2 * m) + m * phi.value(x, tau, t)
        if V is not None:
            out += V.value(x, t)
        return out

    return H


def _d5(f, x0, h):
    return (f(x0 - 2 * h) - 8 * f(x0 - h) + 8 * f(x0 + h) - f(x0 + 2 * h)) / (12 * h)


def euler_homogeneity_check(H, state: VarMassState) -> float:
    """``|H - (p dH/dp + m dH/dm)|`` with five-point central differences."""
    x, p, tau, m, t = state.x, state.p, state.tau, state.mass, state.t
    # steps relative to each variable's own scale keep p^2/2m resolved at small m
    hp = 1e-3 * (abs(p) or 1.0)
    hm = 1e-3 * (abs(m) or 1.0)
    dHdp = _d5(lambda q: H(x, q, tau, m, t), p, hp)
    dHdm = _d5(lambda q: H(x, p, tau, q, t), m, hm)
    return abs(H(x, p, tau, m, t) - (p * dHdp + m * dHdm))


def scaling_residual(H, state: VarMassState, alphas=(0.5, 2.0)) -> float:
    """``max |H(alpha p, alpha m) - alpha H(p, m)|`` over ``alphas``."""
    x, p, tau, m, t = state.x, state.p, state.tau, state.mass, state.t
    h0 = H(x, p, tau, m, t)
    return max(abs(H(x, a * p, tau, a * m, t) - a * h0) for a in alphas)


# --- decay ---------------------------------------------------------------------


@dataclass(frozen=True)
class DecaySpec:
    """Mass ``m0 + mu exp(-gamma t)`` relaxing to ``m0``; valid for ``mu / m0 <= 0.1``."""

    m0: float
    mu: float
    gamma: float
    c: float = 1.0

    def __post_init__(self):
        if self.m0 <= 0 or self.gamma <= 0 or self.c <= 0:
            raise ValueError("m0, gamma and c must be positive")
        if self.mu < 0 or self.mu / self.m0 > 0.1:
            raise ValueError(f"mu/m0 = {self.mu / self.m0:.3g} outside [0, 0.1]")

    def phi(self, t):
        return -self.mu * self.c**2 / self.m0 * np.exp(-self.gamma * t)

    def phi_dot(self, t):
        return self.gamma * self.mu * self.c**2 / self.m0 * np.exp(-self.gamma * t)

    def mass_law(self, t):
        return self.m0 + self.mu * np.exp(-self.gamma * t)


def decay_potential(spec: DecaySpec) -> GravPotential:
    """Time profile of the decay with ``dphi/dtau`` set to ``dphi/dt`` (gauge identity)."""
    return GravPotential(lambda x, tau, t: spec.phi(t), _zero, lambda x, tau, t: spec.phi_dot(t))


def decay_run(spec: DecaySpec, config: IntegratorConfig) -> VarMassTrajectory:
    """Particle at rest with initial mass ``m0 + mu`` in the decay potential."""
    state = VarMassState(0.0, 0.0, 0.0, spec.m0 + spec.mu, config.t0)
    return grav_run(state, decay_potential(spec), config, c=spec.c)


def decay_redshift(spec: DecaySpec) -> float:
    """Asymptotic lag ``t - tau`` of the decaying particle's clock, ``mu / (gamma m0)``."""
    return spec.mu / (spec.gamma * spec.m0)


# --- binding energy as inertia -------------------------------------------------


@dataclass(frozen=True)
class BindingSpec:
    m0: float
    phi0: float
    gamma: float
    c: float = 1.0
    x0: float = 1.0
    v0: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gauge potential must decay (gamma > 0)")
        if self.m0 <= 0:
            raise ValueError("m0 must be positive")

    @property
    def final_mass(self) -> float:
        return self.m0 * math.exp(self.phi0 / self.c**2)

    def phi(self, t):
        return self.phi0 * np.exp(-self.gamma * (t - self.t0))


def phi0_for_binding_energy(binding_energy: float, m0: float, c: float = 1.0) -> float:
    """Initial gauge potential giving ``final_mass = m0 + binding_energy / c^2``.

    This is a convention: the dynamics accept any ``phi0``.
    """
    return c**2 * math.log1p(binding_energy / (m0 * c**2))


@dataclass
class BindingReport:
    trajectory: VarMassTrajectory
    lam: np.ndarray
    final_mass: float
    dlambda_dt_final: float
    late_time_deviation: float
    fitted_frequency: float | None = None
    predicted_frequency: float | None = None
    reduced_deviation: float | None = None

    @property
    def frequency_error(self) -> float | None:
        if self.fitted_frequency is None:
            return None
        return abs(self.fitted_frequency - self.predicted_frequency) / self.predicted_frequency


def _binding_rhs(spec: BindingSpec, V: ExternalPotential):
    c2 = spec.c**2

    def rhs(t, y):
        x, p, tau, m, lam = y
        if m <= 0:
            raise IntegrationError(f"mass became non-positive (m={m:.6g}) at t={t:.6g}")
        v = p / m
        phi = spec.phi(t)
        dphi_dtau = -spec.gamma * phi  # = dphi/dt by the gauge identity
        dphi_dx = 0.5 * v / c2 * dphi_dtau
        return np.array(
            [
                v,
                -m * dphi_dx - V.dx(x, t),
                1.0 - 0.5 * v * v / c2 + phi / c2,
                -m * dphi_dtau / c2,
                math.exp(0.5 * phi / c2),
            ]
        )

    return rhs


def _newton_run(x0, v0, mass, V: ExternalPotential, t0, t_end, h):
    def rhs(t, y):
        return np.array([y[1], -V.dx(y[0], t) / mass])

    cfg = IntegratorConfig(h, t_end, 1, t0)
    return rk4_integrate(rhs, [x0, v0], cfg)


def fit_frequency(t, x) -> float:
    """Angular frequency of a sinusoid ``A cos(w t) + B sin(w t) + C`` fitted to ``(t, x)``."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    dt = t[1] - t[0]
    spec = np.abs(np.fft.rfft((x - x.mean()) * np.hanning(x.size), n=8 * x.size))
    freqs = np.fft.rfftfreq(8 * x.size, dt) * 2 * np.pi
    w0 = freqs[np.argmax(spec[1:]) + 1]
    A0 = x.std() * math.sqrt(2)

    def model(tt, w, a, b, c0):
        return a * np.cos(w * (tt - t[0])) + b * np.sin(w * (tt - t[0])) + c0

    with warnings.catch_warnings():
        # covariance is irrelevant here and scipy complains when the fit is exact
        warnings.simplefilter("ignore", OptimizeWarning)
        popt, _ = curve_fit(model, t, x, p0=[w0, A0, 0.0, x.mean()], xtol=1e-14, ftol=1e-14, maxfev=20000)
    return float(abs(popt[0]))


def binding_run(
    V: ExternalPotential,
    spec: BindingSpec,
    config: IntegratorConfig,
    late_start: float | None = None,
    harmonic_k: float | None = None,
) -> BindingReport:
    """Integrate the particle in ``V`` while the gauge potential ``phi0 exp(-gamma t)`` decays.

    ``lam`` is the reduced time ``int exp(phi / 2c^2) dt``.  After
    ``late_start`` (default: when ``|phi|/c^2`` drops below 1e-14) the motion
    is compared with Newtonian motion of mass ``m0 exp(phi0/c^2)`` started
    from the same state.  For a harmonic ``V`` pass ``harmonic_k`` to fit the
    late-time frequency and compare the whole run with the closed-form
    solution in reduced time.
    """
    c2 = spec.c**2
    if late_start is None:
        late_start = spec.t0 + max(0.0, math.log(max(abs(spec.phi0) / c2, 1e-300) / 1e-14)) / spec.gamma
    if late_start >= config.t_end:
        raise ValueError(f"late window starts at t={late_start:.3g}, after t_end={config.t_end}")

    y0 = [spec.x0, spec.m0 * spec.v0, 0.0, spec.m0, 0.0]
    cfg = IntegratorConfig(config.h, config.t_end, config.stride, spec.t0)
    t, Y = rk4_integrate(_binding_rhs(spec, V), y0, cfg)
    traj = VarMassTrajectory(t, Y[:, 0], Y[:, 1], Y[:, 2], Y[:, 3], spec.phi(t))
    lam = Y[:, 4]
    mu0 = spec.final_mass

    i1 = int(np.searchsorted(t, late_start))
    v = traj.velocity
    tn, Yn = _newton_run(traj.x[i1], v[i1], mu0, V, t[i1], t[-1], config.h * config.stride)
    n = min(len(tn), len(t) - i1)
    scale = max(np.max(np.abs(traj.x[i1:])), 1e-300)
    late_dev = float(np.max(np.abs(Yn[:n, 0] - traj.x[i1 : i1 + n])) / scale)
    dl = float(math.exp(0.5 * spec.phi(t[-1]) / c2))

    report = BindingReport(traj, lam, mu0, dl, late_dev)
    if harmonic_k is not None:
        omega = math.sqrt(harmonic_k / mu0)
        report.predicted_frequency = omega
        report.fitted_frequency = fit_frequency(t[i1:], traj.x[i1:])
        u0 = math.exp(-0.5 * spec.phi0 / c2) * spec.v0
        reduced = spec.x0 * np.cos(omega * lam) + u0 / omega * np.sin(omega * lam)
        report.reduced_deviation = float(np.max(np.abs(reduced - traj.x)) / scale)
    return report


# --- gauge condition -----------------------------------------------------------


@dataclass(frozen=True)
class GaugeProblem:
    """Implicit solution ``tau = t psi + f(psi, x)`` of ``psi_t + psi psi_tau = 0``.

    ``psi = g phi / c^2`` is the dimensionless potential; roots are sought in
    ``bracket``.
    """

    f: Callable
    bracket: tuple[float, float]
    g: float = 1.0
    c: float = 1.0
    samples: int = 257

    @classmethod
    def linear(cls, bracket=(-1e3, 1e3)) -> GaugeProblem:
        """``f(psi) = psi``: ``psi = tau / (t + 1)``."""
        return cls(lambda psi, x=0.0: psi, bracket)

    @classmethod
    def decay(cls, spec: DecaySpec) -> GaugeProblem:
        """Profile reproducing the decay potential along the resting particle's path.

        Along ``taudot = 1 + psi`` it gives ``psi(t) = -(mu/m0) exp(-gamma t)``.
        """
        a = spec.mu / spec.m0
        gam = spec.gamma

        def f(psi, x=0.0):
            t_of_psi = math.log(a / -psi) / gam
            return t_of_psi * (1.0 - psi) - a / gam - psi / gam

        return cls(f, (-4.0 * a, -1e-12 * a), c=spec.c)

    def root_function(self, x, t, tau):
        return lambda psi: t * psi + self.f(psi, x) - tau


def gauge_solve(problem: GaugeProblem, x: float, t: float, tau: float) -> float:
    """Solve ``tau = t psi + f(psi)`` for ``psi``.

    The bracket is scanned first: no sign change raises
    :class:`RootNotBracketedError`, more than one raises :class:`ShockError`.
    """
    F = problem.root_function(x, t, tau)
    lo, hi = problem.bracket
    grid = np.linspace(lo, hi, problem.samples)
    vals = np.array([F(p) for p in grid])
    sign = np.sign(vals)
    exact = np.flatnonzero(sign == 0)
    crossings = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    n_roots = len(exact) + len(crossings)
    if n_roots == 0:
        raise RootNotBracketedError(f"no root of tau = t psi + f(psi) in {problem.bracket} at (t={t}, tau={tau})")
    if n_roots > 1:
        raise ShockError(f"{n_roots} roots at (t={t}, tau={tau}): multivalued (post-shock) region")
    if len(exact):
        return float(grid[exact[0]])
    i = crossings[0]
    return float(brentq(F, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


def gauge_field(problem: GaugeProblem, tau, t, x: float = 0.0):
    """Solve on a grid.  Returns ``(psi, flagged)`` with NaN at shocks or unbracketed points."""
    tau, t = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(t, dtype=float))
    psi = np.full(tau.shape, np.nan)
    flagged = np.zeros(tau.shape, dtype=bool)
    for idx in np.ndindex(tau.shape):
        try:
            psi[idx] = gauge_solve(problem, x, t[idx], tau[idx])
        except (ShockError, RootNotBracketedError):
            flagged[idx] = True
    return psi, flagged


def gauge_pde_residual(problem: GaugeProblem, tau, t, h: float = 1e-4, x: float = 0.0):
    """Central-difference residual of ``psi_t + psi psi_tau`` at each point; NaN where flagged."""
    tau, t = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(t, dtype=float))
    p0, f0 = gauge_field(problem, tau, t, x)
    pt1, f1 = gauge_field(problem, tau, t + h, x)
    pt0, f2 = gauge_field(problem, tau, t - h, x)
    pu1, f3 = gauge_field(problem, tau + h, t, x)
    pu0, f4 = gauge_field(problem, tau - h, t, x)
    res = np.abs((pt1 - pt0) / (2 * h) + p0 * (pu1 - pu0) / (2 * h))
    bad = f0 | f1 | f2 | f3 | f4
    res[bad] = np.nan
    return res


@dataclass
class GaugeIdentityResult:
    max_residual: float
    residuals: np.ndarray
    excluded: np.ndarray


def gauge_identity_check(problem, tau, t, h: float = 1e-4, x: float = 0.0, g: float | None = None) -> GaugeIdentityResult:
    """Compare the rate of change of ``psi`` along a resting particle's path with ``dpsi/dtau``.

    ``problem`` is a :class:`GaugeProblem` or an explicit field
    ``psi(tau, t)``.  The path has ``taudot = 1 + psi / g``; its total
    derivative is taken as a directional central difference.
    """
    if isinstance(problem, GaugeProblem):
        g = problem.g if g is None else g

        def psi_at(ta, tt):
            return gauge_solve(problem, x, tt, ta)

    else:
        g = 1.0 if g is None else g
        psi_at = problem

    tau, t = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(t, dtype=float))
    res = np.full(tau.shape, np.nan)
    excluded = np.zeros(tau.shape, dtype=bool)
    for idx in np.ndindex(tau.shape):
        ta, tt = float(tau[idx]), float(t[idx])
        try:
            rate = 1.0 + psi_at(ta, tt) / g
            along = (psi_at(ta + rate * h, tt + h) - psi_at(ta - rate * h, tt - h)) / (2 * h)
            dtau = (psi_at(ta + h, tt) - psi_at(ta - h, tt)) / (2 * h)
        except (ShockError, RootNotBracketedError):
            excluded[idx] = True
            continue
        res[idx] = abs(along - dtau)
    finite = res[~excluded]
    return GaugeIdentityResult(float(np.max(finite)) if finite.size else math.nan, res, excluded)


def decay_path(spec: DecaySpec, t):
    """Proper time of the resting decaying particle, ``t - (mu/(gamma m0)) (1 - exp(-gamma t))``."""
    t = np.asarray(t, dtype=float)
    return t - spec.mu / (spec.gamma * spec.m0) * (1.0 - np.exp(-spec.gamma * t))
