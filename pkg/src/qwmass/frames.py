"""Frame changes of the free Schrodinger equation and their mass-dependent phases.

Covers the accelerated-frame phase ``f = (m/hbar)(-xidot x' + 1/2 int xidot^2)``,
the translation/boost/translation/boost loop whose phase depends on mass,
its Lorentz counterpart, and packets over (mass, proper time).

The frame change is ``x' = x + xi(t)``; the lab solution ``psi`` relabelled
in primed coordinates equals ``exp(i f) phi`` with ``phi`` solving the
primed-frame equation.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

TrajectoryKind = Literal["uniform-velocity", "uniform-acceleration", "sine-squared-bump"]


def wrap_phase(phi):
    """Map angles into [-pi, pi]."""
    return phi - 2.0 * np.pi * np.round(phi / (2.0 * np.pi))


@dataclass(frozen=True)
class Trajectory:
    """Frame displacement ``xi(t)`` with closed-form derivatives and ``int_0^t xidot^2``.

    ``uniform-velocity`` and ``uniform-acceleration`` use ``offset + v t + a t^2 / 2``;
    the bump is ``amplitude * sin^2(pi t / duration)`` on ``[0, duration]`` and
    zero elsewhere.
    """

    kind: TrajectoryKind
    offset: float = 0.0
    v: float = 0.0
    a: float = 0.0
    amplitude: float = 0.0
    duration: float = 1.0
    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform-velocity", "uniform-acceleration", "sine-squared-bump"):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        if self.kind == "uniform-velocity" and self.a != 0:
            raise ValueError("uniform-velocity trajectory cannot carry an acceleration")
        if self.kind == "sine-squared-bump" and self.duration <= 0:
            raise ValueError("bump duration must be positive")

    @classmethod
    def uniform_velocity(cls, v, offset=0.0, **units):
        return cls("uniform-velocity", offset=offset, v=v, **units)

    @classmethod
    def uniform_acceleration(cls, a, v=0.0, offset=0.0, **units):
        return cls("uniform-acceleration", offset=offset, v=v, a=a, **units)

    @classmethod
    def bump(cls, amplitude, duration, **units):
        return cls("sine-squared-bump", amplitude=amplitude, duration=duration, **units)

    def _clip(self, t):
        return np.clip(np.asarray(t, dtype=float), 0.0, self.duration)

    def _inside(self, t):
        t = np.asarray(t, dtype=float)
        return (t >= 0.0) & (t <= self.duration)

    def xi(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "sine-squared-bump":
            return np.where(self._inside(t), self.amplitude * np.sin(np.pi * t / self.duration) ** 2, 0.0)
        return self.offset + self.v * t + 0.5 * self.a * t**2

    def xidot(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "sine-squared-bump":
            w = np.pi / self.duration
            return np.where(self._inside(t), self.amplitude * w * np.sin(2 * w * t), 0.0)
        return self.v + self.a * t

    def xiddot(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "sine-squared-bump":
            w = np.pi / self.duration
            return np.where(self._inside(t), 2 * self.amplitude * w**2 * np.cos(2 * w * t), 0.0)
        return self.a + 0.0 * t

    def kinetic_integral(self, t):
        """``int_0^t xidot(s)^2 ds``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "sine-squared-bump":
            s = self._clip(t)
            T = self.duration
            w = np.pi / T
            # int_0^s sin^2(2 w u) du = s/2 - sin(4 w s) / (8 w)
            return (self.amplitude * w) ** 2 * (s / 2 - np.sin(4 * w * s) / (8 * w))
        v, a = self.v, self.a
        return v * v * t + v * a * t**2 + a * a * t**3 / 3.0

    def at_rest_after(self, T: float) -> bool:
        if self.kind == "sine-squared-bump":
            return self.duration <= T
        return self.v == 0 and self.a == 0


def egt_phase(m, traj: Trajectory, x_prime, t):
    """Phase ``f(x', t) = (m/hbar) (-xidot(t) x' + 1/2 int_0^t xidot^2)``."""
    x_prime = np.asarray(x_prime, dtype=float)
    return (m / traj.hbar) * (-traj.xidot(t) * x_prime + 0.5 * traj.kinetic_integral(t))


def free_gaussian(x, t, m=1.0, sigma=1.0, x0=0.0, k0=0.0, hbar=1.0):
    """Closed-form free evolution of ``(2 pi sigma^2)^(-1/4) exp(-(x-x0)^2/4 sigma^2 + i k0 x)``."""
    x = np.asarray(x, dtype=float)
    alpha = 1.0 + 1j * hbar * t / (2.0 * m * sigma**2)
    X = x - x0 - hbar * k0 * t / m
    return (
        (2.0 * np.pi * sigma**2) ** -0.25
        / np.sqrt(alpha)
        * np.exp(-(X**2) / (4.0 * sigma**2 * alpha) + 1j * k0 * x - 1j * hbar * k0**2 * t / (2.0 * m))
    )


def _default_grid(sigma, v, t):
    half = 10.0 * sigma + abs(v * t) + 10.0
    return np.linspace(-half, half, 2001)


def boosted_frame_wavefunction(m, traj: Trajectory, x_prime, t, sigma=1.0, x0=0.0, k0=0.0, hbar=1.0):
    """``phi(x', t) = exp(-i f) psi_lab(x' - xi(t), t)`` for the free lab Gaussian."""
    lab = free_gaussian(np.asarray(x_prime) - traj.xi(t), t, m, sigma, x0, k0, hbar)
    return np.exp(-1j * egt_phase(m, traj, x_prime, t)) * lab


def verify_boost_covariance(m, v, sigma=1.0, t=1.0, x0=0.0, k0=0.0, hbar=1.0, x=None) -> float:
    """Max pointwise gap between the phase-mapped lab Gaussian and the Gaussian
    evolved from boosted initial data ``exp(i m v x / hbar) psi_0``.

    The frame is ``x' = x + v t``; both sides are closed forms.
    """
    traj = Trajectory.uniform_velocity(v, hbar=hbar)
    x = _default_grid(sigma, v, t) if x is None else np.asarray(x, dtype=float)
    mapped = boosted_frame_wavefunction(m, traj, x, t, sigma, x0, k0, hbar)
    boosted = free_gaussian(x, t, m, sigma, x0, k0 + m * v / hbar, hbar)
    return float(np.max(np.abs(mapped - boosted)))


def density_covariance_residual(m, traj: Trajectory, t, sigma=1.0, hbar=1.0, x=None) -> float:
    """Max gap between ``|phi(x', t)|^2`` and the relabelled ``|psi(x' - xi, t)|^2``."""
    x = _default_grid(sigma, float(traj.xidot(t)), t) if x is None else np.asarray(x, dtype=float)
    phi = boosted_frame_wavefunction(m, traj, x, t, sigma, hbar=hbar)
    lab = free_gaussian(x - traj.xi(t), t, m, sigma, hbar=hbar)
    return float(np.max(np.abs(np.abs(phi) ** 2 - np.abs(lab) ** 2)))


def accelerated_frame_residual(m, traj: Trajectory, t, sigma=1.0, hbar=1.0, h=1e-3, x=None) -> float:
    """Finite-difference residual of
    ``-hbar^2/2m phi'' - m xiddot x' phi - i hbar d phi/dt`` for the mapped lab Gaussian.
    """
    x = _default_grid(sigma, float(traj.xidot(t)), t) if x is None else np.asarray(x, dtype=float)

    def phi(xx, tt):
        return boosted_frame_wavefunction(m, traj, xx, tt, sigma, hbar=hbar)

    p0 = phi(x, t)
    d2x = (phi(x + h, t) - 2 * p0 + phi(x - h, t)) / h**2
    dt = (phi(x, t + h) - phi(x, t - h)) / (2 * h)
    res = -(hbar**2) / (2 * m) * d2x - m * traj.xiddot(t) * x * p0 - 1j * hbar * dt
    return float(np.max(np.abs(res)))


# --- translation / boost loop -------------------------------------------------


@dataclass(frozen=True)
class FrameOp:
    """Instantaneous Galilean relabelling: ``translation`` (x -> x - amount) or ``boost`` (x -> x - amount t)."""

    kind: Literal["translation", "boost"]
    amount: float


def bargmann_sequence(l, v) -> list[FrameOp]:
    return [FrameOp("translation", l), FrameOp("boost", v), FrameOp("translation", -l), FrameOp("boost", -v)]


def compose_galilean(ops):
    """Compose frame operations exactly over the rationals.

    Returns ``(coords, phase)``: the final coordinate as coefficients of
    ``(x, t, 1)`` in the original frame, and the accumulated phase in units of
    ``m / hbar`` in the same basis.  A boost by ``u`` contributes
    ``u x_new + u^2 t / 2``.
    """
    cx, ct, c0 = Fraction(1), Fraction(0), Fraction(0)
    px, pt, p0 = Fraction(0), Fraction(0), Fraction(0)
    for op in ops:
        amount = Fraction(op.amount)
        if op.kind == "translation":
            c0 -= amount
        elif op.kind == "boost":
            ct -= amount
            px += amount * cx
            pt += amount * ct + amount * amount / 2
            p0 += amount * c0
        else:
            raise ValueError(f"unknown frame operation {op.kind!r}")
    return (cx, ct, c0), (px, pt, p0)


@dataclass
class BargmannResult:
    l: float
    v: float
    hbar: float
    masses: list[float]
    phases: list[float]
    relative_phases: list[float]
    closed_loop: bool

    def as_dict(self) -> dict:
        return {
            "l": self.l,
            "v": self.v,
            "hbar": self.hbar,
            "masses": list(self.masses),
            "phases": list(self.phases),
            "relative_phases": list(self.relative_phases),
        }


def bargmann_compose(l, v, masses, hbar=1.0) -> BargmannResult:
    """Phase picked up by each mass component around the translate/boost/translate/boost loop.

    Each component ends with ``-m v l / hbar`` (mod 2 pi); relative phases are
    taken against the first mass.
    """
    masses = [float(m) for m in masses]
    if not masses:
        raise ValueError("need at least one mass")
    coords, phase = compose_galilean(bargmann_sequence(l, v))
    closed = coords == (1, 0, 0)
    if not closed or phase[0] != 0 or phase[1] != 0:
        raise AssertionError(f"frame loop does not close: coords={coords}, phase={phase}")
    action = float(phase[2])  # = -v l
    raw = [m * action / hbar for m in masses]
    phases = [float(wrap_phase(p)) for p in raw]
    rel = [float(wrap_phase(p - raw[0])) for p in raw]
    return BargmannResult(float(l), float(v), float(hbar), masses, phases, rel, closed)


def lorentz_compose(l, v, c=1.0):
    """Translate by ``l``, boost by ``v``, translate by ``-l/gamma``, boost by ``-v``.

    Returns ``(x4 - x, t4 - t)``, i.e. ``(0, l v / c^2)``: the loop leaves a
    clock offset ``Delta tau = l v / c^2``.
    """
    if abs(v) >= c:
        raise ValueError(f"|v| = {abs(v)} must be below c = {c}")
    g = 1.0 / math.sqrt(1.0 - (v / c) ** 2)

    def boost(u):
        return np.array([[g, -g * u, 0.0], [-g * u / c**2, g, 0.0], [0.0, 0.0, 1.0]]) if u else np.eye(3)

    def shift(d):
        M = np.eye(3)
        M[0, 2] = d
        return M

    total = boost(-v) @ shift(l / g) @ boost(v) @ shift(-l)
    return float(total[0, 2]), float(total[1, 2])


def proper_time_offset(l, v, c=1.0) -> float:
    return lorentz_compose(l, v, c)[1]


# --- (mass, proper time) packets ---------------------------------------------


@dataclass
class MassTauPacket:
    """Amplitudes over (x, mass) with a conjugate proper-time grid.

    ``tau(tau_j) = N^{-1/2} sum_k a_k exp(i m_k c^2 tau_j / hbar)`` and the grids
    obey ``d tau * d(m c^2) = 2 pi hbar / N``.
    """

    mass_grid: np.ndarray
    tau_grid: np.ndarray
    amplitudes: np.ndarray  # (Nx, Nm)
    x_grid: np.ndarray | None = None
    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        self.amplitudes = np.atleast_2d(np.asarray(self.amplitudes, dtype=complex))
        n = self.mass_grid.size
        if self.tau_grid.size != n or self.amplitudes.shape[1] != n:
            raise ValueError("mass grid, tau grid and amplitude columns must share a size")
        if self.x_grid is None:
            self.x_grid = np.zeros(self.amplitudes.shape[0])
        dm = self.mass_grid[1] - self.mass_grid[0]
        dtau = self.tau_grid[1] - self.tau_grid[0]
        if not math.isclose(dtau * dm * self.c**2, 2 * math.pi * self.hbar / n, rel_tol=1e-12):
            raise ValueError("mass and proper-time grids are not discrete Fourier conjugates")

    @property
    def size(self) -> int:
        return self.mass_grid.size

    @property
    def dm(self) -> float:
        return float(self.mass_grid[1] - self.mass_grid[0])

    @property
    def dtau(self) -> float:
        return float(self.tau_grid[1] - self.tau_grid[0])

    def normalized(self) -> MassTauPacket:
        return MassTauPacket(
            self.mass_grid, self.tau_grid, self.amplitudes / np.linalg.norm(self.amplitudes), self.x_grid, self.hbar, self.c
        )

    def with_amplitudes(self, amplitudes) -> MassTauPacket:
        return MassTauPacket(self.mass_grid, self.tau_grid, amplitudes, self.x_grid, self.hbar, self.c)

    def tau_amplitudes(self) -> np.ndarray:
        """Proper-time representation on ``tau_grid`` via FFT."""
        m0, tau0 = self.mass_grid[0], self.tau_grid[0]
        k = np.arange(self.size)
        b = self.amplitudes * np.exp(1j * k * self.dm * self.c**2 * tau0 / self.hbar)
        carrier = np.exp(1j * m0 * self.c**2 * self.tau_grid / self.hbar)
        return np.fft.ifft(b, axis=1, norm="ortho") * carrier

    def evaluate_tau(self, tau) -> np.ndarray:
        """Proper-time representation at arbitrary ``tau`` by direct summation."""
        tau = np.asarray(tau, dtype=float)
        kernel = np.exp(1j * np.outer(self.mass_grid, tau) * self.c**2 / self.hbar)
        return self.amplitudes @ kernel / np.sqrt(self.size)


def conjugate_grids(size: int, mass_center: float = 0.0, dm: float | None = None, hbar=1.0, c=1.0):
    """Centred mass grid and its conjugate proper-time grid.

    ``dm`` defaults to the balanced spacing where both grids span the same
    range in units of ``hbar``.
    """
    if size < 2 or size % 2:
        raise ValueError("grid size must be an even integer >= 2")
    if dm is None:
        dm = math.sqrt(2 * math.pi * hbar / size) / c**2
    dtau = 2 * math.pi * hbar / (size * dm * c**2)
    j = np.arange(size) - size // 2
    return mass_center + j * dm, j * dtau


def gaussian_mass_packet(size=512, mass_center=1.0, sigma_mc2=0.5, dm=None, hbar=1.0, c=1.0, tau_center=0.0):
    """Packet whose mass-energy marginal is Gaussian with standard deviation ``sigma_mc2``."""
    masses, taus = conjugate_grids(size, mass_center, dm, hbar, c)
    e = (masses - mass_center) * c**2
    amp = np.exp(-(e**2) / (4 * sigma_mc2**2) - 1j * masses * c**2 * tau_center / hbar)
    return MassTauPacket(masses, taus, amp[None, :], hbar=hbar, c=c).normalized()


def random_resolved_packet(rng, size=256, mass_center=None, hbar=1.0, c=1.0, max_terms=3) -> MassTauPacket:
    """Random superposition of up to ``max_terms`` Gaussians, each resolved on both grids.

    Widths are drawn log-uniformly between three mass steps and the width whose
    proper-time partner spans three tau steps; centres keep six widths clear of
    either grid edge.  ``mass_center`` defaults to keeping every grid mass positive.
    """
    masses, taus = conjugate_grids(size, 0.0, hbar=hbar, c=c)
    dm = masses[1] - masses[0]
    if mass_center is None:
        mass_center = -masses[0] + dm
    dtau = taus[1] - taus[0]
    span_e = (masses[-1] - masses[0]) * c**2
    span_t = taus[-1] - taus[0]
    e = masses * c**2
    amp = np.zeros(size, dtype=complex)
    lo, hi = 3 * dm * c**2, hbar / (6 * dtau)
    for _ in range(rng.integers(1, max_terms + 1)):
        sig = math.exp(rng.uniform(math.log(lo), math.log(hi)))
        sig_tau = hbar / (2 * sig)
        e0 = rng.uniform(-0.5, 0.5) * max(span_e - 12 * sig, 0.0)
        t0 = rng.uniform(-0.5, 0.5) * max(span_t - 12 * sig_tau, 0.0)
        w = rng.normal() + 1j * rng.normal()
        amp += w * np.exp(-((e - e0) ** 2) / (4 * sig**2) - 1j * e * t0 / hbar)
    # the carrier of the mass offset only rephases the tau amplitudes
    return MassTauPacket(masses + mass_center, taus, amp[None, :], hbar=hbar, c=c).normalized()


def _std(grid, weights):
    w = weights / weights.sum()
    mean = np.dot(grid, w)
    return float(np.sqrt(max(np.dot((grid - mean) ** 2, w), 0.0)))


def packet_uncertainty(packet: MassTauPacket):
    """``(Delta(m c^2), Delta tau, product)`` from the mass and proper-time marginals."""
    p_mass = np.sum(np.abs(packet.amplitudes) ** 2, axis=0)
    p_tau = np.sum(np.abs(packet.tau_amplitudes()) ** 2, axis=0)
    d_e = _std(packet.mass_grid * packet.c**2, p_mass)
    d_tau = _std(packet.tau_grid, p_tau)
    return d_e, d_tau, d_e * d_tau


@dataclass
class ParadoxResult:
    delta_tau_pred: float
    l2_distance: float
    tau: np.ndarray
    before: np.ndarray
    after: np.ndarray
    shifted: np.ndarray
    commensurate: bool

    def write_csv(self, path, which="before"):
        data = {"before": self.before, "after": self.after, "shifted": self.shifted}[which]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["tau", "re", "im"])
            for tau, z in zip(self.tau, data[0]):
                w.writerow([f"{tau:.17g}", f"{z.real:.17g}", f"{z.imag:.17g}"])


def paradox_shift(traj: Trajectory, packet: MassTauPacket, T: float | None = None) -> ParadoxResult:
    """Apply the frame-change phase of a return-to-rest trajectory to a mass superposition.

    The transformed packet (each mass component times ``exp(i f)`` at ``t >= T``)
    is compared with the original evaluated at ``tau + Delta tau`` where
    ``Delta tau = 1/2 int_0^T xidot^2 / c^2``.  The shifted side is a circular
    shift when ``Delta tau`` is a whole number of grid steps and a direct
    Fourier-series evaluation otherwise.
    """
    if T is None:
        T = traj.duration
    if not traj.at_rest_after(T):
        raise ValueError(f"trajectory is not at rest for t >= {T}")
    c = packet.c
    dtau = 0.5 * float(traj.kinetic_integral(T)) / c**2

    phase = egt_phase(packet.mass_grid, traj, 0.0, T)
    moved = packet.with_amplitudes(packet.amplitudes * np.exp(1j * phase)[None, :])
    after = moved.tau_amplitudes()
    before = packet.tau_amplitudes()

    steps = dtau / packet.dtau
    p = round(steps)
    commensurate = abs(steps - p) < 1e-9
    if commensurate:
        N = packet.size
        j = np.arange(N)
        wraps = (j + p) // N
        # tau -> tau + N dtau multiplies every component by exp(2 pi i m_0 / dm)
        carrier = np.exp(2j * np.pi * packet.mass_grid[0] / packet.dm * wraps)
        shifted = np.roll(before, -p, axis=1) * carrier
    else:
        shifted = packet.evaluate_tau(packet.tau_grid + dtau)
    dist = float(np.linalg.norm(after - shifted))
    return ParadoxResult(dtau, dist, packet.tau_grid, before, after, shifted, commensurate)


def heisenberg_mass_estimate(delta_x, delta_v, hbar=1.0) -> float:
    """Mass of a minimum-uncertainty packet from its position and velocity spreads, ``hbar / (dx dv)``."""
    if delta_x <= 0 or delta_v <= 0:
        raise ValueError("position and velocity spreads must be positive")
    return hbar / (delta_x * delta_v)
