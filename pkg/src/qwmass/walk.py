"""One-dimensional Dirac quantum walk on a periodic lattice.

The walk acts on two-component spinors ``psi[s, x]`` with ``s = 0`` (r) and
``s = 1`` (l).  One step is

    r'(x) = n r(x + 1) - i m l(x)
    l'(x) = n l(x - 1) - i m r(x)

so the r component hops one site to the left and the l component one site to
the right.  With the forward transform ``psi(k) = N^{-1/2} sum_x e^{-ikx}
psi(x)`` this is the block-diagonal matrix

    U(k) = [[n e^{ik}, -i m], [-i m, n e^{-ik}]]

on the Brillouin-zone grid ``k_j = -pi + 2 pi j / N``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Representation = Literal["position", "momentum"]

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)

# below this sin(omega) is treated as zero
_SINGULAR_EPS = 1e-12


class RepresentationError(ValueError):
    """Field handed to an operation expecting the other representation."""


class SingularPointError(ValueError):
    """Effective Hamiltonian requested where omega = pi and sin(omega) = 0."""


@dataclass(frozen=True)
class WalkParams:
    """Mass ``m`` and hopping amplitude ``n = sqrt(1 - m**2)`` of the walk."""

    m: float
    n: float = field(init=False)

    def __post_init__(self):
        m = float(self.m)
        if not -1.0 <= m <= 1.0:
            raise ValueError(f"walk mass must lie in [-1, 1], got {m}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", float(np.sqrt((1.0 - m) * (1.0 + m))))


@dataclass
class SpinorField:
    """Two complex amplitudes per site, stored as an array of shape ``(2, N)``."""

    amplitudes: np.ndarray
    representation: Representation = "position"

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 2 or amp.shape[0] != 2:
            raise ValueError(f"amplitudes must have shape (2, N), got {amp.shape}")
        if amp.shape[1] < 2 or amp.shape[1] % 2:
            raise ValueError(f"lattice size must be a positive even integer, got {amp.shape[1]}")
        if self.representation not in ("position", "momentum"):
            raise ValueError(f"unknown representation {self.representation!r}")
        self.amplitudes = amp

    @property
    def sites(self) -> int:
        return self.amplitudes.shape[1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> np.ndarray:
        """Probability per site (position) or per momentum (momentum)."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)

    def copy(self) -> SpinorField:
        return SpinorField(self.amplitudes.copy(), self.representation)

    @classmethod
    def delta(cls, sites: int, x: int = 0, component: int | str = 0) -> SpinorField:
        """Unit amplitude at site ``x`` in component ``r`` (0) or ``l`` (1)."""
        s = {"r": 0, "l": 1}.get(component, component)
        amp = np.zeros((2, sites), dtype=complex)
        amp[s, x % sites] = 1.0
        return cls(amp)


@dataclass(frozen=True)
class WalkSpectrumPoint:
    k: float
    omega: float
    v: float
    eigenvectors: np.ndarray  # columns |+>, |->
    degenerate: bool = False

    @property
    def plus(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    @property
    def minus(self) -> np.ndarray:
        return self.eigenvectors[:, 1]


def momentum_grid(sites: int) -> np.ndarray:
    """Brillouin-zone grid ``k_j = -pi + 2 pi j / N``."""
    return -np.pi + 2.0 * np.pi * np.arange(sites) / sites


def _require(field: SpinorField, rep: Representation):
    if field.representation != rep:
        raise RepresentationError(f"expected a field in {rep} representation, got {field.representation}")


def step(params: WalkParams, field: SpinorField) -> SpinorField:
    """Apply one walk step to a position-space field."""
    _require(field, "position")
    if field.sites < 2:
        raise ValueError("lattice needs at least two sites")
    r, l = field.amplitudes
    n, m = params.n, params.m
    out = np.empty_like(field.amplitudes)
    out[0] = n * np.roll(r, -1) - 1j * m * l
    out[1] = n * np.roll(l, 1) - 1j * m * r
    return SpinorField(out, "position")


def walk_matrix(params: WalkParams, k):
    """U(k) as a ``(2, 2)`` matrix, or a ``(..., 2, 2)`` stack for array ``k``."""
    k = np.asarray(k, dtype=float)
    n, m = params.n, params.m
    U = np.empty(k.shape + (2, 2), dtype=complex)
    U[..., 0, 0] = n * np.exp(1j * k)
    U[..., 0, 1] = -1j * m
    U[..., 1, 0] = -1j * m
    U[..., 1, 1] = n * np.exp(-1j * k)
    return U


def to_momentum(field: SpinorField) -> SpinorField:
    _require(field, "position")
    x = np.arange(field.sites)
    # e^{-i k_j x} = (-1)^x e^{-2 pi i j x / N}
    sign = np.where(x % 2, -1.0, 1.0)
    amp = np.fft.fft(field.amplitudes * sign, axis=1, norm="ortho")
    return SpinorField(amp, "momentum")


def to_position(field: SpinorField) -> SpinorField:
    _require(field, "momentum")
    x = np.arange(field.sites)
    sign = np.where(x % 2, -1.0, 1.0)
    amp = np.fft.ifft(field.amplitudes, axis=1, norm="ortho") * sign
    return SpinorField(amp, "position")


def evolve(params: WalkParams, field: SpinorField, steps: int) -> SpinorField:
    """Apply ``steps`` walk steps in whichever representation ``field`` is in.

    Position-space fields are stepped site by site; momentum-space fields get
    ``U(k)**steps`` applied at every grid momentum.
    """
    steps = int(steps)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if field.representation == "position":
        out = field.copy()
        for _ in range(steps):
            out = step(params, out)
        return out
    U = walk_matrix(params, momentum_grid(field.sites))
    Ut = np.linalg.matrix_power(U, steps)
    amp = np.einsum("kab,bk->ak", Ut, field.amplitudes)
    return SpinorField(amp, "momentum")


def _sin_omega(params: WalkParams, k):
    # sin^2 omega = 1 - n^2 cos^2 k = m^2 + n^2 sin^2 k, free of cancellation
    return np.sqrt(params.m**2 + (params.n * np.sin(k)) ** 2)


def omega(params: WalkParams, k):
    """Dispersion relation ``arccos(n cos k)`` on the principal branch [0, pi]."""
    k = np.asarray(k, dtype=float)
    return np.arctan2(_sin_omega(params, k), params.n * np.cos(k))


def dispersion_residual(params: WalkParams, k):
    """``sin^2 omega - (1 - m^2) sin^2 k - m^2``, identically zero."""
    m = params.m
    return np.sin(omega(params, k)) ** 2 - (1.0 - m * m) * np.sin(k) ** 2 - m * m


def group_velocity(params: WalkParams, k):
    """``d omega / dk = n sin k / sin omega``.

    At the kinks of the massless dispersion (m = 0, k in {0, -pi}) the
    symmetric derivative, zero, is returned.
    """
    k = np.asarray(k, dtype=float)
    s = _sin_omega(params, k)
    singular = s < _SINGULAR_EPS
    v = params.n * np.sin(k) / np.where(singular, 1.0, s)
    v = np.where(singular, 0.0, v)
    return v[()] if v.ndim == 0 else v


def eigensystem(params: WalkParams, k: float) -> WalkSpectrumPoint:
    """Closed-form eigenvectors ``U(k)|s> = exp(-i s omega)|s>``.

    Components are ``sqrt(1 - s v)/sqrt(2)`` and ``s sgn(m) sqrt(1 + s v)/sqrt(2)``;
    the ``sgn(m)`` factor covers the negative-mass half of the parameter
    range.  At a degenerate point (m = 0, k in {0, -pi}) the canonical basis is
    returned and ``degenerate`` is set.
    """
    k = float(k)
    w = float(omega(params, k))
    if float(_sin_omega(params, k)) < _SINGULAR_EPS:
        return WalkSpectrumPoint(k, w, 0.0, np.eye(2, dtype=complex), degenerate=True)
    v = float(group_velocity(params, k))
    v = min(1.0, max(-1.0, v))
    sgn = -1.0 if params.m < 0 else 1.0
    # 1 - |v| from 1 - v^2 = m^2 / sin^2 omega; the direct difference cancels at small m
    small = params.m**2 / (float(_sin_omega(params, k)) ** 2 * (1.0 + abs(v)))

    def one_minus(sv):
        return small if sv > 0 else 1.0 - sv

    vecs = np.empty((2, 2), dtype=complex)
    for col, s in enumerate((1.0, -1.0)):
        vecs[0, col] = np.sqrt(one_minus(s * v)) / np.sqrt(2.0)
        vecs[1, col] = s * sgn * np.sqrt(one_minus(-s * v)) / np.sqrt(2.0)
    return WalkSpectrumPoint(k, w, v, vecs)


def hamiltonian(params: WalkParams, k: float) -> np.ndarray:
    """Effective Hamiltonian ``H(k)`` with ``exp(-i H(k)) = U(k)``.

    ``H = (omega / sin omega) (-n sin k sigma_3 + m sigma_1)``, eigenvalues
    ``+-omega``.  The ratio is continued to 1 at omega = 0; omega = pi has no
    unique logarithm and raises :class:`SingularPointError`.
    """
    w = float(omega(params, k))
    s = float(_sin_omega(params, k))
    if s < _SINGULAR_EPS:
        if w > np.pi / 2:
            raise SingularPointError(f"U(k) = -I at m={params.m}, k={k}; logarithm branch undefined")
        ratio = 1.0
    else:
        ratio = w / s
    return ratio * (-params.n * np.sin(k) * SIGMA_3 + params.m * SIGMA_1)


def spectrum_table(params: WalkParams, samples: int) -> dict[str, np.ndarray]:
    """Uniform grid over [-pi, pi) offset by half a spacing so it avoids +-pi and 0."""
    k = -np.pi + 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
    return {
        "k": k,
        "omega": omega(params, k),
        "v": group_velocity(params, k),
        "residual": dispersion_residual(params, k),
    }


def write_spectrum_csv(path, table: dict[str, np.ndarray]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "omega", "v", "residual"])
        for row in zip(table["k"], table["omega"], table["v"], table["residual"]):
            w.writerow([f"{val:.17g}" for val in row])


def write_field_csv(path, field: SpinorField):
    _require(field, "position")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "re_r", "im_r", "re_l", "im_l"])
        r, l = field.amplitudes
        for x in range(field.sites):
            w.writerow([x] + [f"{val:.17g}" for val in (r[x].real, r[x].imag, l[x].real, l[x].imag)])
