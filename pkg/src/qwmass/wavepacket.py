"""Gaussian packets on one branch of the walk and centroid transport."""
from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .walk import (
    SpinorField,
    WalkParams,
    _require,
    eigensystem,
    group_velocity,
    momentum_grid,
    step,
    to_position,
)


class SeamWarning(UserWarning):
    """Packet probability reached the periodic seam; the centroid is unreliable."""


@dataclass(frozen=True)
class GaussianSpec:
    k0: float
    sigma_k: float
    x0: int = 0
    branch: int = 1

    def __post_init__(self):
        if self.sigma_k <= 0:
            raise ValueError("sigma_k must be positive")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if abs(self.k0) + 5 * self.sigma_k >= np.pi:
            raise ValueError(
                f"momentum support |k0| + 5 sigma_k = {abs(self.k0) + 5 * self.sigma_k:.4g} reaches the zone edge"
            )


@dataclass
class TransportReport:
    times: np.ndarray
    centroids: np.ndarray
    fitted_velocity: float
    predicted_velocity: float
    tolerance: float
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return abs(self.fitted_velocity - self.predicted_velocity) <= self.tolerance

    def summary(self) -> dict:
        return {**self.params, "fitted": self.fitted_velocity, "predicted": self.predicted_velocity}

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "centroid"])
            for t, c in zip(self.times, self.centroids):
                w.writerow([int(t), f"{c:.17g}"])

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def branch_vectors(params: WalkParams, k: np.ndarray, branch: int) -> np.ndarray:
    """Eigenvectors of the chosen branch at every grid momentum, shape ``(2, N)``."""
    col = 0 if branch == 1 else 1
    return np.stack([eigensystem(params, kk).eigenvectors[:, col] for kk in k], axis=1)


def make_packet(spec: GaussianSpec, params: WalkParams, sites: int) -> SpinorField:
    """Position-space packet with momentum profile ``exp(-(k-k0)^2 / 4 sigma_k^2)``
    on the ``spec.branch`` eigenvectors, centred at site ``spec.x0``."""
    if sites % 2:
        raise ValueError("lattice size must be even")
    k = momentum_grid(sites)
    profile = np.exp(-((k - spec.k0) ** 2) / (4.0 * spec.sigma_k**2)) * np.exp(-1j * k * spec.x0)
    amp = branch_vectors(params, k, spec.branch) * profile
    amp /= np.linalg.norm(amp)
    return to_position(SpinorField(amp, "momentum"))


def centroid(field: SpinorField, center: float | None = None, seam_tol: float = 1e-10) -> float:
    """Mean position ``sum_x x p(x)``.

    Positions are unwrapped into the window ``[center - N/2, center + N/2)``;
    with ``center=None`` the window is the plain lattice ``[0, N)``.  A
    :class:`SeamWarning` is issued when more than ``seam_tol`` probability sits
    within two sites of the window edge.
    """
    _require(field, "position")
    N = field.sites
    p = field.density()
    total = p.sum()
    if center is None:
        center = N / 2
    x = np.arange(N)
    lo = center - N / 2
    xu = lo + np.mod(x - lo, N)
    near_seam = (xu - lo < 2) | (lo + N - xu <= 2)
    if p[near_seam].sum() > seam_tol * total:
        warnings.warn(f"{p[near_seam].sum():.3g} of the probability sits on the periodic seam", SeamWarning)
    return float(np.dot(xu, p) / total)


def measure_group_velocity(
    spec: GaussianSpec, params: WalkParams, sites: int, steps: int
) -> TransportReport:
    """Evolve a branch packet and fit its centroid drift against ``branch * v(k0)``.

    The slope is a least-squares line through the centroids of the second
    half of the run.  Tolerance is ``max(1e-2, 3 sigma_k |v'(k0)|)``.
    """
    # the s = -1 branch has eigenphase +omega and runs backwards
    v0 = spec.branch * float(group_velocity(params, spec.k0))
    reach = steps * abs(v0) + 5.0 / spec.sigma_k
    if reach >= sites / 2:
        raise ValueError(f"packet would wrap: steps*|v| + 5/sigma_k = {reach:.1f} >= N/2 = {sites // 2}")
    if steps < 20:
        raise ValueError("need at least 20 steps for a 10-point fit over the second half")

    psi = make_packet(spec, params, sites)
    times, cents = [0], [centroid(psi, center=spec.x0)]
    for t in range(1, steps + 1):
        psi = step(params, psi)
        times.append(t)
        cents.append(centroid(psi, center=spec.x0))
    times = np.array(times)
    cents = np.array(cents)

    half = times >= steps // 2
    slope = float(np.polyfit(times[half], cents[half], 1)[0])

    h = 1e-5
    dv = (group_velocity(params, spec.k0 + h) - group_velocity(params, spec.k0 - h)) / (2 * h)
    tol = max(1e-2, 3.0 * spec.sigma_k * abs(float(dv)))
    meta = {"m": params.m, "k0": spec.k0, "sigma_k": spec.sigma_k, "branch": spec.branch, "sites": sites, "steps": steps}
    return TransportReport(times, cents, slope, v0, tol, meta)
