"""Expectation values of the Coulomb and gravitational Bohr atoms with ``l = n``.

The gravitational atom follows from the Coulomb one by ``e^2 -> G M m``.
Both sides are coded from their own closed forms so the substitution can be
checked rather than assumed.  Units are Gaussian (electrostatic CGS) for the
Coulomb side.

With ``l = n`` the ground state ``n = 1`` has ``<r^2> = 0`` by the formula,
so ``<omega>`` is undefined there and reported as ``None``.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass


@dataclass(frozen=True)
class AtomSpec:
    n: int
    m: float = 1.0
    M: float = 1.0
    G: float = 1.0
    hbar: float = 1.0
    e: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"principal quantum number must be a positive integer, got {self.n}")
        if self.m <= 0 or self.M <= 0:
            raise ValueError("masses must be positive")
        if self.M / self.m < 100:
            warnings.warn(f"M/m = {self.M / self.m:.3g} < 100: external-field approximation is poor", stacklevel=2)

    @property
    def l(self) -> int:
        return self.n

    def scaled(self, factor: float) -> AtomSpec:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return AtomSpec(self.n, self.m * factor, self.M, self.G, self.hbar, self.e)


@dataclass(frozen=True)
class Expectations:
    r_mean: float
    r2_mean: float
    omega_mean: float | None  # nhbar / (m <r^2>), approximate; None when <r^2> = 0
    energy: float


def _omega_shape(n: int) -> float:
    return n * (n * n - 1.5 * n + 0.5)


def grav_expectations(spec: AtomSpec) -> Expectations:
    n, m, M, G, hbar = spec.n, spec.m, spec.M, spec.G, spec.hbar
    r = n * (n - 0.5) * hbar**2 / (G * M * m**2)
    a_g = hbar**2 / (G * M * m**2)
    r2 = 0.5 * n**2 * a_g**2 * (2 * n * n - 3 * n + 1)
    shape = _omega_shape(n)
    omega = None if shape == 0 else G**2 * M**2 * m**3 / (shape * hbar**3)
    energy = -(G**2) * M**2 * m**3 / (2 * n**2 * hbar**2)
    return Expectations(r, r2, omega, energy)


def coulomb_expectations(spec: AtomSpec) -> Expectations:
    n, m, hbar, e = spec.n, spec.m, spec.hbar, spec.e
    a0 = hbar**2 / (m * e**2)
    r = a0 * n * (n - 0.5)
    r2 = 0.5 * n**2 * a0**2 * (2 * n * n - 3 * n + 1)
    omega = None if r2 == 0 else n * hbar / (m * r2)
    energy = -m * e**4 / (2 * hbar**2 * n**2)
    return Expectations(r, r2, omega, energy)


def coupling_substituted(spec: AtomSpec) -> AtomSpec:
    """Coulomb spec whose ``e^2`` equals ``G M m``."""
    return _replace_e(spec, math.sqrt(spec.G * spec.M * spec.m))


def _replace_e(spec: AtomSpec, e: float) -> AtomSpec:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return AtomSpec(spec.n, spec.m, spec.M, spec.G, spec.hbar, e)


def _exponent(a, b, factor):
    if a is None or b is None:
        return None
    return math.log(abs(b) / abs(a)) / math.log(factor)


def mass_scaling_report(spec: AtomSpec, factor: float = 2.0) -> dict:
    """Power-law exponents in ``m`` of each observable under ``m -> factor * m``.

    Gravitational ``E/m`` scales as ``m^2``, so bound energies are not
    proportional to mass: ``equivalence_violated`` reports that.
    """
    if factor <= 0 or factor == 1:
        raise ValueError("factor must be positive and different from 1")
    g0, g1 = grav_expectations(spec), grav_expectations(spec.scaled(factor))
    c0, c1 = coulomb_expectations(spec), coulomb_expectations(spec.scaled(factor))
    grav = {
        "r_mean": _exponent(g0.r_mean, g1.r_mean, factor),
        "omega_mean": _exponent(g0.omega_mean, g1.omega_mean, factor),
        "energy": _exponent(g0.energy, g1.energy, factor),
    }
    coul = {
        "r_mean": _exponent(c0.r_mean, c1.r_mean, factor),
        "omega_mean": _exponent(c0.omega_mean, c1.omega_mean, factor),
        "energy": _exponent(c0.energy, c1.energy, factor),
    }
    rounded = {k: (None if v is None else round(v)) for k, v in grav.items()}
    e_per_mass = grav["energy"] - 1.0
    return {
        "factor": factor,
        "n": spec.n,
        "gravitational": grav,
        "gravitational_rounded": rounded,
        "coulomb": coul,
        "energy_per_mass_exponent": e_per_mass,
        "equivalence_violated": abs(e_per_mass) > 1e-9,
    }


def table_rows(spec: AtomSpec):
    """Rows ``(observable, coulomb, gravitational)`` mirroring the comparison table."""
    c, g = coulomb_expectations(spec), grav_expectations(spec)
    return [
        ("potential_at_unit_r", spec.e**2, spec.G * spec.M * spec.m),
        ("r_mean", c.r_mean, g.r_mean),
        ("r2_mean", c.r2_mean, g.r2_mean),
        ("omega_mean_approx", c.omega_mean, g.omega_mean),
        ("energy", c.energy, g.energy),
    ]


def write_table_csv(path, spec: AtomSpec):
    def fmt(v):
        return "undefined" if v is None else f"{v:.17g}"

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["observable", "coulomb", "gravitational"])
        for name, c, g in table_rows(spec):
            w.writerow([name, fmt(c), fmt(g)])
