import csv
import math
import warnings

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from qwmass.bohr import (
    AtomSpec,
    coulomb_expectations,
    coupling_substituted,
    grav_expectations,
    mass_scaling_report,
    write_table_csv,
)

positive = st.floats(0.1, 10)


def quiet(*args, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return AtomSpec(*args, **kw)


def test_spec_validation():
    with pytest.raises(ValueError):
        AtomSpec(0)
    with pytest.raises(ValueError):
        AtomSpec(1.5)
    with pytest.warns(UserWarning, match="M/m"):
        AtomSpec(2, m=1, M=10)
    assert quiet(3).l == 3


def test_grav_examples():
    g = grav_expectations(quiet(2))
    assert g.r_mean == 3.0
    s = quiet(3, m=1.3, M=7.0, G=0.4)
    assert grav_expectations(s.scaled(2)).energy / grav_expectations(s).energy == pytest.approx(8)
    assert grav_expectations(s.scaled(2)).r_mean / grav_expectations(s).r_mean == pytest.approx(0.25)


def test_coulomb_examples():
    c = coulomb_expectations(quiet(2))
    assert c.r_mean == 3.0 and c.r2_mean == 6.0
    assert c.omega_mean == pytest.approx(1 / 3)
    e1, e2 = coulomb_expectations(quiet(1)).energy, coulomb_expectations(quiet(2)).energy
    assert e2 / e1 == pytest.approx(0.25)


def test_ground_state_omega_undefined():
    assert coulomb_expectations(quiet(1)).r2_mean == 0
    assert coulomb_expectations(quiet(1)).omega_mean is None
    assert grav_expectations(quiet(1)).omega_mean is None


def test_substitution_symbolic():
    # oracle: Coulomb closed forms with e^2 -> G M m, simplified by sympy
    n, m, M, G, hbar = sp.symbols("n m M G hbar", positive=True)
    e2 = G * M * m
    a0 = hbar**2 / (m * e2)
    r = a0 * n * (n - sp.Rational(1, 2))
    r2 = sp.Rational(1, 2) * n**2 * a0**2 * (2 * n**2 - 3 * n + 1)
    omega = n * hbar / (m * r2)
    energy = -m * e2**2 / (2 * hbar**2 * n**2)
    f = sp.lambdify((n, m, M, G, hbar), (r, r2, omega, energy))
    for nn in range(2, 7):
        s = quiet(nn, m=0.7, M=900.0, G=1.3, hbar=0.9)
        g = grav_expectations(s)
        want = f(nn, 0.7, 900.0, 1.3, 0.9)
        for got, w in zip((g.r_mean, g.r2_mean, g.omega_mean, g.energy), want):
            assert got == pytest.approx(w, rel=1e-12)


@given(st.integers(2, 6), positive, positive, positive, positive)
def test_substitution_numeric(n, m, M, G, hbar):
    s = quiet(n, m=m, M=M * 100 * m, G=G, hbar=hbar)
    g, c = grav_expectations(s), coulomb_expectations(coupling_substituted(s))
    for a, b in ((g.r_mean, c.r_mean), (g.r2_mean, c.r2_mean), (g.omega_mean, c.omega_mean), (g.energy, c.energy)):
        assert abs(a - b) <= 1e-12 * abs(a)


@pytest.mark.parametrize("factor", [2.0, 10.0, 0.3])
def test_scaling_exponents(factor):
    rep = mass_scaling_report(quiet(3, M=1000.0), factor)
    g = rep["gravitational"]
    assert abs(g["r_mean"] + 2) <= 1e-12
    assert abs(g["omega_mean"] - 3) <= 1e-12
    assert abs(g["energy"] - 3) <= 1e-12
    assert rep["gravitational_rounded"] == {"r_mean": -2, "omega_mean": 3, "energy": 3}
    assert abs(rep["coulomb"]["energy"] - 1) <= 1e-12
    assert rep["equivalence_violated"]
    assert rep["energy_per_mass_exponent"] == pytest.approx(2)


def test_scaling_n1_undefined_omega():
    rep = mass_scaling_report(quiet(1, M=1000.0))
    assert rep["gravitational"]["omega_mean"] is None


def test_scaling_bad_factor():
    with pytest.raises(ValueError):
        mass_scaling_report(quiet(2), 1.0)


def test_table_csv(tmp_path):
    write_table_csv(tmp_path / "t.csv", quiet(1, M=1000.0))
    rows = list(csv.reader(open(tmp_path / "t.csv")))
    assert rows[0] == ["observable", "coulomb", "gravitational"]
    omega_row = [r for r in rows if r[0].startswith("omega")][0]
    assert omega_row[1:] == ["undefined", "undefined"]
    energy = [r for r in rows if r[0] == "energy"][0]
    assert float(energy[2]) == -(1000.0**2) / 2
    assert math.isfinite(float(energy[1]))
