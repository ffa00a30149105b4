import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwmass.walk import SpinorField, WalkParams, group_velocity, momentum_grid, step, to_momentum
from qwmass.wavepacket import (
    GaussianSpec,
    SeamWarning,
    branch_vectors,
    centroid,
    make_packet,
    measure_group_velocity,
)


def test_spec_rejects_edge_support():
    with pytest.raises(ValueError):
        GaussianSpec(3.0, 0.05)
    with pytest.raises(ValueError):
        GaussianSpec(0.0, -1)
    with pytest.raises(ValueError):
        GaussianSpec(0.0, 0.1, branch=0)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(-0.9, 0.9),
    st.floats(-2.5, 2.5),
    st.floats(0.02, 0.1),
    st.sampled_from([1, -1]),
    st.integers(0, 255),
)
def test_packet_normalized_and_branch_pure(m, k0, sigma, branch, x0):
    p = WalkParams(m)
    spec = GaussianSpec(k0, sigma, x0, branch)
    psi = make_packet(spec, p, 256)
    assert abs(psi.norm() - 1) <= 1e-12
    mom = to_momentum(psi).amplitudes
    other = branch_vectors(p, momentum_grid(256), -branch)
    overlap = np.sum(np.conj(other) * mom)
    assert abs(overlap) <= 1e-12


def test_massless_packet_moves_at_light_speed():
    p = WalkParams(0.0)
    spec = GaussianSpec(1.0, 0.05, 1024)
    psi = make_packet(spec, p, 2048)
    c0 = centroid(psi, center=1024)
    for _ in range(30):
        psi = step(p, psi)
    assert abs(abs(centroid(psi, center=1024) - c0) - 30) <= 1e-9
    # one component only
    assert min(np.sum(np.abs(psi.amplitudes) ** 2, axis=1)) <= 1e-24


def test_centroid_delta_and_symmetric():
    assert centroid(SpinorField.delta(16, 5)) == 5
    amp = np.zeros((2, 32), dtype=complex)
    x = np.arange(32)
    amp[0] = np.exp(-((x - 12) ** 2) / 8)
    assert centroid(SpinorField(amp)) == pytest.approx(12, abs=1e-9)


def test_centroid_unwraps_across_seam():
    amp = np.zeros((2, 64), dtype=complex)
    amp[0, [62, 63, 0, 1]] = [1, 1, 1, 1]
    # centred on the seam: positions 62, 63 become -2, -1
    assert centroid(SpinorField(amp), center=0) == pytest.approx(-0.5, abs=1e-12)


def test_centroid_warns_on_seam():
    amp = np.zeros((2, 16), dtype=complex)
    amp[0, 0] = 1
    with pytest.warns(SeamWarning):
        centroid(SpinorField(amp), center=8)


def test_unit_mass_packet_stays():
    p = WalkParams(1.0)
    amp = np.zeros((2, 128), dtype=complex)
    x = np.arange(128)
    amp[0] = np.exp(-((x - 50) ** 2) / 20)
    amp[1] = 0.3j * np.exp(-((x - 52) ** 2) / 30)
    psi = SpinorField(amp / np.linalg.norm(amp))
    c0 = centroid(psi)
    for _ in range(10):
        psi = step(p, psi)
    assert abs(centroid(psi) - c0) <= 1e-9


def test_transport_example():
    rep = measure_group_velocity(GaussianSpec(math.pi / 2, 0.05), WalkParams(0.6), 2048, 200)
    assert abs(rep.fitted_velocity - 0.8) <= 1e-2
    assert rep.predicted_velocity == pytest.approx(0.8)
    assert rep.passed and abs(rep.fitted_velocity) <= 1


def test_transport_at_rest():
    rep = measure_group_velocity(GaussianSpec(0.0, 0.05), WalkParams(0.5), 2048, 100)
    assert abs(rep.fitted_velocity) <= 1e-2


@pytest.mark.parametrize("k0", [0.3, 1.2, -2.0])
def test_transport_massless(k0):
    rep = measure_group_velocity(GaussianSpec(k0, 0.05), WalkParams(0.0), 2048, 100)
    assert abs(abs(rep.fitted_velocity) - 1) <= 1e-3


def test_transport_refuses_wrap():
    with pytest.raises(ValueError, match="wrap"):
        measure_group_velocity(GaussianSpec(1.0, 0.05), WalkParams(0.0), 256, 200)
    with pytest.raises(ValueError):
        measure_group_velocity(GaussianSpec(1.0, 0.05), WalkParams(0.0), 2048, 5)


def test_transport_causality_and_norm():
    p = WalkParams(0.4)
    spec = GaussianSpec(0.8, 0.2, 100)
    psi = make_packet(spec, p, 512)
    # strict locality: a delta spreads at most one site per step
    d = SpinorField.delta(512, 200)
    for t in range(1, 41):
        d = step(p, d)
        psi = step(p, psi)
        far = np.abs(np.arange(512) - 200) > t
        assert np.all(d.amplitudes[:, far] == 0)
        assert abs(psi.norm() - 1) <= 1e-12


@settings(max_examples=6, deadline=None)
@given(st.sampled_from([0.2, 0.6, 0.9]), st.floats(0.2, 2.2), st.sampled_from([1, -1]))
def test_velocity_consistency(m, k0, branch):
    rep = measure_group_velocity(GaussianSpec(k0, 0.05, branch=branch), WalkParams(m), 2048, 120)
    assert rep.predicted_velocity == branch * group_velocity(WalkParams(m), k0)
    assert rep.passed
    assert abs(rep.fitted_velocity) <= 1


def test_transport_exports(tmp_path):
    rep = measure_group_velocity(GaussianSpec(0.5, 0.1), WalkParams(0.3), 512, 40)
    rep.write_csv(tmp_path / "t.csv")
    rep.write_json(tmp_path / "t.json")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "t,centroid" and len(lines) == 42
    summary = json.loads((tmp_path / "t.json").read_text())
    assert {"m", "k0", "sigma_k", "fitted", "predicted"} <= set(summary)
