"""A Gaussian packet on the Dirac walk drifts at the group velocity.

Run: python3 demos/walk_transport.py
"""
import math

from qwmass import walk, wavepacket

params = walk.WalkParams(0.6)
print(f"mass m = {params.m}, hopping n = {params.n:.3f}")

# the eigenphase omega(k) sits on the circle sin^2 omega = n^2 sin^2 k + m^2
for k in (0.0, 0.5, math.pi / 2):
    w = float(walk.omega(params, k))
    print(f"  k = {k:.3f}  omega = {w:.6f}  v = {float(walk.group_velocity(params, k)):+.6f}")

# a narrow momentum packet should move at v(k0); the opposite branch runs backwards
for branch in (1, -1):
    spec = wavepacket.GaussianSpec(k0=math.pi / 2, sigma_k=0.05, branch=branch)
    rep = wavepacket.measure_group_velocity(spec, params, sites=2048, steps=200)
    print(f"branch {branch:+d}: fitted {rep.fitted_velocity:+.5f}, predicted {rep.predicted_velocity:+.5f}")

# at m = 0 the walk just shifts each component by one site per step
psi = walk.SpinorField.delta(64, 10, component=1)
print("massless walk, right mover after 5 steps at site", int(walk.evolve(walk.WalkParams(0.0), psi, 5).density().argmax()))
