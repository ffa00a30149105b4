"""Frame changes on a superposition of masses.

A closed translate/boost loop leaves each mass with its own phase.  For a
trajectory that accelerates and stops, the same kind of phase amounts to a
shift of the packet along proper time.

Run: python3 demos/mass_superposition_frames.py
"""
import numpy as np

from qwmass import frames

loop = frames.bargmann_compose(l=3.0, v=0.5, masses=[1.0, 1.5])
print("relative phase of the heavier component:", loop.relative_phases[1])
print("  -dm v l                            :", -0.5 * 0.5 * 3.0)
print("  clock offset of the Lorentz loop   :", frames.lorentz_compose(3.0, 0.5)[1])

packet = frames.gaussian_mass_packet(512, mass_center=1.0, sigma_mc2=0.5)
bump = frames.Trajectory.bump(1.0, 2.0)
res = frames.paradox_shift(bump, packet)
print(f"bump A=1, T=2: predicted delta tau {res.delta_tau_pred:.6f} (A^2 pi^2 / 4T = {np.pi**2 / 8:.6f})")
print(f"  |phase-moved packet - tau-shifted packet| = {res.l2_distance:.2e}")

d_e, d_tau, prod = frames.packet_uncertainty(packet)
print(f"Gaussian: d(mc^2) = {d_e:.4f}, d(tau) = {d_tau:.4f}, product = {prod:.6f}")
rng = np.random.default_rng(1)
worst = min(frames.packet_uncertainty(frames.random_resolved_packet(rng))[2] for _ in range(200))
print(f"smallest product over 200 random packets: {worst:.12f}")
