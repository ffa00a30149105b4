"""Particles whose mass is a dynamical variable.

Run: python3 demos/variable_mass_dynamics.py
"""
import math

from qwmass import bohr, varmass

# an excited particle relaxes and its clock falls behind by mu / (gamma m0)
spec = varmass.DecaySpec(m0=1.0, mu=0.01, gamma=1.0)
tr = varmass.decay_run(spec, varmass.IntegratorConfig(1e-2, 20.0))
print(f"decay: final mass {tr.mass[-1]:.8f}, clock deficit {tr.t[-1] - tr.tau[-1]:.6f} "
      f"(predicted {varmass.decay_redshift(spec):.6f})")

# binding energy shows up as inertia: the late oscillation uses the bound mass
K = 1.0
bind = varmass.BindingSpec(m0=1.0, phi0=-0.01, gamma=1.0)
rep = varmass.binding_run(varmass.ExternalPotential.harmonic(K), bind, varmass.IntegratorConfig(1e-2, 80.0), harmonic_k=K)
print(f"binding: fitted frequency {rep.fitted_frequency:.8f}, sqrt(K/mu0) = {math.sqrt(K / bind.final_mass):.8f}")

# a gravitationally bound level does not scale linearly with the orbiting mass
report = bohr.mass_scaling_report(bohr.AtomSpec(3, M=1000.0), 2.0)
print("gravitational exponents in m:", report["gravitational_rounded"])
print("Coulomb energy exponent     :", round(report["coulomb"]["energy"]))
