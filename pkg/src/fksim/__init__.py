"""Killed Feynman-Kac semigroups with singular Schrodinger potentials.

Weighted interacting-particle estimation of principal eigenvalues,
quasi-stationary distributions, and Lyapunov drift conditions for four
process models: overdamped Langevin, isotropic Levy, kinetic Langevin,
and interacting Levy particles.
"""

__version__ = "0.1.0"
