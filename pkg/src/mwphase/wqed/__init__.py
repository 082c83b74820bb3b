"""Waveguide QED: analytic scattering and the two-excitation lattice engine."""
