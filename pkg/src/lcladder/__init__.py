"""Impedance, convergence and wave transport of LC ladder networks."""
