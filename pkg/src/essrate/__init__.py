"""
essrate - Essential convergence rates of optimizer ODEs

A library and batch CLI that simulates time-rescaled optimizer dynamics under
stability-domain-constrained explicit Runge-Kutta discretization, and checks
that no time-rescaling beats the essential convergence rate of an ODE class.
"""

__version__ = "0.1.0"
