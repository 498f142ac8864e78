"""Brusselator with nonlinear diffusion: Turing thresholds, amplitude equations and pattern simulation."""

__version__ = "0.1.0"
