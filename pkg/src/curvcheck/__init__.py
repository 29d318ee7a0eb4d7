"""Curvature-dimension diagnostics for reversible continuous-time Markov
chains: operator evaluation, CD certificate verification, and the derived
entropy, smoothing, diameter, and Nash-type inequality checks."""

__version__ = "0.1.0"
