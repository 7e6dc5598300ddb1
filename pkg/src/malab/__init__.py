"""Numerical laboratory for Euclidean-complete solutions of det D^2 u = u^p."""
