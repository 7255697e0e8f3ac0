"""Numerical laboratory for gauge-covariant modular operators."""
