"""Numerical laboratory for weighted Saitoh-type kernel inequalities on planar
domains, their products and fibrations."""

__version__ = "0.1.0"
