"""Isomorphism testing for p-groups of class 2 and exponent p via skew
matrix spaces over F_p."""

__version__ = "0.1.0"
