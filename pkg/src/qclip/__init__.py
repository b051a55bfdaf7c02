"""Numerical verification of gradient bounds for quasiconformal self-maps of the
disk satisfying ``|L[w]| <= B |grad w|^2 + Gamma``."""

__version__ = "0.1.0"
