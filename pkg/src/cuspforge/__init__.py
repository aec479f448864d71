"""Cuspidal subgroups and Eisenstein cycles for subgroups of Gamma(2)."""

__version__ = "0.1.0"
