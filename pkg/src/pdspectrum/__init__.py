"""Spectral structure of the period doubling Hamiltonian."""

__version__ = "0.1.0"
