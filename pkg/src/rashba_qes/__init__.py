"""Quasi-exact spectrum of the Rashba quantum-dot Hamiltonian, with a brute-force check."""

__version__ = "0.1.0"
