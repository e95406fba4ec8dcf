"""Entanglement dynamics of two qubits coupled through nonreciprocal environments."""

__version__ = "0.1.0"
