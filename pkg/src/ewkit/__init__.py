"""Entanglement witnesses for three-qubit states from feasible regions of
Pauli expectation values."""

__version__ = "0.1.0"
