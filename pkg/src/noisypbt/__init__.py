"""Noisy port-based teleportation and entanglement teleportation under local Pauli noise."""

__version__ = "0.1.0"
