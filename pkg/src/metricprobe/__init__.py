"""Simulation of a distributed-entanglement probe for metric superpositions."""

__version__ = "0.1.0"
