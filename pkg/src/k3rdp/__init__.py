"""Lattice-theoretic existence tests for K3 surfaces with rational double points."""

__version__ = "0.1.0"
