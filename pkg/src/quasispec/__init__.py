"""Eigenvalue bounds for the Neumann Laplacian on quasidiscs, checked against FEM."""

__version__ = "0.1.0"
