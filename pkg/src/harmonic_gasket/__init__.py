"""Harmonic N-Sierpinski gaskets: exact simplex geometry, graph energies,
the Kusuoka measure and matrix metric, de Rham geodesic curves, geodesic
distance, and a discrete heat kernel."""

__version__ = "0.1.0"

from . import errors  # noqa: F401
