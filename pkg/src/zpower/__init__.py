"""Discrete power map Z^a: lattice evolution, integrable structure and asymptotics."""

from .lattice import PowerMapGrid, evolve_grid
from .numerics import PrecisionContext

__all__ = ["PowerMapGrid", "PrecisionContext", "evolve_grid"]
__version__ = "0.1.0"
