"""hsthermo: Heisenberg-scaling thermometry with a thermalizing probe ensemble and one ancilla."""

from .__version__ import __version__

__author__ = "hsthermo Team"

__all__ = ["__version__"]
