"""
hsthermo core: linear algebra, Lindblad generators, the qubit model,
the thermometry scheme and the joint-simulation oracle.
"""

from .errors import ThermometryError
from .models import QubitThermalModel, thermal_quantities
from .scheme import (
    GammaValue,
    SchemeConfig,
    gamma_analytic,
    gamma_numeric,
    output_state,
    qfi_example_noise,
    qfi_generic,
    qfi_ideal,
)
from .types import Operator, Superoperator

__all__ = [
    "ThermometryError",
    "QubitThermalModel",
    "thermal_quantities",
    "GammaValue",
    "SchemeConfig",
    "gamma_analytic",
    "gamma_numeric",
    "output_state",
    "qfi_example_noise",
    "qfi_generic",
    "qfi_ideal",
    "Operator",
    "Superoperator",
]
