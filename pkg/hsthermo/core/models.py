"""
Qubit thermal probe model in dimensionless units.

hbar = k_B = 1, energies in units of hbar*Omega, rates in units of the
coupling g and time in units of 1/g, so one probing interval lasts exactly 1.
|0> is the probe ground state: sigma_minus = |0><1| and the Gibbs state has
tr(sigma_z rho_T) = +1/(2 nbar + 1).
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Callable, Dict, Tuple

import numpy as np

from .errors import InvalidParameterError
from .lindblad import LindbladSpec
from .linops import check_density_matrix
from .types import Operator

logger = logging.getLogger(__name__)

SIGMA_Z = Operator(np.diag([1.0, -1.0]))
SIGMA_X = Operator(np.array([[0.0, 1.0], [1.0, 0.0]]))
SIGMA_MINUS = Operator(np.array([[0.0, 1.0], [0.0, 0.0]]))
SIGMA_PLUS = SIGMA_MINUS.dag

DERIVATIVE_REL_STEP = 1e-6
DERIVATIVE_CHECK_RTOL = 1e-8


def central_difference(fn: Callable[[float], Any], x: float, step: float) -> Any:
    return (fn(x + step) - fn(x - step)) / (2.0 * step)


def richardson_derivative(fn: Callable[[float], Any], x: float, rel_step: float = DERIVATIVE_REL_STEP) -> Any:
    """Central difference with one Richardson extrapolation step (error O(h^4))"""
    step = rel_step * abs(x) if x != 0 else rel_step
    coarse = central_difference(fn, x, step)
    fine = central_difference(fn, x, step / 2.0)
    return (4.0 * fine - coarse) / 3.0


@dataclass(frozen=True)
class QubitThermalModel:
    """Worked-example parameters

    Args:
        theta: k_B T / (hbar Omega)
        xi: gamma / g, thermalization rate; math.inf is the instant-thermalization limit
        eta: kappa_A / g, ancilla dephasing rate
        kappa_s_over_g: probe dephasing rate
        omega_over_g: probe level splitting in units of g
    """

    theta: float = 2.0
    xi: float = 400.0
    eta: float = 0.1
    kappa_s_over_g: float = 0.0
    omega_over_g: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise InvalidParameterError(f"theta must be positive and finite, got {self.theta}")
        if not self.xi > 0:
            raise InvalidParameterError(f"xi must be positive, got {self.xi}")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise InvalidParameterError(f"eta must be nonnegative, got {self.eta}")
        if not (math.isfinite(self.kappa_s_over_g) and self.kappa_s_over_g >= 0):
            raise InvalidParameterError(
                f"kappa_s_over_g must be nonnegative, got {self.kappa_s_over_g}"
            )
        if not math.isfinite(self.omega_over_g):
            raise InvalidParameterError(f"omega_over_g must be finite, got {self.omega_over_g}")

    @property
    def ideal_thermalization(self) -> bool:
        return math.isinf(self.xi)

    def with_(self, **changes) -> "QubitThermalModel":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ThermalQuantities:
    """Thermal occupation, phase, its theta-derivative and the Gibbs-state QFI"""
    nbar: float
    phi: float
    dphi_dtheta: float
    f_th: float


def _sech_squared(x: float) -> float:
    decay = math.exp(-2.0 * abs(x))
    return 4.0 * decay / (1.0 + decay) ** 2


def mean_occupation(theta: float) -> float:
    """Bose occupation 1/(e^{1/theta} - 1)"""
    inverse = 1.0 / theta
    return math.exp(-inverse) / -math.expm1(-inverse)


def thermal_phase(theta: float) -> float:
    """phi_T = tanh(1/(2 theta)) = 1/(2 nbar + 1)"""
    return math.tanh(0.5 / theta)


def thermal_quantities(theta: float) -> ThermalQuantities:
    """Closed-form thermal quantities, derivative cross-checked by central differences"""
    if not (math.isfinite(theta) and theta > 0):
        raise InvalidParameterError(f"theta must be positive and finite, got {theta}")
    sech2 = _sech_squared(0.5 / theta)
    dphi = -sech2 / (2.0 * theta ** 2)
    f_th = (1.0 / (2.0 * theta ** 2)) ** 2 * sech2

    numeric = central_difference(thermal_phase, theta, DERIVATIVE_REL_STEP * theta)
    if dphi != 0 and abs(numeric - dphi) > DERIVATIVE_CHECK_RTOL * abs(dphi):
        logger.warning(
            f"dphi/dtheta closed form {dphi:.12g} disagrees with central difference "
            f"{numeric:.12g} at theta={theta:g}"
        )
    return ThermalQuantities(
        nbar=mean_occupation(theta), phi=thermal_phase(theta), dphi_dtheta=dphi, f_th=f_th
    )


def gibbs_state(theta: float) -> Operator:
    phi = thermal_phase(theta)
    return Operator(np.diag([(1.0 + phi) / 2.0, (1.0 - phi) / 2.0]))


def probe_hamiltonian(model: QubitThermalModel) -> Operator:
    """H = -(Omega/g)/2 sigma_z, which makes |0> the ground state"""
    return -0.5 * model.omega_over_g * SIGMA_Z


def probe_liouvillian(model: QubitThermalModel) -> LindbladSpec:
    """Thermalizing generator: decay sigma_minus at xi(nbar+1), excitation sigma_plus at xi nbar"""
    if model.ideal_thermalization:
        raise InvalidParameterError("The instant-thermalization limit has no finite probe Liouvillian")
    nbar = mean_occupation(model.theta)
    return LindbladSpec(
        hamiltonian=probe_hamiltonian(model),
        jumps=((model.xi * (nbar + 1.0), SIGMA_MINUS), (model.xi * nbar, SIGMA_PLUS)),
    )


def probe_noise(model: QubitThermalModel) -> LindbladSpec:
    """Probe dephasing kappa_S (sigma_z . sigma_z - id)"""
    return LindbladSpec(hamiltonian=Operator.zeros(2), jumps=((model.kappa_s_over_g, SIGMA_Z),))


def ancilla_noise(model: QubitThermalModel) -> LindbladSpec:
    """Ancilla dephasing eta (sigma_z . sigma_z - id); the ancilla Hamiltonian is zero in the rotating frame"""
    return LindbladSpec(hamiltonian=Operator.zeros(2), jumps=((model.eta, SIGMA_Z),))


def coupling_operators() -> Tuple[Operator, Operator]:
    """(S, A) of the probe-ancilla coupling g S kron A"""
    return SIGMA_Z, SIGMA_Z


def ancilla_state(sigma00: float = 0.5, sigma01: complex = 0.5) -> Operator:
    """Qubit density matrix [[sigma00, sigma01], [sigma01*, 1 - sigma00]]"""
    state = Operator(np.array([[sigma00, sigma01], [np.conj(sigma01), 1.0 - sigma00]]))
    return check_density_matrix(state, name="ancilla state")


def ancilla_plus_state() -> Operator:
    return ancilla_state(0.5, 0.5)


def probe_state(rho00: float, rho01: complex = 0.0) -> Operator:
    state = Operator(np.array([[rho00, rho01], [np.conj(rho01), 1.0 - rho00]]))
    return check_density_matrix(state, name="probe state")
