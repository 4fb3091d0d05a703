"""
Ancilla-mediated thermometry: phase factor Gamma, output states and QFI.

Each probe thermalizes while coupled to the ancilla through g sigma_z kron sigma_z
for one unit of time. Probes act on the ancilla coherence |0><1| through the
trace factor Gamma of the (01) sector map; N probes give Gamma^N, and ancilla
dephasing at rate eta multiplies by exp(-2 eta).
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
import scipy.linalg

from .errors import (
    InvalidParameterError,
    InvalidStateError,
    NonFiniteError,
    NonHermitianError,
    ThermometryError,
)
from .lindblad import LindbladSpec, build_liouvillian, damping_basis
from .linops import (
    check_density_matrix,
    expm,
    left_mult,
    right_mult,
    trace_distance,
)
from .models import (
    DERIVATIVE_REL_STEP,
    QubitThermalModel,
    ancilla_noise,
    ancilla_plus_state,
    coupling_operators,
    gibbs_state,
    probe_liouvillian,
    probe_noise,
    richardson_derivative,
    thermal_phase,
    thermal_quantities,
)
from .types import Operator, Superoperator

logger = logging.getLogger(__name__)

GAMMA_MODULUS_TOL = 1e-10
HERMITICITY_TOL = 1e-9
EIGEN_CUTOFF = 1e-12
DIFFERENCE_CLUSTER_TOL = 1e-9
CHAIN_RULE_CHECK_RTOL = 1e-6
STATE_TOL = 1e-10
# Ancilla sigma_z eigenvalue spread a_M - a_m
SIGMA_Z_GAP = 2.0


@dataclass(frozen=True)
class SchemeConfig:
    """One run of the scheme

    Args:
        model: physical parameters
        n_probes: number of probes N interacting with the ancilla in turn
        ancilla_initial: sigma, defaults to |+><+|
        probe_initial: rho, defaults to the Gibbs state rho_T (None)
    """

    model: QubitThermalModel
    n_probes: int = 1
    ancilla_initial: Operator = field(default_factory=ancilla_plus_state)
    probe_initial: Optional[Operator] = None

    def __post_init__(self):
        if int(self.n_probes) != self.n_probes or self.n_probes < 1:
            raise InvalidParameterError(f"n_probes must be a positive integer, got {self.n_probes}")
        object.__setattr__(self, "n_probes", int(self.n_probes))
        check_density_matrix(
            self.ancilla_initial, trace_tol=STATE_TOL, herm_tol=STATE_TOL, name="ancilla_initial"
        )
        if self.ancilla_initial.dim != 2:
            raise InvalidStateError("ancilla_initial must be a qubit state")
        if self.probe_initial is not None:
            check_density_matrix(
                self.probe_initial, trace_tol=STATE_TOL, herm_tol=STATE_TOL, name="probe_initial"
            )
            if self.probe_initial.dim != 2:
                raise InvalidStateError("probe_initial must be a qubit state")

    def with_(self, **changes) -> "SchemeConfig":
        values = {
            "model": self.model,
            "n_probes": self.n_probes,
            "ancilla_initial": self.ancilla_initial,
            "probe_initial": self.probe_initial,
        }
        values.update(changes)
        return SchemeConfig(**values)


@dataclass(frozen=True)
class GammaValue:
    """Gamma and its theta-derivative; |Gamma| <= 1"""
    value: complex
    dvalue_dtheta: complex

    def __post_init__(self):
        if not (cmath.isfinite(self.value) and cmath.isfinite(self.dvalue_dtheta)):
            raise NonFiniteError(f"Gamma is not finite: {self.value}, {self.dvalue_dtheta}")
        if abs(self.value) > 1.0 + GAMMA_MODULUS_TOL:
            raise ThermometryError(f"|Gamma| = {abs(self.value):.15g} exceeds 1")

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def dmodulus_dtheta(self) -> float:
        if self.value == 0:
            return 0.0
        return (self.value.conjugate() * self.dvalue_dtheta).real / abs(self.value)


@dataclass(frozen=True)
class NoiseDressedState:
    """Ancilla state after one unit of effective noise, with its eigensystem"""
    delta: Operator
    eigvals: np.ndarray
    eigvecs: np.ndarray

    def __post_init__(self):
        if np.min(self.eigvals) < -STATE_TOL or abs(np.sum(self.eigvals) - 1.0) > STATE_TOL:
            raise InvalidStateError(f"Noise-dressed state has eigenvalues {self.eigvals}")


def _probe_d0(model: QubitThermalModel, probe_initial: Optional[Operator], theta: float) -> float:
    """Population imbalance rho00 - rho11 of the probe at the start of its interaction"""
    if probe_initial is None:
        return thermal_phase(theta)
    entries = probe_initial.entries
    return float((entries[0, 0] - entries[1, 1]).real)


def _gamma_closed_form(theta: float, xi: float, d0: float) -> complex:
    if math.isinf(xi):
        return cmath.exp(-2j * thermal_phase(theta))
    a = 1.0 / thermal_phase(theta)
    root = cmath.sqrt(a * a * xi * xi - 8j * xi - 16.0)
    omega_plus = -(4j * xi + 8.0) / (a * xi + root)
    omega_minus = (-a * xi - root) / 2.0
    weight = (a * xi - 4j * d0) / root
    return 0.5 * cmath.exp(omega_plus) * (1.0 + weight) + 0.5 * cmath.exp(omega_minus) * (1.0 - weight)


def _population_generator(theta: float, xi: float) -> np.ndarray:
    """(01)-sector generator on (trace, rho00 - rho11), rates in units of g"""
    a = 1.0 / thermal_phase(theta)
    return np.array([[0.0, -2j], [xi - 2j, -a * xi]])


def gamma_derivative_chain_rule(model: QubitThermalModel, probe_initial: Optional[Operator] = None) -> complex:
    """d Gamma / d theta through a = 2 nbar + 1, using the Frechet derivative of expm"""
    theta, xi = model.theta, model.xi
    thermal = thermal_quantities(theta)
    if model.ideal_thermalization:
        return -2j * thermal.dphi_dtheta * _gamma_closed_form(theta, xi, thermal.phi)
    da_dtheta = -thermal.dphi_dtheta / thermal.phi ** 2
    direction = np.array([[0.0, 0.0], [0.0, -xi * da_dtheta]])
    propagator, derivative = scipy.linalg.expm_frechet(_population_generator(theta, xi), direction)
    d0 = _probe_d0(model, probe_initial, theta)
    dd0 = thermal.dphi_dtheta if probe_initial is None else 0.0
    return complex(derivative[0, 0] + derivative[0, 1] * d0 + propagator[0, 1] * dd0)


def gamma_analytic(model: QubitThermalModel, probe_initial: Optional[Operator] = None) -> GammaValue:
    """Closed-form Gamma with the principal square-root branch

    The derivative is a Richardson-extrapolated central difference in theta
    (step 1e-6 theta), compared against the chain rule. In the
    instant-thermalization limit both are exact: Gamma = exp(-2i phi_T).
    """
    xi = model.xi
    value = _gamma_closed_form(model.theta, xi, _probe_d0(model, probe_initial, model.theta))
    if model.ideal_thermalization:
        return GammaValue(value=value, dvalue_dtheta=gamma_derivative_chain_rule(model))

    def gamma_at(theta: float) -> complex:
        return _gamma_closed_form(theta, xi, _probe_d0(model, probe_initial, theta))

    derivative = richardson_derivative(gamma_at, model.theta, DERIVATIVE_REL_STEP)
    chain = gamma_derivative_chain_rule(model, probe_initial)
    if abs(derivative - chain) > CHAIN_RULE_CHECK_RTOL * max(abs(chain), 1e-12):
        logger.warning(
            f"dGamma/dtheta finite difference {derivative:.10g} disagrees with chain rule "
            f"{chain:.10g} at theta={model.theta:g}, xi={xi:g}"
        )
    return GammaValue(value=value, dvalue_dtheta=complex(derivative))


def _probe_generator(model: QubitThermalModel) -> Superoperator:
    return build_liouvillian(probe_liouvillian(model) + probe_noise(model))


def sector_liouvillian(model: QubitThermalModel, j: int, k: int) -> Superoperator:
    """Generator of the probe factor multiplying the ancilla operator |j><k|

    L^(jk) rho = L_S rho + L_noise rho - i (a_j S rho - a_k rho S), with a_j the
    eigenvalues of A = sigma_z (a_0 = +1, a_1 = -1) and rates in units of g.
    """
    if j not in (0, 1) or k not in (0, 1):
        raise InvalidParameterError(f"Sector indices must be 0 or 1, got ({j}, {k})")
    probe_coupling, ancilla_coupling = coupling_operators()
    a = np.real(np.diag(ancilla_coupling.entries))
    coupling = a[j] * left_mult(probe_coupling) - a[k] * right_mult(probe_coupling)
    return _probe_generator(model) - 1j * coupling


def _sector_trace(model: QubitThermalModel, j: int, k: int, rho: Operator) -> complex:
    return expm(sector_liouvillian(model, j, k), 1.0, method="pade").apply(rho).trace()


def gamma_numeric(model: QubitThermalModel, probe_initial: Optional[Operator] = None) -> GammaValue:
    """Gamma = tr[exp(L^(01)) rho] from the 4x4 sector superoperator"""
    if model.ideal_thermalization:
        raise InvalidParameterError("gamma_numeric needs a finite xi")

    def gamma_at(theta: float) -> complex:
        shifted = model.with_(theta=theta)
        rho = probe_initial if probe_initial is not None else gibbs_state(theta)
        return _sector_trace(shifted, 0, 1, rho)

    value = gamma_at(model.theta)
    derivative = richardson_derivative(gamma_at, model.theta, DERIVATIVE_REL_STEP)
    return GammaValue(value=complex(value), dvalue_dtheta=complex(derivative))


def _ancilla_coherence_factor(config: SchemeConfig, gamma: GammaValue) -> complex:
    return gamma.value ** config.n_probes * math.exp(-2.0 * config.model.eta)


def output_state(config: SchemeConfig, gamma: Optional[GammaValue] = None) -> Operator:
    """Ancilla state after N probes: coherence sigma01 Gamma^N exp(-2 eta), populations unchanged"""
    gamma = gamma or gamma_analytic(config.model, config.probe_initial)
    sigma = config.ancilla_initial.entries
    coherence = sigma[0, 1] * _ancilla_coherence_factor(config, gamma)
    return Operator(np.array([[sigma[0, 0], coherence], [np.conj(coherence), sigma[1, 1]]]))


def output_state_derivative(config: SchemeConfig, gamma: Optional[GammaValue] = None) -> Operator:
    """theta-derivative of output_state"""
    gamma = gamma or gamma_analytic(config.model, config.probe_initial)
    n = config.n_probes
    sigma = config.ancilla_initial.entries
    dcoherence = sigma[0, 1] * n * gamma.value ** (n - 1) * gamma.dvalue_dtheta * math.exp(-2.0 * config.model.eta)
    return Operator(np.array([[0.0, dcoherence], [np.conj(dcoherence), 0.0]]))


def single_probe_ancilla_map(model: QubitThermalModel, probe_initial: Optional[Operator] = None) -> Superoperator:
    """Ancilla channel of one probe interaction: |j><k| -> tr[exp(L^(jk)) rho] |j><k|"""
    if model.ideal_thermalization:
        phase = cmath.exp(-2j * thermal_phase(model.theta))
        factors = {(0, 0): 1.0, (1, 1): 1.0, (0, 1): phase, (1, 0): phase.conjugate()}
    else:
        rho = probe_initial if probe_initial is not None else gibbs_state(model.theta)
        factors = {(j, k): _sector_trace(model, j, k, rho) for j in (0, 1) for k in (0, 1)}
    # Column-stacked index of |j><k| is j + 2k
    diagonal = [factors[(0, 0)], factors[(1, 0)], factors[(0, 1)], factors[(1, 1)]]
    return Superoperator(np.diag(diagonal))


def composed_output_state(config: SchemeConfig) -> Operator:
    """Output state as N composed single-probe maps followed by ancilla dephasing"""
    single = single_probe_ancilla_map(config.model, config.probe_initial)
    probes = Superoperator(np.linalg.matrix_power(single.matrix, config.n_probes))
    dephasing = expm(build_liouvillian(ancilla_noise(config.model)), 1.0, method="pade")
    return (dephasing @ probes).apply(config.ancilla_initial)


def qfi_ideal(n: int, a_gap: float, dphi: float) -> float:
    """Heisenberg-scaling QFI N^2 (a_M - a_m)^2 |dphi|^2"""
    if n < 1:
        raise InvalidParameterError(f"N must be at least 1, got {n}")
    if not a_gap > 0:
        raise InvalidParameterError(f"a_gap must be positive, got {a_gap}")
    return float(n) ** 2 * a_gap ** 2 * abs(dphi) ** 2


def cramer_rao(qfi: float, nu: float) -> float:
    """Precision bound 1/sqrt(nu F) for nu repetitions"""
    if not nu >= 1:
        raise InvalidParameterError(f"nu must be at least 1, got {nu}")
    if qfi < 0:
        raise InvalidParameterError(f"QFI must be nonnegative, got {qfi}")
    if qfi == 0:
        return math.inf
    return 1.0 / math.sqrt(nu * qfi)


def closed_form_qfi(
    gamma: GammaValue, n_values: np.ndarray, eta: float, sigma: Operator
) -> np.ndarray:
    n = np.asarray(n_values, dtype=float)
    entries = sigma.entries
    sigma00 = float(entries[0, 0].real)
    sigma11 = float(entries[1, 1].real)
    coherence2 = abs(entries[0, 1]) ** 2
    modulus = gamma.modulus
    damping = math.exp(-4.0 * eta)

    first = 4.0 * n ** 2 * coherence2 * modulus ** (2 * n - 2) * abs(gamma.dvalue_dtheta) ** 2 * damping
    purity_gap = sigma00 * sigma11 - coherence2 * modulus ** (2 * n) * damping
    numerator = (
        4.0 * n ** 2 * coherence2 ** 2 * modulus ** (4 * n - 2)
        * gamma.dmodulus_dtheta ** 2 * damping ** 2
    )
    # The pure-state limit of the second term is zero
    degenerate = purity_gap <= EIGEN_CUTOFF
    second = np.where(degenerate, 0.0, numerator / np.where(degenerate, 1.0, purity_gap))
    return first + second


def qfi_example_noise_curve(
    model: QubitThermalModel,
    n_values: Sequence[int],
    ancilla_initial: Optional[Operator] = None,
    probe_initial: Optional[Operator] = None,
) -> np.ndarray:
    """Closed-form QFI for every N in n_values, Gamma evaluated once"""
    sigma = ancilla_initial if ancilla_initial is not None else ancilla_plus_state()
    gamma = gamma_analytic(model, probe_initial)
    return closed_form_qfi(gamma, np.asarray(n_values), model.eta, sigma)


def qfi_example_noise(config: SchemeConfig) -> float:
    """Closed-form QFI of the output state for a general ancilla state sigma"""
    curve = qfi_example_noise_curve(
        config.model, [config.n_probes], config.ancilla_initial, config.probe_initial
    )
    return float(curve[0])


def _require_hermitian(operator: Operator, name: str):
    error = float(np.max(np.abs(operator.entries - operator.entries.conj().T)))
    if error > HERMITICITY_TOL:
        raise NonHermitianError(f"{name} is not Hermitian (error {error:.3g})")


def qfi_generic(rho: Operator, drho: Operator) -> float:
    """QFI 2 sum |<k|drho|l>|^2 / (p_k + p_l) over eigenpairs with p_k + p_l > 1e-12"""
    _require_hermitian(rho, "rho")
    _require_hermitian(drho, "drho")
    if rho.dim != drho.dim:
        raise InvalidParameterError("rho and drho must share a dimension")
    if abs(drho.trace()) > HERMITICITY_TOL:
        raise InvalidParameterError(f"drho must be traceless, trace is {drho.trace():.3g}")
    probabilities, vectors = np.linalg.eigh(0.5 * (rho.entries + rho.entries.conj().T))
    rotated = vectors.conj().T @ drho.entries @ vectors
    sums = probabilities[:, None] + probabilities[None, :]
    keep = sums > EIGEN_CUTOFF
    weights = np.where(keep, np.abs(rotated) ** 2 / np.where(keep, sums, 1.0), 0.0)
    return float(2.0 * np.sum(weights))


def _cluster_values(values: Iterable[float], tol: float) -> List[float]:
    representatives: List[float] = []
    for value in sorted(values):
        if not representatives or value - representatives[-1] > tol:
            representatives.append(value)
    return representatives


def effective_noise_spec(ancilla_observable: Operator, noise: LindbladSpec) -> LindbladSpec:
    """Rotating-wave noise generator in the eigenbasis of A

    Every jump K_l is split into K_{l,Delta} = sum P_mu K_l P_nu over eigenvalue
    pairs with a_mu - a_nu = Delta (clustered within 1e-9); the Hamiltonian
    keeps its Delta = 0 block.
    """
    _require_hermitian(ancilla_observable, "A")
    if noise.dim != ancilla_observable.dim:
        raise InvalidParameterError("Noise spec and A act on different spaces")
    eigenvalues, vectors = np.linalg.eigh(0.5 * (ancilla_observable.entries + ancilla_observable.entries.conj().T))
    differences = eigenvalues[:, None] - eigenvalues[None, :]
    representatives = _cluster_values(differences.ravel(), DIFFERENCE_CLUSTER_TOL)

    def block(matrix: np.ndarray, delta: float) -> np.ndarray:
        in_basis = vectors.conj().T @ matrix @ vectors
        mask = np.abs(differences - delta) <= DIFFERENCE_CLUSTER_TOL
        return vectors @ np.where(mask, in_basis, 0.0) @ vectors.conj().T

    jumps = []
    for rate, jump in noise.jumps:
        for delta in representatives:
            component = block(jump.entries, delta)
            if np.any(np.abs(component) > 0):
                jumps.append((rate, Operator(component)))
    hamiltonian = Operator(block(noise.hamiltonian.entries, 0.0))
    logger.debug(f"Effective noise: {len(representatives)} eigenvalue differences, {len(jumps)} jump sectors")
    return LindbladSpec(hamiltonian=hamiltonian, jumps=tuple(jumps))


def noise_dressed_state(ancilla_observable: Operator, noise: LindbladSpec, sigma: Operator) -> NoiseDressedState:
    """delta = exp(effective noise * 1) sigma"""
    generator = build_liouvillian(effective_noise_spec(ancilla_observable, noise))
    delta = expm(generator, 1.0, method="pade").apply(sigma).entries
    delta = 0.5 * (delta + delta.conj().T)
    eigvals, eigvecs = np.linalg.eigh(delta)
    return NoiseDressedState(delta=Operator(delta), eigvals=eigvals, eigvecs=eigvecs)


def general_noise_qfi(
    ancilla_observable: Operator,
    noise: LindbladSpec,
    ancilla_initial: Operator,
    n: int,
    dphi: float,
) -> float:
    """2 N^2 |dphi|^2 sum_{k != l} p_kl |<phi_k|A|phi_l>|^2, p_kl = (p_k - p_l)^2 / (p_k + p_l)"""
    if n < 1:
        raise InvalidParameterError(f"N must be at least 1, got {n}")
    dressed = noise_dressed_state(ancilla_observable, noise, ancilla_initial)
    p = dressed.eigvals
    sums = p[:, None] + p[None, :]
    keep = sums > EIGEN_CUTOFF
    coefficients = np.where(keep, (p[:, None] - p[None, :]) ** 2 / np.where(keep, sums, 1.0), 0.0)
    elements = dressed.eigvecs.conj().T @ ancilla_observable.entries @ dressed.eigvecs
    np.fill_diagonal(coefficients, 0.0)
    return float(2.0 * n ** 2 * abs(dphi) ** 2 * np.sum(coefficients * np.abs(elements) ** 2))


def qfi_ratio(config: SchemeConfig) -> float:
    """Noisy over ideal QFI at the same N"""
    dphi = thermal_quantities(config.model.theta).dphi_dtheta
    return qfi_example_noise(config) / qfi_ideal(config.n_probes, SIGMA_Z_GAP, dphi)


def precision(config: SchemeConfig, nu: float = 1.0) -> float:
    """Cramer-Rao temperature precision of the noisy scheme after nu repetitions"""
    return cramer_rao(qfi_example_noise(config), nu)


def effective_ancilla_check(
    model: QubitThermalModel,
    xi_values: Sequence[float] = (1e2, 1e3, 1e4),
    ancilla_initial: Optional[Operator] = None,
) -> pd.DataFrame:
    """Distance between the single-probe joint evolution and exp(-i phi_T A)

    Ancilla noise is switched off so only the memory effect remains. Columns:
    xi, g_over_lambda (1 / dissipative gap, g = 1), deviation (trace distance).
    """
    from .oracle import build_joint, evolve_and_reduce

    sigma = ancilla_initial if ancilla_initial is not None else ancilla_plus_state()
    _, ancilla_coupling = coupling_operators()
    rows = []
    for xi in xi_values:
        case = model.with_(xi=float(xi), eta=0.0)
        joint = build_joint(case, 1, gibbs_state(case.theta), sigma)
        reduced = evolve_and_reduce(joint, 1.0)
        phase = expm(ancilla_coupling * (-1j), thermal_phase(case.theta), method="pade")
        target = phase @ sigma @ phase.dag
        gap = damping_basis(build_liouvillian(probe_liouvillian(case))).gap
        rows.append({"xi": float(xi), "g_over_lambda": 1.0 / gap, "deviation": trace_distance(reduced, target)})
    return pd.DataFrame(rows, columns=["xi", "g_over_lambda", "deviation"])
