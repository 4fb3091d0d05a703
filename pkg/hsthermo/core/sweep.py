"""
Command engine: QFI sweeps, N_max extraction and verification reports.

Everything here is a pure function of its arguments; the CLI only parses
arguments, calls into this module and hands results to the exporter.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..__version__ import __version__
from .errors import InvalidParameterError, NoHeisenbergWindowError
from .lindblad import (
    build_liouvillian,
    damping_basis,
    decay_bound_check,
    memory_bound,
    projection_superoperators,
    steady_state,
)
from .linops import commutator_super, induced_norm, kron, trace_distance
from .models import (
    QubitThermalModel,
    SIGMA_Z,
    ancilla_noise,
    ancilla_plus_state,
    ancilla_state,
    coupling_operators,
    probe_liouvillian,
    probe_state,
    thermal_quantities,
)
from .oracle import build_joint, evolve_and_reduce, max_term_commutator
from .scheme import (
    SIGMA_Z_GAP,
    SchemeConfig,
    closed_form_qfi,
    composed_output_state,
    gamma_analytic,
    general_noise_qfi,
    output_state,
    qfi_example_noise,
    qfi_ideal,
)
from .types import (
    CheckReport,
    CheckRow,
    NmaxRule,
    Superoperator,
    SweepMode,
    SweepResult,
    SweepRow,
    SweepSpec,
)

logger = logging.getLogger(__name__)

# Calibrated on xi = 400, theta = 2, eta = 0.1: the threshold is crossed where
# the noisy QFI N^2 |Gamma|^(2N) peaks, at ratio exp(-2)
DEFAULT_NMAX_TAU = 1.0 - math.exp(-2.0)
NMAX_SEARCH_LIMIT = 10 ** 7
NMAX_CHUNK = 4096

ORACLE_TOL = 1e-7
DIAGONAL_TOL = 1e-10
COMMUTATOR_TOL = 1e-10
PROJECTOR_TOL = 1e-10
RECONSTRUCTION_LIMIT = 1e-7

UNITS_NOTE = (
    "hbar = k_B = 1; energies in units of hbar*Omega; rates in units of g; "
    "probing time 1/g; QFI in units of F_th(theta)"
)


def run_metadata(**extra) -> Dict[str, object]:
    metadata = {
        "package": "hsthermo",
        "version": __version__,
        "units": UNITS_NOTE,
        "vectorization": "column-stacking",
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    metadata.update(extra)
    return metadata


def evaluate_point(
    mode: SweepMode,
    n: int,
    xi: float,
    eta: float,
    theta: float,
    kappa_s_over_g: float = 0.0,
    rho00: Optional[float] = None,
    sigma01: Optional[float] = None,
) -> SweepRow:
    """QFI of one grid point, normalized by F_th(theta)"""
    model = QubitThermalModel(theta=theta, xi=xi, eta=eta, kappa_s_over_g=kappa_s_over_g)
    thermal = thermal_quantities(theta)
    ideal = qfi_ideal(n, SIGMA_Z_GAP, thermal.dphi_dtheta)

    if mode is SweepMode.IDEAL:
        qfi = ideal
    elif mode is SweepMode.EXAMPLE_NOISE:
        qfi = qfi_example_noise(SchemeConfig(model=model, n_probes=n))
    elif mode is SweepMode.GENERAL_NOISE:
        qfi = general_noise_qfi(SIGMA_Z, ancilla_noise(model), ancilla_plus_state(), n, thermal.dphi_dtheta)
    elif mode is SweepMode.INITIAL_STATE:
        config = SchemeConfig(
            model=model,
            n_probes=n,
            ancilla_initial=ancilla_state(0.5, sigma01),
            probe_initial=probe_state(rho00),
        )
        qfi = qfi_example_noise(config)
    else:
        raise InvalidParameterError(f"Unsupported sweep mode {mode}")

    return SweepRow(
        N=n,
        xi=xi,
        eta=eta,
        theta=theta,
        qfi_over_fth=qfi / thermal.f_th,
        qfi_ideal_over_fth=ideal / thermal.f_th,
        ratio=qfi / ideal,
        rho00=rho00 if mode is SweepMode.INITIAL_STATE else None,
        sigma01=sigma01 if mode is SweepMode.INITIAL_STATE else None,
    )


def _grid(spec: SweepSpec) -> List[Tuple]:
    if spec.mode is SweepMode.INITIAL_STATE:
        states = list(product(spec.rho00_values, spec.sigma01_values))
    else:
        states = [(None, None)]
    return [
        (n, xi, eta, theta, rho00, sigma01)
        for theta, eta, xi, (rho00, sigma01), n in product(
            spec.theta_values, spec.eta_values, spec.xi_values, states, spec.n_values
        )
    ]


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Evaluate every grid point; rows follow grid order (N varies fastest)"""
    grid = _grid(spec)
    logger.info(f"Sweep {spec.mode.value}: {len(grid)} grid points on {threads} thread(s)")

    def evaluate(point: Tuple) -> SweepRow:
        n, xi, eta, theta, rho00, sigma01 = point
        return evaluate_point(spec.mode, n, xi, eta, theta, spec.kappa_s_over_g, rho00, sigma01)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            rows = list(executor.map(evaluate, grid))
    else:
        rows = [evaluate(point) for point in grid]

    return SweepResult(rows=rows, metadata=run_metadata(mode=spec.mode.value), columns=spec.columns)


def noise_to_ideal_ratios(model: QubitThermalModel, n_values: Sequence[int]) -> np.ndarray:
    """Noisy QFI over its instant-thermalization value 4 N^2 |dphi|^2 exp(-4 eta)"""
    n = np.asarray(n_values, dtype=float)
    gamma = gamma_analytic(model)
    noisy = closed_form_qfi(gamma, n, model.eta, ancilla_plus_state())
    dphi = thermal_quantities(model.theta).dphi_dtheta
    reference = SIGMA_Z_GAP ** 2 * n ** 2 * dphi ** 2 * math.exp(-4.0 * model.eta)
    return noisy / reference


def find_nmax(
    xi: float,
    eta: float,
    theta: float,
    tau: Optional[float] = None,
    rule: NmaxRule = NmaxRule.THRESHOLD,
    kappa_s_over_g: float = 0.0,
) -> int:
    """Largest probe number that keeps Heisenberg scaling

    threshold: largest N before the first N whose noisy QFI drops below
        (1 - tau) times the instant-thermalization QFI with the same eta;
        every N up to the first failure is checked.
    peak: largest N before the noisy QFI first decreases.

    Raises:
        NoHeisenbergWindowError: the threshold already fails at N = 1
    """
    model = QubitThermalModel(theta=theta, xi=xi, eta=eta, kappa_s_over_g=kappa_s_over_g)
    if model.ideal_thermalization:
        raise InvalidParameterError("N_max is unbounded in the instant-thermalization limit")
    tau = DEFAULT_NMAX_TAU if tau is None else tau
    if rule is NmaxRule.THRESHOLD and not 0 < tau < 1:
        raise InvalidParameterError(f"tau must lie in (0, 1), got {tau}")

    gamma = gamma_analytic(model)
    dphi = thermal_quantities(theta).dphi_dtheta
    sigma = ancilla_plus_state()

    start = 1
    previous_qfi = -math.inf
    while start <= NMAX_SEARCH_LIMIT:
        n = np.arange(start, start + NMAX_CHUNK, dtype=float)
        qfi = closed_form_qfi(gamma, n, eta, sigma)
        if rule is NmaxRule.THRESHOLD:
            reference = SIGMA_Z_GAP ** 2 * n ** 2 * dphi ** 2 * math.exp(-4.0 * eta)
            failing = np.nonzero(qfi / reference < 1.0 - tau)[0]
            if start == 1 and failing.size and failing[0] == 0:
                raise NoHeisenbergWindowError(xi, eta, theta, float(qfi[0] / reference[0]), tau)
        else:
            steps = np.diff(np.concatenate(([previous_qfi], qfi)))
            failing = np.nonzero(steps < 0)[0]
            previous_qfi = float(qfi[-1])
        if failing.size:
            nmax = start + int(failing[0]) - 1
            logger.debug(f"N_max({rule.value}) = {nmax} at xi={xi:g}, eta={eta:g}, theta={theta:g}")
            return nmax
        start += NMAX_CHUNK
    raise InvalidParameterError(f"No N_max found below {NMAX_SEARCH_LIMIT}")


def _check(name: str, lhs: float, rhs: float, detail: str = "", strict: bool = False) -> CheckRow:
    passed = lhs < rhs if strict else lhs <= rhs
    return CheckRow(name=name, lhs=float(lhs), rhs=float(rhs), passed=bool(passed), detail=detail)


def coupling_superoperator() -> Superoperator:
    """K = -i [S kron A, .] on the probe-ancilla space"""
    probe_coupling, ancilla_coupling = coupling_operators()
    return -1j * commutator_super(kron(probe_coupling, ancilla_coupling))


def bounds_report(model: QubitThermalModel, t_values: Optional[Sequence[float]] = None, g: float = 1.0) -> CheckReport:
    """Damping-basis, projector, memory and decay bound checks for one probe"""
    probe = build_liouvillian(probe_liouvillian(model))
    coupling = coupling_superoperator()
    basis = damping_basis(probe)
    k_norm = induced_norm(coupling)
    rows = [
        _check("damping basis reconstruction", basis.residual, RECONSTRUCTION_LIMIT),
        _check("epsilon >= 1", 1.0, basis.epsilon),
    ]

    projector, complement = projection_superoperators(steady_state(probe), coupling.op_dim // probe.op_dim)
    rows.append(_check("P^2 = P", float(np.max(np.abs((projector @ projector - projector).matrix))), PROJECTOR_TOL))
    rows.append(_check("Q^2 = Q", float(np.max(np.abs((complement @ complement - complement).matrix))), PROJECTOR_TOL))
    rows.append(_check("PQ = 0", float(np.max(np.abs((projector @ complement).matrix))), PROJECTOR_TOL))

    applicable = basis.gap / g > basis.epsilon * k_norm
    detail = ""
    if applicable:
        detail = f"memory bound = {memory_bound(probe, coupling, g, basis.epsilon, basis.gap):.6g}"
    rows.append(_check("eps ||K|| < gap / g", basis.epsilon * k_norm, basis.gap / g, detail, strict=True))

    if t_values is None:
        t_values = np.linspace(0.0, 5.0 / basis.gap, 11)
    table = decay_bound_check(probe, coupling, g, t_values)
    for record in table.itertuples(index=False):
        rows.append(
            CheckRow(
                name=f"decay bound t={record.t:.6g}",
                lhs=float(record.lhs),
                rhs=float(record.rhs),
                passed=bool(record.passed),
            )
        )
    logger.info(f"Bounds at xi={model.xi:g}: gap={basis.gap:.6g}, epsilon={basis.epsilon:.6g}")
    return CheckReport(
        title=f"Bound checks (xi={model.xi:g}, theta={model.theta:g})",
        rows=rows,
        metadata=run_metadata(
            model=model.to_dict(), gap=basis.gap, epsilon=basis.epsilon, coupling_norm=k_norm
        ),
    )


def oracle_report(model: QubitThermalModel, n_probes: int) -> CheckReport:
    """Joint simulation against the closed-form and composed-map output states"""
    system = build_joint(model, n_probes)
    simulated = evolve_and_reduce(system, 1.0)
    config = SchemeConfig(model=model, n_probes=n_probes)
    closed = output_state(config)
    composed = composed_output_state(config)
    sigma = config.ancilla_initial.entries
    diagonal_error = max(
        abs(simulated.entries[0, 0] - sigma[0, 0]), abs(simulated.entries[1, 1] - sigma[1, 1])
    )
    rows = [
        _check("oracle vs closed form (trace distance)", trace_distance(simulated, closed), ORACLE_TOL),
        _check("oracle vs composed maps (trace distance)", trace_distance(simulated, composed), ORACLE_TOL),
        _check("ancilla populations preserved", diagonal_error, DIAGONAL_TOL),
        _check("generator terms commute", max_term_commutator(system), COMMUTATOR_TOL),
    ]
    return CheckReport(
        title=f"Oracle check (N={n_probes}, xi={model.xi:g}, theta={model.theta:g}, eta={model.eta:g})",
        rows=rows,
        metadata=run_metadata(model=model.to_dict(), n_probes=n_probes),
    )
