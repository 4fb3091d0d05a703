"""
Brute-force joint simulation of N probes plus the ancilla.

Tensor order is probe 1, ..., probe N, ancilla. The full generator is
exponentiated densely (Pade scaling and squaring), so N is capped at 3
(256 x 256 superoperators).
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np

from .errors import CapacityError, InvalidParameterError
from .lindblad import LindbladSpec, build_liouvillian, trace_preservation_error
from .linops import check_density_matrix, embed_operator, expm, kron, partial_trace
from .models import (
    QubitThermalModel,
    ancilla_noise,
    ancilla_plus_state,
    coupling_operators,
    gibbs_state,
    probe_liouvillian,
    probe_noise,
)
from .types import Operator, Superoperator

logger = logging.getLogger(__name__)

MAX_PROBES = 3
ORACLE_STATE_TOL = 1e-10
ORACLE_EIG_TOL = 1e-9


@dataclass(frozen=True)
class JointSystem:
    """Joint generator, split into commuting terms, and the product initial state

    terms holds one superoperator per probe (thermalization, probe noise and
    coupling) followed by the ancilla noise term; liouvillian is their sum.
    """

    n_probes: int
    liouvillian: Superoperator
    initial: Operator
    ancilla_initial: Operator
    terms: Tuple[Superoperator, ...]
    dims: Tuple[int, ...]


def build_joint(
    model: QubitThermalModel,
    n_probes: int,
    probe_initial: Optional[Operator] = None,
    ancilla_initial: Optional[Operator] = None,
    coupled: bool = True,
) -> JointSystem:
    """Assemble the joint Liouvillian and the state rho^{kron N} kron sigma

    Raises:
        CapacityError: n_probes above 3
    """
    if n_probes > MAX_PROBES:
        raise CapacityError(n_probes, MAX_PROBES)
    if n_probes < 1:
        raise InvalidParameterError(f"n_probes must be at least 1, got {n_probes}")
    rho = probe_initial if probe_initial is not None else gibbs_state(model.theta)
    sigma = ancilla_initial if ancilla_initial is not None else ancilla_plus_state()

    dims = tuple([2] * n_probes + [2])
    ancilla_factor = n_probes
    probe_coupling, ancilla_coupling = coupling_operators()
    single_probe = probe_liouvillian(model) + probe_noise(model)

    terms: List[Superoperator] = []
    for factor in range(n_probes):
        spec = single_probe.embed(dims, factor)
        if coupled:
            interaction = embed_operator(probe_coupling, dims, factor) @ embed_operator(
                ancilla_coupling, dims, ancilla_factor
            )
            spec = spec + LindbladSpec(hamiltonian=interaction)
        terms.append(build_liouvillian(spec))
    terms.append(build_liouvillian(ancilla_noise(model).embed(dims, ancilla_factor)))

    liouvillian = terms[0]
    for term in terms[1:]:
        liouvillian = liouvillian + term
    logger.debug(
        f"Joint system N={n_probes}: superoperator side {liouvillian.matrix.shape[0]}, "
        f"trace error {trace_preservation_error(liouvillian):.3g}"
    )
    initial = kron(*([rho] * n_probes + [sigma]))
    return JointSystem(
        n_probes=n_probes,
        liouvillian=liouvillian,
        initial=initial,
        ancilla_initial=sigma,
        terms=tuple(terms),
        dims=dims,
    )


def relative_commutator_norm(first: Superoperator, second: Superoperator) -> float:
    """max |[S1, S2]| relative to max(1, max|S1| max|S2|)"""
    commutator = first.matrix @ second.matrix - second.matrix @ first.matrix
    scale = max(1.0, float(np.max(np.abs(first.matrix))) * float(np.max(np.abs(second.matrix))))
    return float(np.max(np.abs(commutator))) / scale


def max_term_commutator(system: JointSystem) -> float:
    """Largest relative commutator between any two terms of the joint generator"""
    return max(
        (relative_commutator_norm(first, second) for first, second in combinations(system.terms, 2)),
        default=0.0,
    )


def evolve_and_reduce(system: JointSystem, t: float) -> Operator:
    """Ancilla state tr_S[exp(L t) initial]"""
    if t < 0:
        raise InvalidParameterError(f"Evolution time must be nonnegative, got {t}")
    if t == 0:
        return system.ancilla_initial
    propagator = expm(system.liouvillian, t, method="pade")
    joint_state = propagator.apply(system.initial)
    reduced = partial_trace(joint_state, system.dims, keep=system.n_probes)
    check_density_matrix(
        reduced,
        trace_tol=ORACLE_STATE_TOL,
        herm_tol=ORACLE_STATE_TOL,
        eig_tol=ORACLE_EIG_TOL,
        name="oracle ancilla state",
    )
    return Operator(0.5 * (reduced.entries + reduced.entries.conj().T))
