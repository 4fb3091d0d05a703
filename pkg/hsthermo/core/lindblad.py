"""
Liouvillians in Lindblad form and their spectral data.

Rates and Hamiltonians are expressed in units of the coupling rate g (hbar = 1),
so exp(L * 1) is the map over one probing interval.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import (
    BoundInapplicableError,
    DimensionMismatchError,
    InvalidParameterError,
    SpectrumError,
    SteadyStateUniquenessError,
    ThermometryError,
)
from .linops import (
    devectorize,
    eig,
    embed_operator,
    embed_superoperator,
    expm,
    hs_norm,
    induced_norm,
    kron,
    left_mult,
    partial_trace,
    right_mult,
    sandwich,
    superoperator_from_map,
    vectorize,
)
from .types import Operator, Spectrum, Superoperator

logger = logging.getLogger(__name__)

# |lambda| below this (relative to max(1, ||L||)) counts as a zero eigenvalue
ZERO_EIGENVALUE_TOL = 1e-10
TRACE_PRESERVATION_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-7
DECAY_BOUND_SLACK = 1e-9

Jump = Tuple[float, Operator]


@dataclass(frozen=True)
class LindbladSpec:
    """Hamiltonian plus weighted jump operators of a Lindblad generator

    Args:
        hamiltonian: Hermitian operator, in units of g
        jumps: (rate, K) pairs; rate >= 0 in units of g
    """

    hamiltonian: Operator
    jumps: Tuple[Jump, ...] = field(default_factory=tuple)

    def __post_init__(self):
        jumps = tuple((float(rate), operator) for rate, operator in self.jumps)
        for rate, operator in jumps:
            if not math.isfinite(rate) or rate < 0:
                raise InvalidParameterError(f"Jump rates must be finite and nonnegative, got {rate}")
            if operator.dim != self.hamiltonian.dim:
                raise DimensionMismatchError(
                    f"Jump operator of dim {operator.dim} does not match Hamiltonian dim "
                    f"{self.hamiltonian.dim}"
                )
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @classmethod
    def empty(cls, dim: int) -> "LindbladSpec":
        return cls(hamiltonian=Operator.zeros(dim))

    def __add__(self, other: "LindbladSpec") -> "LindbladSpec":
        if not isinstance(other, LindbladSpec):
            return NotImplemented
        return LindbladSpec(
            hamiltonian=self.hamiltonian + other.hamiltonian,
            jumps=self.jumps + other.jumps,
        )

    def embed(self, dims: Sequence[int], factor: int) -> "LindbladSpec":
        """Same generator acting on one factor of a tensor product"""
        return LindbladSpec(
            hamiltonian=embed_operator(self.hamiltonian, dims, factor),
            jumps=tuple((rate, embed_operator(operator, dims, factor)) for rate, operator in self.jumps),
        )


@dataclass(frozen=True)
class DampingBasis:
    """Damping basis of a Liouvillian with its gap and epsilon constant

    Right eigenvectors are normalized to unit Hilbert-Schmidt norm and left
    eigenvectors are dual to them, so epsilon = sum of ||L_mu|| over the
    decaying modes.
    """

    spectrum: Spectrum
    epsilon: float
    gap: float
    residual: float
    zero_modes: int = 1


def trace_functional(dim: int) -> np.ndarray:
    """Row vector t with t @ vec(X) = tr(X)"""
    return vectorize(Operator.identity(dim)).conj()


def trace_preservation_error(liouvillian: Superoperator) -> float:
    """Largest entry of tr o L, which vanishes for trace-preserving generators"""
    return float(np.max(np.abs(trace_functional(liouvillian.op_dim) @ liouvillian.matrix)))


def _scale(superop: Superoperator) -> float:
    return max(1.0, float(np.max(np.abs(superop.matrix))))


def build_liouvillian(spec: LindbladSpec) -> Superoperator:
    """L = -i[H, .] + sum_l k_l (K . K^dag - 1/2 {K^dag K, .})"""
    hamiltonian = spec.hamiltonian
    liouvillian = -1j * (left_mult(hamiltonian) - right_mult(hamiltonian))
    for rate, jump in spec.jumps:
        if rate == 0:
            continue
        decay = jump.dag @ jump
        dissipator = sandwich(jump, jump.dag) - 0.5 * (left_mult(decay) + right_mult(decay))
        liouvillian = liouvillian + rate * dissipator

    error = trace_preservation_error(liouvillian)
    if error > TRACE_PRESERVATION_TOL * _scale(liouvillian):
        raise ThermometryError(f"Liouvillian is not trace preserving (error {error:.3g})")
    return liouvillian


def _zero_eigenvalue_count(liouvillian: Superoperator) -> int:
    eigenvalues = np.linalg.eigvals(liouvillian.matrix)
    tol = ZERO_EIGENVALUE_TOL * _scale(liouvillian)
    return int(np.sum(np.abs(eigenvalues) < tol))


def steady_state(liouvillian: Superoperator) -> Operator:
    """Unique trace-one Hermitian fixed point of L

    Raises SteadyStateUniquenessError when L has no zero eigenvalue or a
    degenerate one.
    """
    zero_count = _zero_eigenvalue_count(liouvillian)
    if zero_count != 1:
        raise SteadyStateUniquenessError(zero_count)

    _, _, vh = np.linalg.svd(liouvillian.matrix)
    null_vector = vh[-1].conj()
    state = devectorize(null_vector, liouvillian.op_dim).entries
    state = state / np.trace(state)
    state = 0.5 * (state + state.conj().T)
    logger.debug(f"Steady state residual {hs_norm(liouvillian.apply(Operator(state))):.3g}")
    return Operator(state)


def damping_basis(liouvillian: Superoperator) -> DampingBasis:
    """Biorthonormal eigen-operators of L with gap and epsilon

    For a unique steady state R_0 the decaying modes are checked to lie in
    the range of Q = id - R_0 tr(.), and R_0 in its kernel.
    """
    spectrum = eig(liouvillian)
    eigenvalues = spectrum.eigenvalues
    tol = ZERO_EIGENVALUE_TOL * _scale(liouvillian)
    is_zero = np.abs(eigenvalues) < tol
    zero_modes = int(np.sum(is_zero))
    decaying = ~is_zero

    real_parts = np.abs(np.real(eigenvalues[decaying]))
    gap = float(np.min(real_parts)) if real_parts.size else 0.0
    if gap <= tol:
        raise InvalidParameterError("Liouvillian has no dissipative gap")

    right = spectrum.right_vectors
    left = spectrum.left_vectors
    norms = np.linalg.norm(right, axis=0) * np.linalg.norm(left, axis=0)
    epsilon = float(np.sum(norms[decaying]))

    reconstruction = (right * eigenvalues) @ left.conj().T
    residual = float(np.max(np.abs(reconstruction - liouvillian.matrix))) / _scale(liouvillian)
    if residual > RECONSTRUCTION_TOL:
        raise SpectrumError(f"Damping-basis reconstruction residual {residual:.3g}")

    if zero_modes == 1:
        dim = liouvillian.op_dim
        rho = spectrum.right_operator(0)
        rho = rho * (1.0 / rho.trace())
        q_matrix = np.eye(dim * dim) - np.outer(vectorize(rho), trace_functional(dim))
        q_error = max(
            float(np.max(np.abs(q_matrix @ right[:, 0]))),
            float(np.max(np.abs(q_matrix @ right[:, 1:] - right[:, 1:]), initial=0.0)),
        )
        if q_error > RECONSTRUCTION_TOL:
            raise SpectrumError(f"Decaying modes are not traceless (error {q_error:.3g})")

    logger.debug(
        f"Damping basis: gap={gap:.6g}, epsilon={epsilon:.6g}, residual={residual:.3g}, "
        f"zero modes={zero_modes}"
    )
    return DampingBasis(
        spectrum=spectrum, epsilon=epsilon, gap=gap, residual=residual, zero_modes=zero_modes
    )


def projection_superoperators(
    rho_t: Operator, ancilla_dim: int
) -> Tuple[Superoperator, Superoperator]:
    """P X = rho_T kron tr_S X and Q = id - P on the probe-ancilla space"""
    probe_dim = rho_t.dim
    dims = [probe_dim, ancilla_dim]

    def project(operator: Operator) -> Operator:
        return kron(rho_t, partial_trace(operator, dims, keep=1))

    projector = superoperator_from_map(project, probe_dim * ancilla_dim)
    complement = Superoperator.identity(probe_dim * ancilla_dim) - projector
    return projector, complement


def _joint_dims(probe_liouvillian: Superoperator, coupling: Superoperator) -> Tuple[int, int]:
    probe_dim = probe_liouvillian.op_dim
    joint_dim = coupling.op_dim
    if joint_dim % probe_dim != 0:
        raise DimensionMismatchError(
            f"Coupling superoperator on dim {joint_dim} is not a probe (dim {probe_dim}) "
            "times ancilla space"
        )
    return probe_dim, joint_dim // probe_dim


def memory_bound(
    probe_liouvillian: Superoperator,
    coupling: Superoperator,
    g: float,
    eps: float,
    gap: float,
) -> float:
    """Upper bound eps g ||P||^2 ||K||^2 / (gap/g - eps ||K||) on the memory term

    Args:
        probe_liouvillian: L_S on the probe space, rates in units of g
        coupling: K on the probe-ancilla space
        g: coupling strength
        eps: damping-basis constant of L_S
        gap: dissipative gap of L_S

    Raises:
        BoundInapplicableError: unless gap/g > eps ||K||
    """
    if g < 0:
        raise InvalidParameterError(f"Coupling g must be nonnegative, got {g}")
    if g == 0:
        return 0.0
    _, ancilla_dim = _joint_dims(probe_liouvillian, coupling)
    k_norm = induced_norm(coupling)
    gap_over_g = gap / g
    if not gap_over_g > eps * k_norm:
        raise BoundInapplicableError(gap_over_g, eps * k_norm)

    projector, _ = projection_superoperators(steady_state(probe_liouvillian), ancilla_dim)
    p_norm = induced_norm(projector)
    bound = eps * g * p_norm ** 2 * k_norm ** 2 / (gap_over_g - eps * k_norm)
    logger.debug(f"Memory bound: ||P||={p_norm:.6g}, ||K||={k_norm:.6g}, bound={bound:.6g}")
    return bound


def decay_bound_check(
    probe_liouvillian: Superoperator,
    coupling: Superoperator,
    g: float,
    t_grid: Iterable[float],
) -> pd.DataFrame:
    """Compare ||exp(QL t) Q|| with eps exp((eps g ||K|| - gap) t)

    L = L_S (lifted to the probe-ancilla space) + g K. Returns one row per
    time with columns t, lhs, rhs, passed (lhs <= rhs + 1e-9).
    """
    probe_dim, ancilla_dim = _joint_dims(probe_liouvillian, coupling)
    basis = damping_basis(probe_liouvillian)
    k_norm = induced_norm(coupling)
    lifted = embed_superoperator(probe_liouvillian, [probe_dim, ancilla_dim], 0)
    joint = lifted + g * coupling
    _, complement = projection_superoperators(steady_state(probe_liouvillian), ancilla_dim)
    generator = complement @ joint

    rows = []
    for t in t_grid:
        t = float(t)
        if t < 0:
            raise InvalidParameterError(f"Time separations must be nonnegative, got {t}")
        propagated = expm(generator, t, method="pade") @ complement
        lhs = induced_norm(propagated)
        rhs = basis.epsilon * math.exp((basis.epsilon * g * k_norm - basis.gap) * t)
        rows.append({"t": t, "lhs": lhs, "rhs": rhs, "passed": bool(lhs <= rhs + DECAY_BOUND_SLACK)})
    return pd.DataFrame(rows, columns=["t", "lhs", "rhs", "passed"])
