"""
Dense linear algebra on operators and superoperators.

Conventions:
    - Column stacking: vec(X)[i + d*j] = X[i, j], so vec(A X B) = (B^T kron A) vec(X).
    - Tensor factors are indexed from 0, leftmost factor first.
    - Norms are Hilbert-Schmidt on operators; the induced superoperator norm is
      the largest singular value of the matrix, exact because column stacking
      maps the Hilbert-Schmidt inner product to the Euclidean one.
"""

import logging
from functools import reduce
from typing import Callable, List, Sequence, Union

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidStateError,
    NonFiniteError,
    SpectrumError,
)
from .types import VECTORIZATION_ORDER, Operator, Spectrum, Superoperator

logger = logging.getLogger(__name__)

# Eigenvalues closer than this are treated as one degenerate cluster
DEGENERACY_TOL = 1e-9
# Relative eigen-residual and biorthonormality tolerance
EIGEN_RESIDUAL_TOL = 1e-8
# Eigenvector condition number below which expm may use the eigendecomposition
EIG_FAST_PATH_COND = 1e8

ExpmTarget = Union[Operator, Superoperator]


def vectorize(operator: Operator) -> np.ndarray:
    """Column-stack an operator into a vector of length dim**2"""
    return operator.entries.reshape(-1, order=VECTORIZATION_ORDER).copy()


def devectorize(vector: np.ndarray, dim: int) -> Operator:
    """Inverse of vectorize"""
    vector = np.asarray(vector)
    if vector.ndim != 1 or vector.shape[0] != dim * dim:
        raise DimensionMismatchError(
            f"Vector of shape {vector.shape} cannot be reshaped to a {dim}x{dim} operator"
        )
    return Operator(vector.reshape((dim, dim), order=VECTORIZATION_ORDER))


def _check_pair(first: Operator, second: Operator):
    if first.dim != second.dim:
        raise DimensionMismatchError(
            f"Operators must share a dimension, got {first.dim} and {second.dim}"
        )


def left_mult(operator: Operator) -> Superoperator:
    """Superoperator of rho -> X rho"""
    return Superoperator(np.kron(np.eye(operator.dim), operator.entries))


def right_mult(operator: Operator) -> Superoperator:
    """Superoperator of rho -> rho X"""
    return Superoperator(np.kron(operator.entries.T, np.eye(operator.dim)))


def sandwich(left: Operator, right: Operator) -> Superoperator:
    """Superoperator of rho -> X rho Y"""
    _check_pair(left, right)
    return Superoperator(np.kron(right.entries.T, left.entries))


def commutator_super(operator: Operator) -> Superoperator:
    """Superoperator of rho -> [X, rho]"""
    return left_mult(operator) - right_mult(operator)


def anticommutator_super(operator: Operator) -> Superoperator:
    """Superoperator of rho -> {X, rho}"""
    return left_mult(operator) + right_mult(operator)


def kron(*operators: Operator) -> Operator:
    """Kronecker product, leftmost factor first"""
    if not operators:
        raise DimensionMismatchError("kron needs at least one operator")
    return Operator(reduce(np.kron, (operator.entries for operator in operators)))


def _normalize_keep(keep: Union[int, Sequence[int]], n_factors: int) -> List[int]:
    indices = [keep] if isinstance(keep, (int, np.integer)) else list(keep)
    if not indices:
        raise DimensionMismatchError("partial_trace must keep at least one factor")
    for index in indices:
        if not 0 <= index < n_factors:
            raise DimensionMismatchError(
                f"Factor index {index} out of range for {n_factors} factors"
            )
    if len(set(indices)) != len(indices):
        raise DimensionMismatchError(f"Duplicate factor indices in {indices}")
    return sorted(int(index) for index in indices)


def partial_trace(operator: Operator, dims: Sequence[int], keep: Union[int, Sequence[int]]) -> Operator:
    """Trace out every tensor factor except those listed in keep (0-based)

    Args:
        operator: operator on the joint space
        dims: dimension of each tensor factor, leftmost first
        keep: index or indices of the factors that survive

    Returns:
        Reduced operator on the kept factors, in their original order
    """
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != operator.dim:
        raise DimensionMismatchError(
            f"Factor dimensions {dims} do not multiply to operator dimension {operator.dim}"
        )
    n_factors = len(dims)
    kept = _normalize_keep(keep, n_factors)
    traced = [index for index in range(n_factors) if index not in kept]

    tensor = operator.entries.reshape(dims + dims)
    # Trace pairs from the highest index down so remaining axis numbers stay valid
    current = n_factors
    for index in sorted(traced, reverse=True):
        tensor = np.trace(tensor, axis1=index, axis2=index + current)
        current -= 1
    kept_dim = int(np.prod([dims[index] for index in kept]))
    return Operator(tensor.reshape((kept_dim, kept_dim)))


def superoperator_from_map(fn: Callable[[Operator], Operator], dim: int) -> Superoperator:
    """Matrix of a linear map on dim x dim operators, built column by column"""
    size = dim * dim
    matrix = np.zeros((size, size), dtype=complex)
    for column in range(size):
        unit = np.zeros(size, dtype=complex)
        unit[column] = 1.0
        image = fn(devectorize(unit, dim))
        if image.dim != dim:
            raise DimensionMismatchError(
                f"Map returned an operator of dim {image.dim}, expected {dim}"
            )
        matrix[:, column] = vectorize(image)
    return Superoperator(matrix)


def embed_superoperator(superop: Superoperator, dims: Sequence[int], factor: int) -> Superoperator:
    """Lift a superoperator on one tensor factor to the joint space (identity elsewhere)"""
    dims = [int(d) for d in dims]
    if not 0 <= factor < len(dims):
        raise DimensionMismatchError(f"Factor {factor} out of range for dims {dims}")
    if dims[factor] != superop.op_dim:
        raise DimensionMismatchError(
            f"Superoperator acts on dim {superop.op_dim}, factor {factor} has dim {dims[factor]}"
        )
    joint_dim = int(np.prod(dims))
    n_factors = len(dims)
    local = superop.matrix

    def lifted(operator: Operator) -> Operator:
        # Move the chosen factor's row/column axes to the front, act, move back
        tensor = operator.entries.reshape(dims + dims)
        tensor = np.moveaxis(tensor, [factor, n_factors + factor], [0, 1])
        rest_shape = tensor.shape[2:]
        block = tensor.reshape(dims[factor], dims[factor], -1)
        local_vectors = block.reshape(dims[factor] ** 2, -1, order=VECTORIZATION_ORDER)
        mapped = (local @ local_vectors).reshape(block.shape, order=VECTORIZATION_ORDER)
        tensor = mapped.reshape((dims[factor], dims[factor]) + rest_shape)
        tensor = np.moveaxis(tensor, [0, 1], [factor, n_factors + factor])
        return Operator(tensor.reshape(joint_dim, joint_dim))

    return superoperator_from_map(lifted, joint_dim)


def _require_finite(matrix: np.ndarray, what: str):
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError(f"{what} has non-finite entries")


def expm(target: ExpmTarget, t: float = 1.0, method: str = "auto") -> ExpmTarget:
    """Matrix exponential exp(target * t)

    Methods:
        "pade": scaling and squaring with a degree-13 Pade approximant
            (scipy.linalg.expm).
        "eig": eigendecomposition V exp(Lambda t) V^-1.
        "auto": the eigendecomposition when the eigenvector matrix has
            condition number below 1e8, otherwise Pade.

    Returns an object of the same kind as target.
    """
    matrix = target.entries if isinstance(target, Operator) else target.matrix
    wrap = Operator if isinstance(target, Operator) else Superoperator
    if not np.isfinite(t):
        raise NonFiniteError(f"expm time must be finite, got {t}")
    _require_finite(matrix, "expm argument")
    if method not in ("auto", "pade", "eig"):
        raise InvalidParameterError(f"Unknown expm method '{method}'")

    scaled = matrix * t
    if not np.any(scaled):
        return wrap(np.eye(matrix.shape[0]))

    if method in ("auto", "eig"):
        eigenvalues, vectors = np.linalg.eig(scaled)
        condition = np.linalg.cond(vectors)
        if method == "eig" or condition < EIG_FAST_PATH_COND:
            result = (vectors * np.exp(eigenvalues)) @ np.linalg.inv(vectors)
            logger.debug(f"expm via eigendecomposition, cond(V) = {condition:.3g}")
            return wrap(result)
        logger.debug(f"expm falling back to Pade, cond(V) = {condition:.3g}")

    return wrap(scipy.linalg.expm(scaled))


def hs_norm(operator: Operator) -> float:
    """Hilbert-Schmidt norm sqrt(tr(X^dagger X))"""
    _require_finite(operator.entries, "hs_norm argument")
    return float(np.linalg.norm(operator.entries, "fro"))


def induced_norm(superop: Superoperator) -> float:
    """Operator norm of a superoperator w.r.t. the Hilbert-Schmidt norm"""
    _require_finite(superop.matrix, "induced_norm argument")
    return float(np.linalg.norm(superop.matrix, 2))


def trace_distance(first: Operator, second: Operator) -> float:
    """Half the trace norm of the difference of two Hermitian operators"""
    _check_pair(first, second)
    difference = first.entries - second.entries
    difference = 0.5 * (difference + difference.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(difference))))


def check_density_matrix(
    operator: Operator,
    trace_tol: float = 1e-12,
    herm_tol: float = 1e-12,
    eig_tol: float = 1e-10,
    name: str = "state",
) -> Operator:
    """Raise InvalidStateError unless operator is a density matrix within tolerance"""
    entries = operator.entries
    if not np.all(np.isfinite(entries)):
        raise InvalidStateError(f"{name} has non-finite entries")
    trace_error = abs(operator.trace() - 1.0)
    if trace_error > trace_tol:
        raise InvalidStateError(f"{name} has trace error {trace_error:.3g} > {trace_tol:g}")
    herm_error = float(np.max(np.abs(entries - entries.conj().T)))
    if herm_error > herm_tol:
        raise InvalidStateError(f"{name} is not Hermitian (error {herm_error:.3g})")
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (entries + entries.conj().T))))
    if min_eig < -eig_tol:
        raise InvalidStateError(f"{name} has negative eigenvalue {min_eig:.3g}")
    return operator


def _cluster_indices(eigenvalues: np.ndarray, tol: float) -> List[List[int]]:
    """Group indices whose eigenvalues are within tol (transitively)"""
    n = eigenvalues.shape[0]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    close = np.abs(eigenvalues[:, None] - eigenvalues[None, :]) < tol
    for i, j in zip(*np.nonzero(np.triu(close, k=1))):
        root_i, root_j = find(int(i)), find(int(j))
        if root_i != root_j:
            parent[root_j] = root_i

    clusters = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(i)
    return list(clusters.values())


def eig(superop: Superoperator, cluster_tol: float = DEGENERACY_TOL) -> Spectrum:
    """Biorthonormal eigendecomposition sorted by ascending |Re lambda|

    Degenerate eigenvalues (|lambda_i - lambda_j| < cluster_tol) are
    biorthonormalized blockwise. Raises SpectrumError when a cluster cannot
    be made biorthonormal or the eigen-residual exceeds tolerance.
    """
    matrix = superop.matrix
    _require_finite(matrix, "eig argument")
    eigenvalues, left, right = scipy.linalg.eig(matrix, left=True, right=True)

    order = np.lexsort((np.imag(eigenvalues), np.abs(np.imag(eigenvalues)), np.abs(np.real(eigenvalues))))
    eigenvalues = eigenvalues[order]
    left = left[:, order]
    right = right[:, order]

    scale = max(1.0, float(np.linalg.norm(matrix, 2)))
    right = right / np.linalg.norm(right, axis=0)

    clusters = _cluster_indices(eigenvalues, cluster_tol)
    for cluster in clusters:
        gram = left[:, cluster].conj().T @ right[:, cluster]
        if np.linalg.cond(gram) > 1.0 / EIGEN_RESIDUAL_TOL:
            raise SpectrumError(
                "Left and right eigenvectors are not dual within tolerance",
                cluster=eigenvalues[cluster],
            )
        left[:, cluster] = left[:, cluster] @ np.linalg.inv(gram).conj().T
        if len(cluster) > 1:
            logger.debug(
                f"Biorthonormalized degenerate cluster of size {len(cluster)} "
                f"at lambda = {eigenvalues[cluster[0]]:.6g}"
            )

    duality_error = float(np.max(np.abs(left.conj().T @ right - np.eye(len(eigenvalues)))))
    if duality_error > EIGEN_RESIDUAL_TOL:
        worst = int(np.argmax(np.max(np.abs(left.conj().T @ right - np.eye(len(eigenvalues))), axis=0)))
        cluster = next(c for c in clusters if worst in c)
        raise SpectrumError(
            f"Biorthonormality error {duality_error:.3g} exceeds {EIGEN_RESIDUAL_TOL:g}",
            cluster=eigenvalues[cluster],
        )

    residual = float(np.max(np.abs(matrix @ right - right * eigenvalues), initial=0.0)) / scale
    if residual > EIGEN_RESIDUAL_TOL:
        raise SpectrumError(f"Eigen-residual {residual:.3g} exceeds {EIGEN_RESIDUAL_TOL:g}")

    return Spectrum(eigenvalues=eigenvalues, right_vectors=right, left_vectors=left)


def embed_operator(operator: Operator, dims: Sequence[int], factor: int) -> Operator:
    """Place an operator on one tensor factor, identity on the others"""
    dims = [int(d) for d in dims]
    if not 0 <= factor < len(dims):
        raise DimensionMismatchError(f"Factor {factor} out of range for dims {dims}")
    if dims[factor] != operator.dim:
        raise DimensionMismatchError(
            f"Operator of dim {operator.dim} does not fit factor {factor} of dims {dims}"
        )
    factors = [operator if index == factor else Operator.identity(d) for index, d in enumerate(dims)]
    return kron(*factors)
