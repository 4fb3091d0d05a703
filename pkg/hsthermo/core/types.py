"""
Core data types for hsthermo

Operators and superoperators are immutable wrappers around dense complex
numpy arrays. Superoperators act on column-stacked vectorized operators:
vec(X)[i + d*j] = X[i, j].
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError

# numpy order flag for column stacking
VECTORIZATION_ORDER = "F"

Scalar = Union[int, float, complex, np.number]


def _frozen_array(values: Any) -> np.ndarray:
    array = np.array(values, dtype=complex)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix on a finite Hilbert space (hbar = k_B = 1)"""

    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen_array(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(
                f"Operator entries must be a square matrix, got shape {entries.shape}"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "Operator":
        return cls(np.eye(dim))

    @classmethod
    def zeros(cls, dim: int) -> "Operator":
        return cls(np.zeros((dim, dim)))

    @property
    def dag(self) -> "Operator":
        return Operator(self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= tol)

    def is_density_matrix(
        self, trace_tol: float = 1e-12, herm_tol: float = 1e-12, eig_tol: float = 1e-10
    ) -> bool:
        if not np.all(np.isfinite(self.entries)):
            return False
        if abs(self.trace() - 1.0) > trace_tol or not self.is_hermitian(herm_tol):
            return False
        hermitian_part = 0.5 * (self.entries + self.entries.conj().T)
        return bool(np.min(np.linalg.eigvalsh(hermitian_part)) >= -eig_tol)

    def _check_same_dim(self, other: "Operator"):
        if other.dim != self.dim:
            raise DimensionMismatchError(
                f"Operator dimensions differ: {self.dim} vs {other.dim}"
            )

    def __matmul__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        self._check_same_dim(other)
        return Operator(self.entries @ other.entries)

    def __add__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        self._check_same_dim(other)
        return Operator(self.entries + other.entries)

    def __sub__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        self._check_same_dim(other)
        return Operator(self.entries - other.entries)

    def __mul__(self, scalar: Scalar) -> "Operator":
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return Operator(scalar * self.entries)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.entries)

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on operators, as a matrix on column-stacked vectors"""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen_array(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(
                f"Superoperator matrix must be square, got shape {matrix.shape}"
            )
        side = matrix.shape[0]
        op_dim = math.isqrt(side)
        if op_dim * op_dim != side:
            raise DimensionMismatchError(
                f"Superoperator side {side} is not a perfect square"
            )
        object.__setattr__(self, "matrix", matrix)

    @property
    def op_dim(self) -> int:
        return math.isqrt(self.matrix.shape[0])

    @classmethod
    def identity(cls, op_dim: int) -> "Superoperator":
        return cls(np.eye(op_dim * op_dim))

    @classmethod
    def zeros(cls, op_dim: int) -> "Superoperator":
        return cls(np.zeros((op_dim * op_dim, op_dim * op_dim)))

    def apply(self, operator: Operator) -> Operator:
        """Apply the map to an operator and return the image"""
        if operator.dim != self.op_dim:
            raise DimensionMismatchError(
                f"Superoperator on dim {self.op_dim} applied to operator of dim {operator.dim}"
            )
        vector = operator.entries.reshape(-1, order=VECTORIZATION_ORDER)
        image = self.matrix @ vector
        return Operator(image.reshape((self.op_dim, self.op_dim), order=VECTORIZATION_ORDER))

    def _check_same_dim(self, other: "Superoperator"):
        if other.op_dim != self.op_dim:
            raise DimensionMismatchError(
                f"Superoperator dimensions differ: {self.op_dim} vs {other.op_dim}"
            )

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        if not isinstance(other, Superoperator):
            return NotImplemented
        self._check_same_dim(other)
        return Superoperator(self.matrix @ other.matrix)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        if not isinstance(other, Superoperator):
            return NotImplemented
        self._check_same_dim(other)
        return Superoperator(self.matrix + other.matrix)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        if not isinstance(other, Superoperator):
            return NotImplemented
        self._check_same_dim(other)
        return Superoperator(self.matrix - other.matrix)

    def __mul__(self, scalar: Scalar) -> "Superoperator":
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return Superoperator(scalar * self.matrix)

    __rmul__ = __mul__

    def __neg__(self) -> "Superoperator":
        return Superoperator(-self.matrix)

    def __repr__(self) -> str:
        return f"Superoperator(op_dim={self.op_dim})"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues with biorthonormal right/left eigenvectors (as columns)

    left_vectors[:, mu].conj() @ right_vectors[:, nu] == delta(mu, nu); the
    columns are vectorized operators R_mu and L_mu.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues))
        object.__setattr__(self, "right_vectors", _frozen_array(self.right_vectors))
        object.__setattr__(self, "left_vectors", _frozen_array(self.left_vectors))
        n = self.eigenvalues.shape[0]
        if self.right_vectors.shape != (n, n) or self.left_vectors.shape != (n, n):
            raise DimensionMismatchError(
                f"Spectrum of size {n} needs {n}x{n} eigenvector matrices"
            )

    def __len__(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def op_dim(self) -> int:
        return math.isqrt(len(self))

    def right_operator(self, mu: int) -> Operator:
        return Operator(
            self.right_vectors[:, mu].reshape((self.op_dim, self.op_dim), order=VECTORIZATION_ORDER)
        )

    def left_operator(self, mu: int) -> Operator:
        return Operator(
            self.left_vectors[:, mu].reshape((self.op_dim, self.op_dim), order=VECTORIZATION_ORDER)
        )


class SweepMode(Enum):
    """Which QFI family a sweep evaluates"""
    EXAMPLE_NOISE = "example-noise"
    IDEAL = "ideal"
    GENERAL_NOISE = "general-noise"
    INITIAL_STATE = "initial-state"


class OutputFormat(Enum):
    """Serialization format for result tables"""
    CSV = "csv"
    JSON = "json"


class NmaxRule(Enum):
    """How the largest useful probe number is extracted"""
    THRESHOLD = "threshold"
    PEAK = "peak"


SWEEP_COLUMNS = ["N", "xi", "eta", "theta", "qfi_over_fth", "qfi_ideal_over_fth", "ratio"]
INITIAL_STATE_COLUMNS = ["rho00", "sigma01"]


@dataclass
class SweepSpec:
    """Grid and mode for a QFI sweep"""
    n_values: List[int]
    xi_values: List[float]
    eta_values: List[float]
    theta_values: List[float]
    mode: SweepMode = SweepMode.EXAMPLE_NOISE
    output_format: OutputFormat = OutputFormat.CSV
    output_path: Optional[str] = None
    kappa_s_over_g: float = 0.0
    rho00_values: List[float] = field(default_factory=lambda: [0.5])
    sigma01_values: List[float] = field(default_factory=lambda: [0.5])

    def __post_init__(self):
        grids = {
            "N": self.n_values,
            "xi": self.xi_values,
            "eta": self.eta_values,
            "theta": self.theta_values,
            "rho00": self.rho00_values,
            "sigma01": self.sigma01_values,
        }
        for name, values in grids.items():
            if len(values) == 0:
                raise InvalidParameterError(f"Sweep grid '{name}' is empty")
        if any(int(n) != n or n < 1 for n in self.n_values):
            raise InvalidParameterError(f"N values must be positive integers: {self.n_values}")
        if any(not xi > 0 for xi in self.xi_values):
            raise InvalidParameterError(f"xi values must be positive: {self.xi_values}")
        if any(not (eta >= 0 and math.isfinite(eta)) for eta in self.eta_values):
            raise InvalidParameterError(f"eta values must be nonnegative: {self.eta_values}")
        if any(not (theta > 0 and math.isfinite(theta)) for theta in self.theta_values):
            raise InvalidParameterError(f"theta values must be positive: {self.theta_values}")
        if any(not 0 <= rho00 <= 1 for rho00 in self.rho00_values):
            raise InvalidParameterError(f"rho00 values must lie in [0, 1]: {self.rho00_values}")
        if any(not 0 <= sigma01 <= 0.5 for sigma01 in self.sigma01_values):
            raise InvalidParameterError(f"|sigma01| values must lie in [0, 1/2]: {self.sigma01_values}")
        self.n_values = [int(n) for n in self.n_values]

    @property
    def columns(self) -> List[str]:
        if self.mode is SweepMode.INITIAL_STATE:
            return SWEEP_COLUMNS + INITIAL_STATE_COLUMNS
        return list(SWEEP_COLUMNS)


@dataclass
class SweepRow:
    """One grid point of a sweep, QFI values in units of F_th"""
    N: int
    xi: float
    eta: float
    theta: float
    qfi_over_fth: float
    qfi_ideal_over_fth: float
    ratio: float
    rho00: Optional[float] = None
    sigma01: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "N": self.N,
            "xi": self.xi,
            "eta": self.eta,
            "theta": self.theta,
            "qfi_over_fth": self.qfi_over_fth,
            "qfi_ideal_over_fth": self.qfi_ideal_over_fth,
            "ratio": self.ratio,
        }
        if self.rho00 is not None:
            result["rho00"] = self.rho00
            result["sigma01"] = self.sigma01
        return result


@dataclass
class SweepResult:
    """Rows of a sweep in grid order plus run metadata"""
    rows: List[SweepRow]
    metadata: Dict[str, Any] = field(default_factory=dict)
    columns: Sequence[str] = field(default_factory=lambda: list(SWEEP_COLUMNS))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metadata": dict(self.metadata),
            "rows": [row.to_dict() for row in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class CheckRow:
    """One inequality or agreement check with both sides recorded"""
    name: str
    lhs: float
    rhs: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class CheckReport:
    """Outcome of a bound or oracle verification run"""
    title: str
    rows: List[CheckRow]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "metadata": dict(self.metadata),
            "rows": [row.to_dict() for row in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
