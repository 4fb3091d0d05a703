"""
Exception hierarchy for hsthermo.

Every error raised on purpose by the package derives from ThermometryError;
the CLI maps the families to exit codes.
"""

from typing import Optional, Sequence


class ThermometryError(Exception):
    """Base class for all hsthermo errors"""


class DimensionMismatchError(ThermometryError, ValueError):
    """Operator or superoperator shapes do not fit together"""


class NonFiniteError(ThermometryError, ValueError):
    """NaN or infinite entries where finite numbers are required"""


class NonHermitianError(ThermometryError, ValueError):
    """An operator that must be Hermitian is not"""


class InvalidStateError(ThermometryError, ValueError):
    """An operator fails the density-matrix checks"""


class InvalidParameterError(ThermometryError, ValueError):
    """A physical or numerical parameter is outside its allowed range"""


class SpectrumError(ThermometryError):
    """Eigendecomposition could not be biorthonormalized within tolerance"""

    def __init__(self, message: str, cluster: Optional[Sequence[complex]] = None):
        self.cluster = list(cluster) if cluster is not None else []
        if self.cluster:
            values = ", ".join(f"{value:.6g}" for value in self.cluster)
            message = f"{message} (degenerate cluster: {values})"
        super().__init__(message)


class SteadyStateUniquenessError(ThermometryError):
    """The Liouvillian does not have exactly one zero eigenvalue"""

    def __init__(self, zero_count: int):
        self.zero_count = zero_count
        super().__init__(
            f"Expected exactly one zero eigenvalue, found {zero_count}"
        )


class BoundInapplicableError(ThermometryError):
    """The memory bound requires gap/g > eps*||K||"""

    def __init__(self, gap_over_g: float, eps_k_norm: float):
        self.gap_over_g = gap_over_g
        self.eps_k_norm = eps_k_norm
        super().__init__(
            f"Bound inapplicable: gap/g = {gap_over_g:.6g} does not exceed "
            f"eps*||K|| = {eps_k_norm:.6g}"
        )


class CapacityError(ThermometryError):
    """Requested joint system is larger than the dense oracle supports"""

    def __init__(self, requested: int, maximum: int):
        self.requested = requested
        self.maximum = maximum
        super().__init__(
            f"Joint simulation supports at most {maximum} probes, got {requested}"
        )


class NoHeisenbergWindowError(ThermometryError):
    """The N_max predicate already fails for a single probe"""

    def __init__(self, xi: float, eta: float, theta: float, ratio: float, tau: float):
        self.xi = xi
        self.eta = eta
        self.theta = theta
        self.ratio = ratio
        self.tau = tau
        super().__init__(
            f"No Heisenberg window at xi={xi:g}, eta={eta:g}, theta={theta:g}: "
            f"ratio at N=1 is {ratio:.6g} < 1 - tau = {1 - tau:.6g}"
        )
