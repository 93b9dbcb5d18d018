"""
Exceptions raised by the simulator.
"""


class QndError(Exception):
    """Base class for every simulator error."""


class DomainError(QndError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularInputError(DomainError):
    pass


class UndefinedOffsetError(DomainError):
    pass


class TruncationError(QndError):
    """The truncated photon-outcome grid misses too much probability mass."""

    def __init__(self, message: str, mass: float):
        super().__init__(message)
        self.mass = mass


class ContractError(QndError, ValueError):
    """A sequence or state violates a structural precondition."""


class BasisMismatchError(ContractError):
    pass


class DenseLimitError(QndError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"N={n} exceeds the dense-matrix limit {limit}")
        self.n = n
        self.limit = limit


class StructuralError(QndError):
    """Numerical structure that theory guarantees was not found."""


class IterationLimitError(QndError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class CacheError(QndError):
    pass


class CacheChecksumError(CacheError):
    pass


class CacheMissingError(CacheError):
    pass


class ConfigurationError(QndError, ValueError):
    pass
