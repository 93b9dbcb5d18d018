"""
Unconditional evolution of mixed states under repeated z / x readouts with
the outcomes averaged out, in the V / U bases where every Lambda acts as a
weighted partial permutation.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .ensemble import Basis, DensityMatrix
from .exceptions import BasisMismatchError, DomainError, IterationLimitError
from .fast_strobe import recurse_all
from .joint_svd import JointSVD
from .strobe import OutcomeSequence

logger = logging.getLogger(__name__)

STEADY_TOL = 1e-12
STEADY_MAX_ITER = 100_000
NEGATIVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiagonalDistribution:
    """Diagonal of a V-basis density matrix, normalized to sum 1."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size and values.min() < -NEGATIVE_TOL:
            raise DomainError(f"distribution has negative weight {values.min():.3e}")
        values = np.clip(values, 0.0, None)
        total = values.sum()
        if total <= 0.0:
            raise DomainError("distribution has zero total weight")
        values = values / total
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_density(cls, rho: DensityMatrix) -> "DiagonalDistribution":
        return cls(rho.diagonal())

    def top(self, count: int) -> list[tuple[int, float]]:
        order = np.argsort(-self.values, kind="stable")[:count]
        return [(int(i), float(self.values[i])) for i in order]


def _hermitian(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def _require(rho: DensityMatrix, basis: Basis, jsvd: JointSVD):
    if rho.basis is not basis:
        raise BasisMismatchError(f"expected a {basis.value}-basis density matrix, got {rho.basis.value}")
    if rho.n != jsvd.n:
        raise DomainError(f"density matrix has N={rho.n}, decomposition has N={jsvd.n}")


def half_round(rho: DensityMatrix, jsvd: JointSVD) -> DensityMatrix:
    """V -> U: rho' = sum over (dz, dx) of Lambda rho Lambda^T."""
    _require(rho, Basis.V, jsvd)
    out = np.zeros_like(rho.entries)
    for key in sorted(jsvd.factors):
        factor = jsvd.factors[key]
        if not len(factor):
            continue
        weights = np.outer(factor.amplitudes, factor.amplitudes)
        out[np.ix_(factor.rows, factor.rows)] += weights * rho.entries[np.ix_(factor.cols, factor.cols)]
    return DensityMatrix(rho.n, out, Basis.U)


def other_half(rho: DensityMatrix, jsvd: JointSVD) -> DensityMatrix:
    """U -> V: rho' = sum over (dz, dx) of Lambda^T rho Lambda."""
    _require(rho, Basis.U, jsvd)
    out = np.zeros_like(rho.entries)
    for key in sorted(jsvd.factors):
        factor = jsvd.factors[key]
        if not len(factor):
            continue
        weights = np.outer(factor.amplitudes, factor.amplitudes)
        out[np.ix_(factor.cols, factor.cols)] += weights * rho.entries[np.ix_(factor.rows, factor.rows)]
    return DensityMatrix(rho.n, out, Basis.V)


def full_round(rho: DensityMatrix, jsvd: JointSVD) -> DensityMatrix:
    return other_half(half_round(rho, jsvd), jsvd)


def to_v_basis(rho: DensityMatrix, jsvd: JointSVD) -> DensityMatrix:
    if rho.basis is Basis.V:
        return rho
    if rho.basis is not Basis.Z:
        raise BasisMismatchError(f"expected a z- or V-basis density matrix, got {rho.basis.value}")
    if rho.n != jsvd.n:
        raise DomainError(f"density matrix has N={rho.n}, decomposition has N={jsvd.n}")
    return DensityMatrix(rho.n, _hermitian(jsvd.v.T @ rho.entries @ jsvd.v), Basis.V)


def iterate_rounds(rho: DensityMatrix, rounds: int, jsvd: JointSVD):
    """Yield (round, V-basis density matrix) for rounds 0..L."""
    if rounds < 0:
        raise DomainError(f"rounds must be nonnegative, got {rounds}")
    current = to_v_basis(rho, jsvd)
    yield 0, current
    for count in range(1, rounds + 1):
        current = full_round(current, jsvd)
        yield count, current


def run_rounds(rho: DensityMatrix, rounds: int, jsvd: JointSVD) -> list[DiagonalDistribution]:
    history = []
    for count, current in iterate_rounds(rho, rounds, jsvd):
        drift = abs(current.trace() - 1.0)
        if drift > 1e-10:
            logger.warning("trace drifted by %.2e after %d rounds", drift, count)
        history.append(DiagonalDistribution.from_density(current))
    return history


def offdiagonal_max(rho: DensityMatrix) -> float:
    entries = rho.entries
    return float(np.max(np.abs(entries - np.diag(entries.diagonal())), initial=0.0))


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Column-stochastic map on V-basis diagonals for one full round."""

    matrix: np.ndarray

    def apply(self, distribution: DiagonalDistribution) -> np.ndarray:
        return self.matrix @ distribution.values

    def column_sums(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


def build_transition_matrix(jsvd: JointSVD) -> TransitionMatrix:
    """A[k', k] = sum over (dz, dx, dz') of the squared recursion coefficient k -> k'."""
    matrix = np.zeros((jsvd.dim, jsvd.dim))
    start = np.arange(jsvd.dim)
    for deltas in itertools.product(range(jsvd.n + 1), repeat=3):
        index, coefficient = recurse_all(jsvd, OutcomeSequence.from_deltas(deltas))
        alive = index >= 0
        np.add.at(matrix, (index[alive], start[alive]), coefficient[alive] ** 2)
    return TransitionMatrix(matrix)


def steady_state(transition: TransitionMatrix, initial: DiagonalDistribution,
                 tol: float = STEADY_TOL, max_iter: int = STEADY_MAX_ITER) -> DiagonalDistribution:
    """Power iteration d <- A d until successive iterates agree within tol."""
    current = initial.values
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        following = transition.matrix @ current
        following = following / following.sum()
        residual = float(np.max(np.abs(following - current)))
        current = following
        if residual < tol:
            logger.debug("steady state reached after %d iterations", iteration)
            return DiagonalDistribution(current)
    raise IterationLimitError("power iteration did not converge", residual, max_iter)


def fixed_point_space(transition: TransitionMatrix, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of ker(A - I); one column per conserved distribution."""
    matrix = transition.matrix
    return null_space(matrix - np.eye(matrix.shape[0]), rcond=tol)
