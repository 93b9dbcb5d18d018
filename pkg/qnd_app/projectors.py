"""
Projection operators P_delta onto fixed Fock offsets |k1 - k2| = delta, in the
z basis, the x basis and arbitrary rotated bases.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .config import dense_limit
from .ensemble import (
    Basis,
    TwoEnsembleState,
    check_size,
    rotation_matrix,
    signed_offsets,
    two_mode_apply,
)
from .exceptions import BasisMismatchError, DenseLimitError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProjectorSpec:
    n: int
    delta: int
    basis: Basis = Basis.Z
    angles: tuple[float, float] | None = None

    def __post_init__(self):
        check_size(self.n)
        if not 0 <= self.delta <= self.n:
            raise DomainError(f"delta={self.delta} outside [0, {self.n}]")
        if self.basis not in (Basis.Z, Basis.X, Basis.CUSTOM):
            raise DomainError(f"projectors are defined in z, x or custom bases, not {self.basis.value}")
        if self.basis is Basis.CUSTOM and self.angles is None:
            raise DomainError("custom-basis projectors need (theta, phi) angles")

    @property
    def rank(self) -> int:
        return sector_size(self.n, self.delta)

    def rotation(self) -> np.ndarray | None:
        """Single-ensemble rotation taking z-basis labels to this basis, None for z."""
        if self.basis is Basis.Z:
            return None
        theta, phi = (np.pi / 2, 0.0) if self.basis is Basis.X else self.angles
        return rotation_matrix(self.n, theta, phi)


def sector_size(n: int, delta: int) -> int:
    return 2 * (n + 1 - delta) // (2 if delta == 0 else 1)


def sector_labels(n: int) -> np.ndarray:
    """|k1 - k2| for every flat index."""
    return np.abs(signed_offsets(n))


def projector_mask(n: int, delta: int) -> np.ndarray:
    n = check_size(n)
    if not 0 <= delta <= n:
        raise DomainError(f"delta={delta} outside [0, {n}]")
    return sector_labels(n) == delta


def sector_indices(n: int, delta: int) -> np.ndarray:
    return np.flatnonzero(projector_mask(n, delta))


def apply_projector(state: TwoEnsembleState, spec: ProjectorSpec) -> TwoEnsembleState:
    """Apply P_delta to a z-basis state; the result is unnormalized."""
    if state.basis is not Basis.Z:
        raise BasisMismatchError(f"projectors act on z-basis amplitudes, got {state.basis.value}")
    if state.n != spec.n:
        raise DomainError(f"state has N={state.n}, projector has N={spec.n}")
    mask = projector_mask(spec.n, spec.delta)
    rotation = spec.rotation()
    if rotation is None:
        return state.with_amps(np.where(mask, state.amps, 0.0))
    framed = two_mode_apply(rotation.conj().T, state.amps)
    framed[~mask] = 0.0
    return state.with_amps(two_mode_apply(rotation, framed))


def projector_matrix(spec: ProjectorSpec) -> np.ndarray:
    """Dense (N+1)^2 x (N+1)^2 projector, for oracles and small-N analysis."""
    limit = dense_limit()
    if spec.n > limit:
        raise DenseLimitError(spec.n, limit)
    mask = projector_mask(spec.n, spec.delta)
    rotation = spec.rotation()
    if rotation is None:
        return np.diag(mask.astype(float))
    columns = np.kron(rotation, rotation)[:, mask]
    dense = columns @ columns.conj().T
    return dense.real if np.isrealobj(rotation) else dense
