"""
Exact stroboscopic engine: alternating z / x projections applied one by one
in the Fock basis, trajectory sampling and basis-resolved probabilities.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import dense_limit
from .ensemble import (
    Basis,
    SpinAxis,
    TwoEnsembleState,
    entanglement_entropy,
    epr_state,
    fidelity_to,
    from_x_frame,
    rotation_matrix,
    to_x_frame,
)
from .exceptions import BasisMismatchError, ContractError, DenseLimitError, DomainError
from .projectors import ProjectorSpec, apply_projector, projector_matrix, sector_labels

logger = logging.getLogger(__name__)

MIN_BRANCH_PROBABILITY = 1e-14


@dataclass(frozen=True)
class OutcomeSequence:
    """
    Alternating readout record (z, d1), (x, d2), (z, d3), ... in order of
    application. Odd-length sequences end on z, even-length ones on x.
    """

    entries: tuple[tuple[Basis, int], ...]

    def __post_init__(self):
        entries = tuple((Basis(basis), int(delta)) for basis, delta in self.entries)
        for position, (basis, delta) in enumerate(entries):
            expected = Basis.Z if position % 2 == 0 else Basis.X
            if basis is not expected:
                raise ContractError(
                    f"entry {position} is tagged {basis.value}; sequences alternate z, x, z, ... starting with z"
                )
            if delta < 0:
                raise ContractError(f"entry {position} has negative offset {delta}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_deltas(cls, deltas) -> "OutcomeSequence":
        return cls(tuple((Basis.Z if i % 2 == 0 else Basis.X, d) for i, d in enumerate(deltas)))

    @classmethod
    def all_zero(cls, length: int) -> "OutcomeSequence":
        return cls.from_deltas([0] * length)

    @classmethod
    def odd_rounds(cls, rounds: int) -> "OutcomeSequence":
        """All-zero sequence of L rounds plus the closing z readout."""
        return cls.all_zero(2 * rounds + 1)

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(delta for _, delta in self.entries)

    @property
    def parity(self) -> str:
        return "odd" if len(self.entries) % 2 else "even"

    @property
    def rounds(self) -> int:
        return len(self.entries) // 2

    def __len__(self) -> int:
        return len(self.entries)

    def check_size(self, n: int) -> "OutcomeSequence":
        for position, delta in enumerate(self.deltas):
            if delta > n:
                raise DomainError(f"entry {position} has offset {delta} > N={n}")
        return self


def enumerate_sequences(n: int, length: int):
    """Every alternating sequence of the given length over offsets 0..N."""
    for deltas in itertools.product(range(n + 1), repeat=length):
        yield OutcomeSequence.from_deltas(deltas)


def apply_sequence(state: TwoEnsembleState, sequence: OutcomeSequence) -> TwoEnsembleState:
    """Apply the projectors of `sequence` in order; the result is unnormalized."""
    if state.basis is not Basis.Z:
        raise BasisMismatchError(f"the exact engine takes z-basis states, got {state.basis.value}")
    sequence.check_size(state.n)
    current = state
    for basis, delta in sequence.entries:
        current = apply_projector(current, ProjectorSpec(state.n, delta, basis))
        if current.norm_sq == 0.0:
            break
    return current


def sequence_probability(state: TwoEnsembleState, sequence: OutcomeSequence) -> float:
    return apply_sequence(state.normalized(), sequence).norm_sq


def sequence_operator(n: int, sequence: OutcomeSequence) -> np.ndarray:
    """Dense product P_last ... P_first."""
    limit = dense_limit()
    if n > limit:
        raise DenseLimitError(n, limit)
    sequence.check_size(n)
    operator = np.eye((n + 1) ** 2)
    for basis, delta in sequence.entries:
        operator = projector_matrix(ProjectorSpec(n, delta, basis)) @ operator
    return operator


def offset_weights(state: TwoEnsembleState, basis: Basis) -> np.ndarray:
    """||P_delta psi||^2 for delta = 0..N, for a z-basis state read out in `basis`."""
    if state.basis is not Basis.Z:
        raise BasisMismatchError(f"expected a z-basis state, got {state.basis.value}")
    framed = state if basis is Basis.Z else to_x_frame(state)
    return np.bincount(sector_labels(state.n), weights=np.abs(framed.amps) ** 2, minlength=state.n + 1)


@dataclass
class TrajectoryRecord:
    seed: int
    index: int
    entries: list[tuple[Basis, int]] = field(default_factory=list)
    step_probs: list[float] = field(default_factory=list)
    step_states: list[TwoEnsembleState] = field(default_factory=list)

    @property
    def sequence(self) -> OutcomeSequence:
        return OutcomeSequence(tuple(self.entries))

    @property
    def joint_prob(self) -> float:
        return float(np.prod(self.step_probs)) if self.step_probs else 1.0


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def sample_trajectory(state: TwoEnsembleState, total_projections: int, rng: np.random.Generator,
                      seed: int = 0, index: int = 0) -> TrajectoryRecord:
    """
    Born-rule trajectory in the sharp-projection limit. Branches below
    MIN_BRANCH_PROBABILITY are never drawn.
    """
    if state.basis is not Basis.Z:
        raise BasisMismatchError(f"trajectories start from a z-basis state, got {state.basis.value}")
    if total_projections < 0:
        raise DomainError(f"total_projections must be nonnegative, got {total_projections}")
    record = TrajectoryRecord(seed=seed, index=index)
    current = state.normalized()
    labels = sector_labels(state.n)
    for step in range(total_projections):
        basis = Basis.Z if step % 2 == 0 else Basis.X
        framed = current if basis is Basis.Z else to_x_frame(current)
        weights = np.bincount(labels, weights=np.abs(framed.amps) ** 2, minlength=state.n + 1)
        weights = np.where(weights >= MIN_BRANCH_PROBABILITY, weights, 0.0)
        delta = int(rng.choice(state.n + 1, p=weights / weights.sum()))
        probability = float(weights[delta] / weights.sum())
        collapsed = framed.with_amps(np.where(labels == delta, framed.amps, 0.0)).normalized()
        current = collapsed if basis is Basis.Z else from_x_frame(collapsed)
        record.entries.append((basis, delta))
        record.step_probs.append(probability)
        record.step_states.append(current)
    return record


def sample_trajectories(state: TwoEnsembleState, total_projections: int, master_seed: int,
                        count: int, threads: int = 1) -> list[TrajectoryRecord]:
    """
    Independent trajectories; trajectory i draws from SeedSequence(master_seed,
    spawn_key=(i,)), so the output does not depend on `threads`.
    """

    def run(index: int) -> TrajectoryRecord:
        return sample_trajectory(state, total_projections, trajectory_rng(master_seed, index),
                                 seed=master_seed, index=index)

    if threads <= 1:
        return [run(index) for index in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, range(count)))


AXIS_ANGLES = {
    SpinAxis.Z: (0.0, 0.0),
    SpinAxis.X: (np.pi / 2, 0.0),
    SpinAxis.Y: (np.pi / 2, np.pi / 2),
}


def basis_probabilities(state: TwoEnsembleState, axis1: SpinAxis, axis2: SpinAxis) -> np.ndarray:
    """
    p[k1, k2] = |<k1^(axis1), k2^(axis2)|psi>|^2 / <psi|psi> for a z-basis state.
    """
    if state.basis is not Basis.Z:
        raise BasisMismatchError(f"expected a z-basis state, got {state.basis.value}")
    if state.norm_sq <= 0.0:
        raise DomainError("basis probabilities of a zero-norm state are undefined")
    r1 = rotation_matrix(state.n, *AXIS_ANGLES[SpinAxis(axis1)])
    r2 = rotation_matrix(state.n, *AXIS_ANGLES[SpinAxis(axis2)])
    coefficients = r2.conj().T @ state.amplitude_grid() @ r1.conj()
    return (np.abs(coefficients) ** 2 / state.norm_sq).T


@dataclass(frozen=True)
class StrobeDiagnostic:
    rounds: int
    fidelity: float
    entropy_ratio: float
    probability: float

    @property
    def amplitude(self) -> float:
        """Norm of the projected state, sqrt of the sequence probability."""
        return float(np.sqrt(self.probability))


def strobe_diagnostics(state: TwoEnsembleState, rounds: list[int]) -> list[StrobeDiagnostic]:
    """
    Fidelity to the EPR state, entropy relative to log2(N+1) and the success
    probability after all-zero sequences of 2L+1 projections.
    """
    initial = state.normalized()
    target = epr_state(state.n)
    max_entropy = np.log2(state.n + 1)
    diagnostics = []
    for count in rounds:
        projected = apply_sequence(initial, OutcomeSequence.odd_rounds(count))
        probability = projected.norm_sq
        if probability < MIN_BRANCH_PROBABILITY:
            logger.warning("all-zero outcome after %d rounds has probability %.3e", count, probability)
            diagnostics.append(StrobeDiagnostic(count, 0.0, 0.0, probability))
            continue
        diagnostics.append(StrobeDiagnostic(
            rounds=count,
            fidelity=fidelity_to(projected, target),
            entropy_ratio=entanglement_entropy(projected) / max_entropy,
            probability=probability,
        ))
    return diagnostics
