"""
Fast stroboscopic engine: a length-n sequence collapses to one scalar
recursion per V-basis index, alternating forward lookups through
Lambda_{dz_l, dx_l} and inverse lookups through Lambda_{dz_l+1, dx_l}.

Odd-length sequences return V-basis amplitudes, even-length ones U-basis
amplitudes. Sequences of length 0 or 1 have no Lambda step and are served
by the projector path in the z basis.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .ensemble import Basis, TwoEnsembleState
from .exceptions import ContractError, DomainError
from .joint_svd import JointSVD, LambdaFactor
from .projectors import ProjectorSpec, apply_projector
from .strobe import OutcomeSequence

logger = logging.getLogger(__name__)

FORWARD = "forward"
INVERSE = "inverse"


@dataclass(frozen=True)
class RecursionResult:
    final_index: int | None
    coefficient: float
    trace: tuple[tuple[str, int], ...] | None = None


def lambda_steps(jsvd: JointSVD, sequence: OutcomeSequence) -> list[tuple[str, LambdaFactor]]:
    """The ordered forward / inverse lookups a sequence of length >= 2 reduces to."""
    if len(sequence) < 2:
        raise ContractError("the Lambda recursion needs at least one z and one x readout")
    sequence.check_size(jsvd.n)
    deltas = sequence.deltas
    rounds = len(deltas) // 2
    steps = []
    full_rounds = rounds if len(deltas) % 2 else rounds - 1
    for l in range(full_rounds):
        dz, dx, dz_next = deltas[2 * l], deltas[2 * l + 1], deltas[2 * l + 2]
        steps.append((FORWARD, jsvd.factor(dz, dx)))
        steps.append((INVERSE, jsvd.factor(dz_next, dx)))
    if len(deltas) % 2 == 0:
        steps.append((FORWARD, jsvd.factor(deltas[-2], deltas[-1])))
    return steps


def recurse(jsvd: JointSVD, k: int, sequence: OutcomeSequence, trace: bool = False) -> RecursionResult:
    """Follow one V-basis index through the sequence."""
    if not 0 <= k < jsvd.dim:
        raise DomainError(f"index {k} outside [0, {jsvd.dim})")
    coefficient = 1.0
    visited = [] if trace else None
    for direction, factor in lambda_steps(jsvd, sequence):
        if direction == FORWARD:
            target, amplitude = factor.forward_index[k], factor.forward_amp[k]
        else:
            target, amplitude = factor.inverse_index[k], factor.inverse_amp[k]
        if target < 0:
            return RecursionResult(None, 0.0, tuple(visited) if trace else None)
        k = int(target)
        coefficient *= float(amplitude)
        if trace:
            visited.append((direction, k))
    return RecursionResult(k, coefficient, tuple(visited) if trace else None)


def recurse_all(jsvd: JointSVD, sequence: OutcomeSequence) -> tuple[np.ndarray, np.ndarray]:
    """
    Vectorized recursion over every starting index. Returns (final_index,
    coefficient); final_index is -1 where the chain is cut.
    """
    index = np.arange(jsvd.dim)
    coefficient = np.ones(jsvd.dim)
    for direction, factor in lambda_steps(jsvd, sequence):
        alive = index >= 0
        lookup = factor.forward_index if direction == FORWARD else factor.inverse_index
        amps = factor.forward_amp if direction == FORWARD else factor.inverse_amp
        safe = np.where(alive, index, 0)
        coefficient = np.where(alive, coefficient * amps[safe], 0.0)
        index = np.where(alive, lookup[safe], -1)
    coefficient[index < 0] = 0.0
    return index, coefficient


def fast_apply_sequence(state: TwoEnsembleState, sequence: OutcomeSequence, jsvd: JointSVD) -> TwoEnsembleState:
    """
    Apply the sequence's projector product to `state` (any basis the
    decomposition can express). The result is unnormalized.
    """
    if len(sequence) < 2:
        z_state = jsvd.to_z(state)
        for basis, delta in sequence.check_size(jsvd.n).entries:
            z_state = apply_projector(z_state, ProjectorSpec(jsvd.n, delta, basis))
        return z_state
    coordinates = jsvd.express(state).amps
    index, coefficient = recurse_all(jsvd, sequence)
    alive = index >= 0
    out = np.zeros(jsvd.dim, dtype=np.complex128)
    out[index[alive]] = coefficient[alive] * coordinates[alive]
    basis = Basis.V if sequence.parity == "odd" else Basis.U
    return TwoEnsembleState(jsvd.n, out, basis)


def fast_sequence_probability(state: TwoEnsembleState, sequence: OutcomeSequence, jsvd: JointSVD) -> float:
    return fast_apply_sequence(state.normalized(), sequence, jsvd).norm_sq


def to_z_basis(state: TwoEnsembleState, jsvd: JointSVD) -> TwoEnsembleState:
    return jsvd.to_z(state)
