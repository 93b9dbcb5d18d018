"""
Verification suites run by `manage.py verify`. Each check reports the worst
residual it saw against a fixed threshold.
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import reference_fixtures
from .ensemble import (
    Basis,
    DensityMatrix,
    TwoEnsembleState,
    epr_state,
    maximally_mixed,
    random_state,
    rotation_matrix,
    xx_polarized_state,
)
from .exceptions import ConfigurationError
from .fast_strobe import fast_apply_sequence
from .joint_svd import compute_joint_svd, verify_commuting_family
from .mixed_state import (
    DiagonalDistribution,
    build_transition_matrix,
    half_round,
    other_half,
    steady_state,
    to_v_basis,
)
from .povm import c_function, default_n_max, outcome_grid
from .projectors import ProjectorSpec, projector_matrix, sector_size
from .strobe import OutcomeSequence, apply_sequence, enumerate_sequences, sequence_operator
from .vbasis import classify_sectors, entanglement_spectrum, epr_column

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    check: str
    n_range: str
    max_residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.threshold)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "nRange": self.n_range,
            "maxResidual": self.max_residual,
            "threshold": self.threshold,
            "pass": self.passed,
        }


def _span(sizes) -> str:
    sizes = list(sizes)
    return str(sizes[0]) if len(sizes) == 1 else f"{min(sizes)}-{max(sizes)}"


def check_povm(seed: int = 0) -> list[CheckResult]:
    chis = np.linspace(0.0, math.pi, 100)
    worst = 0.0
    for alpha in (1.0, 2.0, 3.0):
        n_c, n_d = outcome_grid(default_n_max(alpha))
        weights = c_function(n_c[:, None], n_d[:, None], chis[None, :], alpha) ** 2
        worst = max(worst, float(np.max(np.abs(weights.sum(axis=0) - 1.0))))
    results = [CheckResult("povm.normalization", "alpha 1-3", worst, 1e-10)]

    worst = 0.0
    sizes = range(1, 11)
    for n, alpha in itertools.product(sizes, (1.0, 2.0, 3.0)):
        n_c, n_d = outcome_grid(default_n_max(alpha))
        chis = np.arange(-n, n + 1) * math.pi / (2 * n)
        weights = c_function(n_c[:, None], n_d[:, None], chis[None, :], alpha) ** 2
        worst = max(worst, float(np.max(np.abs(weights.sum(axis=0) - 1.0))))
    results.append(CheckResult("povm.diagonal_completeness", _span(sizes), worst, 1e-8))

    worst = 0.0
    sizes = range(1, 13)
    for n in sizes:
        state = xx_polarized_state(n)
        probability = apply_sequence(state, OutcomeSequence.all_zero(1)).norm_sq
        worst = max(worst, abs(probability - math.comb(2 * n, n) / 4 ** n))
    results.append(CheckResult("povm.single_projection_probability", _span(sizes), worst, 1e-12))
    return results


def check_projectors(seed: int = 0) -> list[CheckResult]:
    sizes = range(1, 9)
    residuals = {"idempotent": 0.0, "hermitian": 0.0, "orthogonal": 0.0, "complete": 0.0, "eigenvectors": 0.0}
    for n, basis in itertools.product(sizes, (Basis.Z, Basis.X)):
        projectors = [projector_matrix(ProjectorSpec(n, delta, basis)) for delta in range(n + 1)]
        eye = np.eye((n + 1) ** 2)
        total = np.zeros_like(eye)
        rotation = rotation_matrix(n, math.pi / 2, 0.0) if basis is Basis.X else np.eye(n + 1)
        frame = np.kron(rotation, rotation)
        labels = np.abs(np.arange(eye.shape[0]) % (n + 1) - np.arange(eye.shape[0]) // (n + 1))
        for delta, p in enumerate(projectors):
            total += p
            residuals["idempotent"] = max(residuals["idempotent"], float(np.max(np.abs(p @ p - p))))
            residuals["hermitian"] = max(residuals["hermitian"], float(np.max(np.abs(p - p.T))))
            expected = frame * (labels == delta)[None, :]
            residuals["eigenvectors"] = max(residuals["eigenvectors"], float(np.max(np.abs(p @ frame - expected))))
            for other in projectors[delta + 1:]:
                residuals["orthogonal"] = max(residuals["orthogonal"], float(np.max(np.abs(p @ other))))
        residuals["complete"] = max(residuals["complete"], float(np.max(np.abs(total - eye))))
    return [CheckResult(f"projectors.{name}", _span(sizes), value, 1e-12) for name, value in residuals.items()]


def check_svd(seed: int = 0) -> list[CheckResult]:
    sizes = range(1, 7)
    commutator = max(verify_commuting_family(n) for n in sizes)
    reconstruction = 0.0
    orthogonality = 0.0
    for n in sizes:
        jsvd = compute_joint_svd(n, np.random.default_rng(seed))
        eye = np.eye(jsvd.dim)
        orthogonality = max(orthogonality, float(np.max(np.abs(jsvd.u.T @ jsvd.u - eye))),
                            float(np.max(np.abs(jsvd.v.T @ jsvd.v - eye))))
        for dz, dx in itertools.product(range(n + 1), repeat=2):
            dense = sequence_operator(n, OutcomeSequence.from_deltas([dz, dx]))
            reconstruction = max(reconstruction, float(np.max(np.abs(jsvd.reconstruct(dz, dx) - dense))))
    return [
        CheckResult("svd.commuting_family", _span(sizes), commutator, 1e-11),
        CheckResult("svd.orthogonality", _span(sizes), orthogonality, 1e-12),
        CheckResult("svd.reconstruction", _span(sizes), reconstruction, 1e-10),
    ]


def _compare_engines(state: TwoEnsembleState, sequence: OutcomeSequence, jsvd) -> tuple[float, float]:
    exact = apply_sequence(state, sequence)
    fast = jsvd.to_z(fast_apply_sequence(state, sequence, jsvd))
    return float(np.max(np.abs(exact.amps - fast.amps))), abs(exact.norm_sq - fast.norm_sq)


def check_fast(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    state_worst = probability_worst = 0.0
    sizes = range(1, 4)
    for n in sizes:
        jsvd = compute_joint_svd(n)
        state = random_state(n, rng)
        for length in (1, 2, 3):
            for sequence in enumerate_sequences(n, length):
                diff, prob = _compare_engines(state, sequence, jsvd)
                state_worst, probability_worst = max(state_worst, diff), max(probability_worst, prob)
    results = [
        CheckResult("fast.exhaustive_state", _span(sizes), state_worst, 1e-10),
        CheckResult("fast.exhaustive_probability", _span(sizes), probability_worst, 1e-10),
    ]

    decompositions = {n: compute_joint_svd(n) for n in range(1, 6)}
    state_worst = probability_worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 6))
        length = 2 * int(rng.integers(1, 6)) + int(rng.integers(0, 2))
        deltas = rng.integers(0, n + 1, size=length)
        diff, prob = _compare_engines(random_state(n, rng), OutcomeSequence.from_deltas(deltas), decompositions[n])
        state_worst, probability_worst = max(state_worst, diff), max(probability_worst, prob)
    results.append(CheckResult("fast.random_state", "1-5", state_worst, 1e-10))
    results.append(CheckResult("fast.random_probability", "1-5", probability_worst, 1e-10))
    return results


def _iterate_to_convergence(rho: DensityMatrix, jsvd, max_rounds: int = 500) -> tuple[np.ndarray, float]:
    """Run full rounds until the V-basis diagonal stops moving; also report the worst trace drift."""
    current = to_v_basis(rho, jsvd)
    drift = 0.0
    previous = current.diagonal()
    for _ in range(max_rounds):
        half = half_round(current, jsvd)
        current = other_half(half, jsvd)
        drift = max(drift, abs(half.trace() - 1.0), abs(current.trace() - 1.0))
        diagonal = current.diagonal()
        if np.max(np.abs(diagonal - previous)) < 1e-14:
            break
        previous = diagonal
    return current.diagonal(), drift


def check_mixed(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    sizes = (2, 5)
    agreement = drift = column_sums = 0.0
    for n in sizes:
        jsvd = compute_joint_svd(n)
        transition = build_transition_matrix(jsvd)
        column_sums = max(column_sums, float(np.max(np.abs(transition.column_sums() - 1.0))))
        initial_states = (
            DensityMatrix.from_state(xx_polarized_state(n)),
            DensityMatrix.from_state(random_state(n, rng)),
            maximally_mixed(n, Basis.Z),
        )
        for rho in initial_states:
            iterated, rho_drift = _iterate_to_convergence(rho, jsvd)
            start = DiagonalDistribution(to_v_basis(rho, jsvd).diagonal())
            fixed = steady_state(transition, start)
            agreement = max(agreement, float(np.max(np.abs(fixed.values - iterated / iterated.sum()))))
            drift = max(drift, rho_drift)
    return [
        CheckResult("mixed.fixed_point_agreement", _span(sizes), agreement, 1e-8),
        CheckResult("mixed.trace_drift", _span(sizes), drift, 1e-12),
        CheckResult("mixed.column_sums", _span(sizes), column_sums, 1e-10),
    ]


def check_vbasis(seed: int = 0) -> list[CheckResult]:
    sizes = (2, 5, 10)
    size_error = epr_error = noon_error = positivity = maximal_error = 0.0
    for n in sizes:
        jsvd = compute_joint_svd(n)
        counts = np.bincount([label.sector for label in classify_sectors(jsvd)], minlength=n + 1)
        expected = np.array([sector_size(n, delta) for delta in range(n + 1)])
        size_error = max(size_error, float(np.max(np.abs(counts - expected))))
        overlap = abs(float(jsvd.v[:, epr_column(jsvd)] @ epr_state(n).amps.real))
        epr_error = max(epr_error, 1.0 - overlap)
        spectrum = entanglement_spectrum(jsvd)
        maximal = sum(1 for entry in spectrum if abs(entry.ratio - 1.0) < 1e-8)
        maximal_error = max(maximal_error, float(abs(maximal - 1)))
        for entry in spectrum:
            if entry.sector == n:
                noon_error = max(noon_error, abs(entry.entropy - 1.0))
            if not 0.0 < entry.ratio <= 1.0 + 1e-12:
                positivity = max(positivity, 1.0)
    return [
        CheckResult("vbasis.sector_sizes", _span(sizes), size_error, 0.5),
        CheckResult("vbasis.epr_column", _span(sizes), epr_error, 1e-8),
        CheckResult("vbasis.noon_entropy", _span(sizes), noon_error, 1e-10),
        CheckResult("vbasis.entropy_range", _span(sizes), positivity, 0.5),
        CheckResult("vbasis.single_maximal_column", _span(sizes), maximal_error, 0.5),
    ]


def column_match_residual(computed: np.ndarray, reference: np.ndarray, degenerate_blocks) -> float:
    """
    Worst deviation between two orthogonal matrices compared up to signed
    column permutation; columns in a degenerate block are compared by span.
    """
    overlaps = np.abs(reference.T @ computed)
    blocked = {column for block in degenerate_blocks for column in block}
    used = set()
    residual = 0.0
    for j in range(reference.shape[1]):
        if j in blocked:
            continue
        best = int(np.argmax(overlaps[j]))
        used.add(best)
        sign = np.sign(reference[:, j] @ computed[:, best]) or 1.0
        residual = max(residual, float(np.max(np.abs(sign * computed[:, best] - reference[:, j]))))
    for block in degenerate_blocks:
        block = list(block)
        weight = np.sum(overlaps[block] ** 2, axis=0)
        chosen = list(np.argsort(-weight, kind="stable")[:len(block)])
        used.update(int(c) for c in chosen)
        expected = reference[:, block] @ reference[:, block].T
        found = computed[:, chosen] @ computed[:, chosen].T
        residual = max(residual, float(np.max(np.abs(expected - found))))
    if len(used) != reference.shape[1]:
        return math.inf
    return residual


def check_reference_case(seed: int = 0) -> list[CheckResult]:
    n = reference_fixtures.N
    jsvd = compute_joint_svd(n, np.random.default_rng(seed))
    rotation = rotation_matrix(n, math.pi / 2, 0.0)
    t00 = sequence_operator(n, OutcomeSequence.from_deltas([0, 0]))
    t22 = sequence_operator(n, OutcomeSequence.from_deltas([2, 2]))
    lambda_error = max(
        float(np.max(np.abs(np.abs(jsvd.factor(0, 0).dense()) - reference_fixtures.lambda_dense(reference_fixtures.LAMBDA_00)))),
        float(np.max(np.abs(np.abs(jsvd.factor(2, 2).dense()) - reference_fixtures.lambda_dense(reference_fixtures.LAMBDA_22)))),
    )
    reconstruction = max(
        float(np.max(np.abs(jsvd.reconstruct(dz, dx) - sequence_operator(n, OutcomeSequence.from_deltas([dz, dx])))))
        for dz, dx in itertools.product(range(n + 1), repeat=2)
    )
    return [
        CheckResult("appendixB.rotation", "2", float(np.max(np.abs(np.kron(rotation, rotation) - reference_fixtures.X_ROTATION))), 1e-12),
        CheckResult("appendixB.T00", "2", float(np.max(np.abs(t00 - reference_fixtures.T00))), 1e-12),
        CheckResult("appendixB.T22", "2", float(np.max(np.abs(t22 - reference_fixtures.T22))), 1e-12),
        CheckResult("appendixB.lambda", "2", lambda_error, 1e-12),
        CheckResult("appendixB.U", "2", column_match_residual(jsvd.u, reference_fixtures.U, reference_fixtures.U_DEGENERATE_BLOCKS), 1e-10),
        CheckResult("appendixB.V", "2", column_match_residual(jsvd.v, reference_fixtures.V, reference_fixtures.V_DEGENERATE_BLOCKS), 1e-10),
        CheckResult("appendixB.reconstruction", "2", reconstruction, 1e-12),
    ]


SUITES = {
    "povm": check_povm,
    "projectors": check_projectors,
    "svd": check_svd,
    "fast": check_fast,
    "mixed": check_mixed,
    "vbasis": check_vbasis,
    "appendixB": check_reference_case,
}


def run_suite(name: str, seed: int = 0) -> list[CheckResult]:
    if name == "all":
        return [result for suite in SUITES.values() for result in suite(seed)]
    if name not in SUITES:
        raise ConfigurationError(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}")
    results = SUITES[name](seed)
    failed = sum(not r.passed for r in results)
    logger.info("suite %s: %d checks, %d failed", name, len(results), failed)
    return results
