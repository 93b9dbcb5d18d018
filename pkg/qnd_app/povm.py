"""
Photon-counting QND readout: C-function POVM elements, outcome statistics,
sampling and the outcome -> Fock-offset map.

All C-function magnitudes are evaluated in log space with explicit sign
tracking, so photon numbers in the thousands (alpha ~ 50) stay finite.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .ensemble import (
    Basis,
    TwoEnsembleState,
    from_x_frame,
    signed_offsets,
    to_x_frame,
)
from .exceptions import (
    BasisMismatchError,
    DomainError,
    SingularInputError,
    TruncationError,
    UndefinedOffsetError,
)

logger = logging.getLogger(__name__)

SAMPLING_MASS_TOL = 1e-9


@dataclass(frozen=True)
class PhotonOutcome:
    n_c: int
    n_d: int

    def __post_init__(self):
        if self.n_c < 0 or self.n_d < 0:
            raise DomainError(f"photon counts must be nonnegative, got ({self.n_c}, {self.n_d})")

    @property
    def total(self) -> int:
        return self.n_c + self.n_d


@dataclass(frozen=True)
class PovmParams:
    alpha: float
    tau: float
    n_max: int | None = None

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError(f"alpha must be nonnegative, got {self.alpha}")
        if self.tau <= 0:
            raise DomainError(f"tau must be positive, got {self.tau}")
        if self.n_max is None:
            object.__setattr__(self, "n_max", default_n_max(self.alpha))

    @classmethod
    def sharp(cls, n: int, alpha: float) -> "PovmParams":
        """Parameters at the sharp-projection time tau = pi / 2N."""
        return cls(alpha=alpha, tau=math.pi / (2 * n))


def default_n_max(alpha: float) -> int:
    return int(math.ceil(alpha ** 2 + 10 * alpha + 20))


def _log_power(count, log_base):
    with np.errstate(invalid="ignore"):
        return np.where(count > 0, count * log_base, 0.0)


def log_c_function(n_c, n_d, chi, alpha: float):
    """(log|C|, sign) of the C-function, broadcasting over all arguments."""
    n_c = np.asarray(n_c)
    n_d = np.asarray(n_d)
    chi = np.asarray(chi, dtype=float)
    cos, sin = np.cos(chi), np.sin(chi)
    with np.errstate(divide="ignore"):
        log_alpha = np.log(alpha) if alpha > 0 else -np.inf
        log_cos = np.log(np.abs(cos))
        log_sin = np.log(np.abs(sin))
    log_mag = (
        _log_power(n_c + n_d, log_alpha)
        - 0.5 * alpha ** 2
        + _log_power(n_c, log_cos)
        + _log_power(n_d, log_sin)
        - 0.5 * (gammaln(n_c + 1) + gammaln(n_d + 1))
    )
    return log_mag, _sign(n_c, n_d, cos, sin)


def _sign(n_c, n_d, cos, sin):
    negative = ((n_c % 2 == 1) & (cos < 0)) ^ ((n_d % 2 == 1) & (sin < 0))
    return np.where(negative, -1.0, 1.0)


def c_function(n_c, n_d, chi, alpha: float):
    """alpha^(nc+nd) e^(-alpha^2/2) cos^nc(chi) sin^nd(chi) / sqrt(nc! nd!)."""
    log_mag, sign = log_c_function(n_c, n_d, chi, alpha)
    value = sign * np.exp(log_mag)
    return float(value) if np.ndim(value) == 0 else value


def c_function_bright(n_c, n_d, chi, alpha: float):
    """Gaussian bright-light approximation, valid for n_d > 0."""
    n_c = np.asarray(n_c)
    n_d = np.asarray(n_d)
    chi = np.asarray(chi, dtype=float)
    if np.any(n_d < 1):
        raise DomainError("the bright-light form needs n_d >= 1; use c_function_nd0")
    sin2_double = np.sin(2 * chi) ** 2
    if np.any(sin2_double < 1e-30):
        raise SingularInputError("sin(2 chi) = 0 leaves the Gaussian envelope undefined")
    total = n_c + n_d
    log_mag = (
        _log_power(total, np.log(alpha) if alpha > 0 else -np.inf)
        - 0.5 * alpha ** 2
        - 0.5 * gammaln(total + 1)
        - 0.25 * np.log(0.5 * np.pi * total * sin2_double)
        - total / sin2_double * (np.sin(chi) ** 2 - n_d / total) ** 2
    )
    value = _sign(n_c, n_d, np.cos(chi), np.sin(chi)) * np.exp(log_mag)
    return float(value) if np.ndim(value) == 0 else value


def c_function_nd0(n_c, chi, alpha: float):
    """Approximation for the n_d = 0 outcomes."""
    n_c = np.asarray(n_c)
    chi = np.asarray(chi, dtype=float)
    log_alpha = np.log(alpha) if alpha > 0 else -np.inf
    log_mag = (
        _log_power(n_c, log_alpha)
        - 0.5 * alpha ** 2
        - 0.5 * gammaln(n_c + 1)
        - 0.5 * n_c * np.sin(chi) ** 2
    )
    value = np.exp(log_mag)
    return float(value) if np.ndim(value) == 0 else value


def _require_readout_basis(state: TwoEnsembleState):
    if state.basis not in (Basis.Z, Basis.X):
        raise BasisMismatchError(f"readout acts on z- or x-basis amplitudes, got {state.basis.value}")


def povm_apply(state: TwoEnsembleState, outcome: PhotonOutcome, params: PovmParams) -> TwoEnsembleState:
    """Multiply every amplitude by C[(k1 - k2) tau]; the result is unnormalized."""
    _require_readout_basis(state)
    chi = signed_offsets(state.n) * params.tau
    factors = c_function(outcome.n_c, outcome.n_d, chi, params.alpha)
    return state.with_amps(state.amps * factors)


def outcome_probability(state: TwoEnsembleState, outcome: PhotonOutcome, params: PovmParams) -> float:
    return povm_apply(state, outcome, params).norm_sq


@dataclass(frozen=True, eq=False)
class OutcomeTable:
    """Probabilities over the triangular grid n_c + n_d <= n_max."""

    n_c: np.ndarray
    n_d: np.ndarray
    probabilities: np.ndarray

    @property
    def mass(self) -> float:
        return float(self.probabilities.sum())

    def probability_of(self, outcome: PhotonOutcome) -> float:
        hit = (self.n_c == outcome.n_c) & (self.n_d == outcome.n_d)
        return float(self.probabilities[hit].sum())


def outcome_grid(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    n_c, n_d = np.meshgrid(np.arange(n_max + 1), np.arange(n_max + 1), indexing="ij")
    keep = (n_c + n_d) <= n_max
    return n_c[keep], n_d[keep]


def outcome_table(state: TwoEnsembleState, params: PovmParams) -> OutcomeTable:
    _require_readout_basis(state)
    n = state.n
    offsets = np.arange(-n, n + 1)
    weights = np.bincount(signed_offsets(n) + n, weights=np.abs(state.amps) ** 2, minlength=2 * n + 1)
    weights = weights / state.norm_sq
    occupied = weights > 0
    n_c, n_d = outcome_grid(params.n_max)
    log_mag, _ = log_c_function(n_c[None, :], n_d[None, :], offsets[occupied, None] * params.tau, params.alpha)
    probabilities = weights[occupied] @ np.exp(2 * log_mag)
    return OutcomeTable(n_c, n_d, probabilities)


def sample_outcome(state: TwoEnsembleState, params: PovmParams, rng: np.random.Generator,
                   table: OutcomeTable | None = None) -> PhotonOutcome:
    """Draw one photon outcome by inverse CDF over the truncated grid."""
    table = table or outcome_table(state, params)
    mass = table.mass
    if mass < 1.0 - SAMPLING_MASS_TOL:
        raise TruncationError(f"outcome grid holds only {mass:.12f} of the probability; raise n_max", mass)
    cumulative = np.cumsum(table.probabilities)
    pick = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    pick = min(pick, cumulative.shape[0] - 1)
    return PhotonOutcome(int(table.n_c[pick]), int(table.n_d[pick]))


@dataclass(frozen=True)
class OffsetEstimate:
    magnitude: int
    residual: float

    @property
    def candidates(self) -> tuple[int, int]:
        return self.magnitude, -self.magnitude


def delta_from_outcome(outcome: PhotonOutcome, tau: float) -> OffsetEstimate:
    """Invert sin^2[(k1 - k2) tau] = n_d / (n_c + n_d) for the Fock offset."""
    if outcome.total == 0:
        raise UndefinedOffsetError("no photons detected: the offset is undefined")
    raw = math.asin(math.sqrt(outcome.n_d / outcome.total)) / tau
    magnitude = int(round(raw))
    return OffsetEstimate(magnitude, abs(raw - magnitude))


@dataclass
class PovmTrajectory:
    bases: list[Basis] = field(default_factory=list)
    outcomes: list[PhotonOutcome] = field(default_factory=list)
    # None where no photons were counted
    offsets: list[OffsetEstimate | None] = field(default_factory=list)
    step_probs: list[float] = field(default_factory=list)
    step_states: list[TwoEnsembleState] = field(default_factory=list)

    @property
    def joint_prob(self) -> float:
        return float(np.prod(self.step_probs)) if self.step_probs else 1.0


def sample_povm_trajectory(state: TwoEnsembleState, total_projections: int, params: PovmParams,
                           rng: np.random.Generator) -> PovmTrajectory:
    """
    Finite-alpha trajectory: alternate z and x readouts, sample photon counts,
    apply the POVM in the readout basis and infer the offset from the counts.
    """
    if state.basis is not Basis.Z:
        raise BasisMismatchError("trajectories start from a z-basis state")
    trajectory = PovmTrajectory()
    current = state.normalized()
    for step in range(total_projections):
        basis = Basis.Z if step % 2 == 0 else Basis.X
        frame = current if basis is Basis.Z else to_x_frame(current)
        table = outcome_table(frame, params)
        outcome = sample_outcome(frame, params, rng, table)
        projected = povm_apply(frame, outcome, params)
        probability = projected.norm_sq
        projected = projected.normalized()
        current = projected if basis is Basis.Z else from_x_frame(projected)
        trajectory.bases.append(basis)
        trajectory.outcomes.append(outcome)
        trajectory.offsets.append(delta_from_outcome(outcome, params.tau) if outcome.total else None)
        trajectory.step_probs.append(probability)
        trajectory.step_states.append(current)
    logger.debug("finite-alpha trajectory: %d readouts, joint probability %.3e",
                 total_projections, trajectory.joint_prob)
    return trajectory
