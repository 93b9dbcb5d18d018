"""
Two-ensemble Fock space: states, collective spin operators, rotations and
entanglement measures.

Flat layout: amplitude of |k1, k2> sits at index k2*(N+1) + k1, so the
(N+1)x(N+1) grid view is indexed [k2, k1].
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .exceptions import BasisMismatchError, DomainError

logger = logging.getLogger(__name__)

NORMALIZED_TOL = 1e-10


class Basis(str, Enum):
    Z = "z"
    X = "x"
    V = "V"
    U = "U"
    CUSTOM = "custom"


class SpinAxis(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"


def dimension(n: int) -> int:
    return (n + 1) ** 2


def check_size(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"ensemble size N must be a positive integer, got {n!r}")
    return int(n)


def flat_index(n: int, k1: int, k2: int) -> int:
    return k2 * (n + 1) + k1


def signed_offsets(n: int) -> np.ndarray:
    """k1 - k2 for every flat index."""
    index = np.arange(dimension(n))
    return index % (n + 1) - index // (n + 1)


@dataclass(frozen=True, eq=False)
class TwoEnsembleState:
    """
    Amplitude vector over the (N+1)^2 two-ensemble basis, tagged with the basis
    the amplitudes refer to. Amplitudes are copied and frozen on construction.
    """

    n: int
    amps: np.ndarray
    basis: Basis = Basis.Z
    angles: tuple[float, float] | None = None
    norm_sq: float = field(init=False)

    def __post_init__(self):
        n = check_size(self.n)
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != dimension(n):
            raise DomainError(f"expected {dimension(n)} amplitudes for N={n}, got {amps.shape[0]}")
        if self.basis is Basis.CUSTOM and self.angles is None:
            raise DomainError("custom-basis states need (theta, phi) angles")
        amps.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "norm_sq", float(np.vdot(amps, amps).real))

    @property
    def dim(self) -> int:
        return dimension(self.n)

    def is_normalized(self) -> bool:
        return abs(self.norm_sq - 1.0) < NORMALIZED_TOL

    def normalized(self) -> "TwoEnsembleState":
        if self.norm_sq <= 0.0:
            raise DomainError("cannot normalize a zero-norm state")
        return self.with_amps(self.amps / np.sqrt(self.norm_sq))

    def with_amps(self, amps: np.ndarray, basis: Basis | None = None,
                  angles: tuple[float, float] | None = None) -> "TwoEnsembleState":
        basis = self.basis if basis is None else basis
        if basis is Basis.CUSTOM and angles is None:
            angles = self.angles
        return TwoEnsembleState(self.n, amps, basis, angles if basis is Basis.CUSTOM else None)

    def inner(self, other: "TwoEnsembleState") -> complex:
        """<self|other>; both states must be expressed in the same basis."""
        _require_same_basis(self, other)
        return complex(np.vdot(self.amps, other.amps))

    def amplitude_grid(self) -> np.ndarray:
        return self.amps.reshape(self.n + 1, self.n + 1)

    def to_json(self) -> str:
        interleaved = np.empty(2 * self.dim)
        interleaved[0::2] = self.amps.real
        interleaved[1::2] = self.amps.imag
        return json.dumps({
            "N": self.n,
            "basis": self.basis.value,
            "angles": list(self.angles) if self.angles else None,
            "amps": interleaved.tolist(),
        })

    @classmethod
    def from_json(cls, payload: str) -> "TwoEnsembleState":
        data = json.loads(payload)
        interleaved = np.asarray(data["amps"], dtype=float)
        amps = interleaved[0::2] + 1j * interleaved[1::2]
        angles = tuple(data["angles"]) if data.get("angles") else None
        return cls(int(data["N"]), amps, Basis(data["basis"]), angles)


def _require_same_basis(a: TwoEnsembleState, b: TwoEnsembleState):
    if a.n != b.n:
        raise DomainError(f"ensemble sizes differ: {a.n} vs {b.n}")
    if a.basis is not b.basis or a.angles != b.angles:
        raise BasisMismatchError(f"states are in different bases: {a.basis.value} vs {b.basis.value}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n: int
    entries: np.ndarray
    basis: Basis = Basis.Z
    trace_value: float = field(init=False)

    def __post_init__(self):
        n = check_size(self.n)
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.shape != (dimension(n), dimension(n)):
            raise DomainError(f"density matrix for N={n} must be {dimension(n)}x{dimension(n)}")
        asymmetry = np.max(np.abs(entries - entries.conj().T))
        if asymmetry > 1e-12:
            raise DomainError(f"density matrix is not Hermitian (deviation {asymmetry:.2e})")
        entries.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "trace_value", float(np.trace(entries).real))

    @classmethod
    def from_state(cls, state: TwoEnsembleState) -> "DensityMatrix":
        psi = state.normalized().amps
        return cls(state.n, np.outer(psi, psi.conj()), state.basis)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def validate(self) -> "DensityMatrix":
        min_eig = float(np.linalg.eigvalsh(self.entries).min())
        if min_eig < -1e-10:
            raise DomainError(f"density matrix has negative eigenvalue {min_eig:.3e}")
        if abs(self.trace() - self.trace_value) > 1e-10:
            raise DomainError("density matrix trace drifted from its recorded value")
        return self


def maximally_mixed(n: int, basis: Basis = Basis.V) -> DensityMatrix:
    d = dimension(check_size(n))
    return DensityMatrix(n, np.eye(d) / d, basis)


def fock_state(n: int, k1: int, k2: int) -> TwoEnsembleState:
    n = check_size(n)
    if not (0 <= k1 <= n and 0 <= k2 <= n):
        raise DomainError(f"Fock labels ({k1}, {k2}) outside [0, {n}]")
    amps = np.zeros(dimension(n), dtype=np.complex128)
    amps[flat_index(n, k1, k2)] = 1.0
    return TwoEnsembleState(n, amps)


def coherent_amplitudes(n: int, theta: float, phi: float) -> np.ndarray:
    """Single-ensemble spin coherent amplitudes sqrt(C(N,k)) e^{i(N-k)phi} cos^k sin^(N-k)."""
    k = np.arange(n + 1)
    log_binom = 0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    # 0**0 == 1 keeps the polarized limits exact
    magnitude = np.exp(log_binom) * np.power(c, k) * np.power(s, n - k)
    return magnitude * np.exp(1j * (n - k) * phi)


def spin_coherent_pair(n: int, theta: float, phi: float) -> TwoEnsembleState:
    n = check_size(n)
    single = coherent_amplitudes(n, theta, phi)
    return TwoEnsembleState(n, np.outer(single, single).reshape(-1))


def xx_polarized_state(n: int) -> TwoEnsembleState:
    return spin_coherent_pair(n, np.pi / 2, 0.0)


def epr_state(n: int) -> TwoEnsembleState:
    n = check_size(n)
    grid = np.eye(n + 1, dtype=np.complex128) / np.sqrt(n + 1)
    return TwoEnsembleState(n, grid.reshape(-1))


def noon_state(n: int, sign: int = 1) -> TwoEnsembleState:
    n = check_size(n)
    amps = np.zeros(dimension(n), dtype=np.complex128)
    amps[flat_index(n, n, 0)] = 1 / np.sqrt(2)
    amps[flat_index(n, 0, n)] = sign / np.sqrt(2)
    return TwoEnsembleState(n, amps)


def random_state(n: int, rng: np.random.Generator) -> TwoEnsembleState:
    n = check_size(n)
    d = dimension(n)
    amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return TwoEnsembleState(n, amps / np.linalg.norm(amps))


def spin_matrix(n: int, axis: SpinAxis) -> np.ndarray:
    """Collective spin operator of one ensemble, with S^z = diag(2k - N)."""
    n = check_size(n)
    axis = SpinAxis(axis)
    k = np.arange(n + 1)
    if axis is SpinAxis.Z:
        return np.diag(2.0 * k - n)
    # e^dagger g |k> = sqrt((k+1)(N-k)) |k+1>
    raise_ = np.diag(np.sqrt((k[:-1] + 1.0) * (n - k[:-1])), -1)
    if axis is SpinAxis.X:
        return raise_ + raise_.T
    return -1j * raise_ + 1j * raise_.T


def rotation_matrix(n: int, theta: float, phi: float) -> np.ndarray:
    """
    Single-ensemble factor of the basis rotation, exp(-i S^z phi/2) exp(+i S^y theta/2).

    The S^y exponential is evaluated through the eigendecomposition of the
    explicit S^y matrix. Real-valued when phi == 0.
    """
    n = check_size(n)
    eigvals, eigvecs = np.linalg.eigh(spin_matrix(n, SpinAxis.Y))
    about_y = (eigvecs * np.exp(0.5j * theta * eigvals)) @ eigvecs.conj().T
    if phi == 0:
        return np.ascontiguousarray(about_y.real)
    phases = np.exp(-0.5j * phi * (2.0 * np.arange(n + 1) - n))
    return phases[:, None] * about_y


def two_mode_apply(factor: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """
    Apply factor (x) factor to flat vectors (shape (dim,) or (dim, m)) without
    forming the (N+1)^2 x (N+1)^2 matrix.
    """
    side = factor.shape[0]
    if vectors.ndim == 1:
        grid = vectors.reshape(side, side)
        return (factor @ grid @ factor.T).reshape(-1)
    stacked = vectors.reshape(side, side, vectors.shape[1])
    out = np.einsum('ai,bj,ijm->abm', factor, factor, stacked, optimize=True)
    return out.reshape(side * side, vectors.shape[1])


def apply_two_mode_rotation(state: TwoEnsembleState, theta: float, phi: float,
                            direction: str = "forward") -> TwoEnsembleState:
    rotation = rotation_matrix(state.n, theta, phi)
    if direction == "inverse":
        rotation = rotation.conj().T
    elif direction != "forward":
        raise DomainError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return state.with_amps(two_mode_apply(rotation, state.amps))


def partial_trace_first(value: TwoEnsembleState | DensityMatrix) -> np.ndarray:
    """Reduced density matrix of ensemble 1, indexed [k1, k1']."""
    side = value.n + 1
    if isinstance(value, DensityMatrix):
        tensor = value.entries.reshape(side, side, side, side)
        reduced = np.einsum('aiaj->ij', tensor)
    else:
        grid = value.amplitude_grid()
        reduced = grid.T @ grid.conj()
    trace = float(np.trace(reduced).real)
    if trace <= 0.0:
        raise DomainError("cannot take the partial trace of a zero-norm input")
    reduced = reduced / trace
    return 0.5 * (reduced + reduced.conj().T)


def von_neumann_entropy(matrix: np.ndarray) -> float:
    """Entropy in bits of a density matrix, with 0 log 0 = 0."""
    eigvals = np.clip(np.linalg.eigvalsh(matrix), 0.0, None)
    eigvals = eigvals[eigvals > 1e-15]
    return float(max(0.0, -np.sum(eigvals * np.log2(eigvals))))


def entanglement_entropy(state: TwoEnsembleState) -> float:
    if state.norm_sq <= 0.0:
        raise DomainError("entanglement entropy of a zero-norm state is undefined")
    return von_neumann_entropy(partial_trace_first(state))


def density_entropy(rho: DensityMatrix) -> float:
    return von_neumann_entropy(rho.entries / rho.trace())


def fidelity_to(state: TwoEnsembleState, target: TwoEnsembleState) -> float:
    if state.norm_sq <= 0.0:
        raise DomainError("fidelity of a zero-norm state is undefined")
    if not target.is_normalized():
        raise DomainError("fidelity target must be normalized")
    overlap = target.inner(state)
    return float(min(1.0, abs(overlap) ** 2 / state.norm_sq))


def to_x_frame(state: TwoEnsembleState) -> TwoEnsembleState:
    """Re-express z-basis amplitudes in the x-rotated Fock basis."""
    if state.basis is not Basis.Z:
        raise BasisMismatchError(f"expected a z-basis state, got {state.basis.value}")
    rotation = rotation_matrix(state.n, np.pi / 2, 0.0)
    return state.with_amps(two_mode_apply(rotation.T, state.amps), basis=Basis.X)


def from_x_frame(state: TwoEnsembleState) -> TwoEnsembleState:
    if state.basis is not Basis.X:
        raise BasisMismatchError(f"expected an x-basis state, got {state.basis.value}")
    rotation = rotation_matrix(state.n, np.pi / 2, 0.0)
    return state.with_amps(two_mode_apply(rotation, state.amps), basis=Basis.Z)
