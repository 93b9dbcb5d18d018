"""
Joint singular-value decomposition of the two-projector products
T_{dz,dx} = P^x_dx P^z_dz = U Lambda_{dz,dx} V^T.

Every T shares the same orthogonal U and V, and every Lambda has at most one
nonzero per row and column, so a Lambda acts as a weighted partial
permutation. V is built block by block inside each z sector from the
commuting family R_dx = P^z_dz P^x_dx P^z_dz, U inside each x sector from
P^x_dx P^z_dz P^x_dx. Ties that the family leaves open are broken with the
exchange, inversion and total-spin symmetries, all of which commute with
every projector.

Column order is fixed:
  V: z sector, then descending x-sector profile, total spin, exchange, inversion.
  U: lowest z sector it touches, x sector, then descending z-sector profile
     and the same symmetry labels.
Each column's first entry above SIGN_TOL is positive.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .config import dense_limit, svd_max_n
from .ensemble import (
    Basis,
    SpinAxis,
    TwoEnsembleState,
    check_size,
    dimension,
    from_x_frame,
    rotation_matrix,
    spin_matrix,
    two_mode_apply,
)
from .exceptions import DenseLimitError, DomainError, StructuralError
from .projectors import ProjectorSpec, projector_matrix, sector_indices, sector_labels, sector_size

logger = logging.getLogger(__name__)

EPS_LAMBDA = 1e-10
EPS_DIAG = 1e-9
SIGN_TOL = 1e-10
PROFILE_DECIMALS = 9
LABEL_DECIMALS = 6
MAX_RETRIES = 5
DEFAULT_SEED = 0x5EED


def gram_matrix(n: int, dz: int, dx: int) -> np.ndarray:
    """Dense R = P^z_dz P^x_dx P^z_dz."""
    limit = dense_limit()
    if n > limit:
        raise DenseLimitError(n, limit)
    z_mask = np.zeros((n + 1) ** 2)
    z_mask[sector_indices(n, dz)] = 1.0
    px = projector_matrix(ProjectorSpec(n, dx, Basis.X))
    return z_mask[:, None] * px * z_mask[None, :]


def verify_commuting_family(n: int) -> float:
    """Largest entry of any commutator [R, R'] over all (dz, dx) pairs."""
    family = [gram_matrix(n, dz, dx) for dz in range(n + 1) for dx in range(n + 1)]
    worst = 0.0
    for first, second in itertools.combinations(family, 2):
        worst = max(worst, float(np.max(np.abs(first @ second - second @ first))))
    return worst


@dataclass(frozen=True, eq=False)
class LambdaFactor:
    """
    Sparse Lambda_{dz,dx}: entry (rows[i], cols[i]) holds amplitudes[i]; rows
    index U columns, cols index V columns.
    """

    dz: int
    dx: int
    dim: int
    rows: np.ndarray
    cols: np.ndarray
    amplitudes: np.ndarray
    forward_index: np.ndarray = field(init=False, repr=False)
    forward_amp: np.ndarray = field(init=False, repr=False)
    inverse_index: np.ndarray = field(init=False, repr=False)
    inverse_amp: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        amplitudes = np.asarray(self.amplitudes, dtype=float)
        if not rows.shape == cols.shape == amplitudes.shape:
            raise StructuralError("Lambda rows, cols and amplitudes differ in length")
        if np.unique(rows).size != rows.size or np.unique(cols).size != cols.size:
            raise StructuralError(f"Lambda({self.dz},{self.dx}) is not a partial permutation")
        if amplitudes.size and np.max(np.abs(amplitudes)) > 1.0 + 1e-9:
            raise StructuralError(f"Lambda({self.dz},{self.dx}) has an entry above 1")
        forward_index = np.full(self.dim, -1, dtype=np.int64)
        forward_amp = np.zeros(self.dim)
        inverse_index = np.full(self.dim, -1, dtype=np.int64)
        inverse_amp = np.zeros(self.dim)
        forward_index[cols] = rows
        forward_amp[cols] = amplitudes
        inverse_index[rows] = cols
        inverse_amp[rows] = amplitudes
        for name, value in (("rows", rows), ("cols", cols), ("amplitudes", amplitudes),
                            ("forward_index", forward_index), ("forward_amp", forward_amp),
                            ("inverse_index", inverse_index), ("inverse_amp", inverse_amp)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return int(self.rows.size)

    def dense(self) -> np.ndarray:
        matrix = np.zeros((self.dim, self.dim))
        matrix[self.rows, self.cols] = self.amplitudes
        return matrix


def permute_forward(factor: LambdaFactor, k: int) -> tuple[int, float] | None:
    """V index k -> (U index k', amplitude), or None when column k of Lambda is empty."""
    target = int(factor.forward_index[k])
    return None if target < 0 else (target, float(factor.forward_amp[k]))


def permute_inverse(factor: LambdaFactor, k_prime: int) -> tuple[int, float] | None:
    """U index k' -> (V index k, amplitude), or None when row k' of Lambda is empty."""
    target = int(factor.inverse_index[k_prime])
    return None if target < 0 else (target, float(factor.inverse_amp[k_prime]))


@dataclass(frozen=True, eq=False)
class JointSVD:
    n: int
    u: np.ndarray
    v: np.ndarray
    factors: dict[tuple[int, int], LambdaFactor]

    @property
    def dim(self) -> int:
        return dimension(self.n)

    def factor(self, dz: int, dx: int) -> LambdaFactor:
        if not (0 <= dz <= self.n and 0 <= dx <= self.n):
            raise DomainError(f"(dz, dx) = ({dz}, {dx}) outside [0, {self.n}]")
        return self.factors[(dx, dz)]

    def reconstruct(self, dz: int, dx: int) -> np.ndarray:
        """U Lambda_{dz,dx} V^T, for checking against P^x_dx P^z_dz."""
        lam = self.factor(dz, dx)
        return self.u[:, lam.rows] @ (lam.amplitudes[:, None] * self.v[:, lam.cols].T)

    def v_sectors(self) -> np.ndarray:
        return sector_labels(self.n)[np.argmax(np.abs(self.v), axis=0)]

    def to_z(self, state: TwoEnsembleState) -> TwoEnsembleState:
        self._check(state)
        if state.basis is Basis.Z:
            return state
        if state.basis is Basis.X:
            return from_x_frame(state)
        if state.basis is Basis.V:
            return state.with_amps(self.v @ state.amps, basis=Basis.Z)
        if state.basis is Basis.U:
            return state.with_amps(self.u @ state.amps, basis=Basis.Z)
        rotation = rotation_matrix(state.n, *state.angles)
        return state.with_amps(two_mode_apply(rotation, state.amps), basis=Basis.Z)

    def express(self, state: TwoEnsembleState) -> TwoEnsembleState:
        """Re-express a state in the V basis."""
        self._check(state)
        if state.basis is Basis.V:
            return state
        z_state = self.to_z(state)
        return z_state.with_amps(self.v.T @ z_state.amps, basis=Basis.V)

    def _check(self, state: TwoEnsembleState):
        if state.n != self.n:
            raise DomainError(f"state has N={state.n}, decomposition has N={self.n}")


def symmetry_generators(n: int) -> list[np.ndarray]:
    """
    Exchange of the ensembles, joint inversion k -> N-k, and the total spin of
    ensemble 1 with the spin-flipped ensemble 2. Real symmetric, commuting with
    every P^z and P^x.
    """
    side = n + 1
    d = side * side
    grid = np.arange(d).reshape(side, side)
    exchange = np.zeros((d, d))
    exchange[grid.reshape(-1), grid.T.reshape(-1)] = 1.0
    flip = rotation_matrix(n, np.pi, 0.0)
    inversion = np.kron(flip, flip)
    eye = np.eye(side)
    total = np.zeros((d, d), dtype=np.complex128)
    for axis, sign in ((SpinAxis.X, -1.0), (SpinAxis.Y, 1.0), (SpinAxis.Z, -1.0)):
        s = spin_matrix(n, axis)
        total += np.kron(eye, s @ s) + np.kron(s @ s, eye) + 2 * sign * np.kron(s, s)
    return [inversion, exchange, total.real]


def _spectral_scale(operators: list[np.ndarray]) -> list[np.ndarray]:
    scaled = []
    for op in operators:
        norm = np.linalg.norm(op, 2)
        scaled.append(op / norm if norm > 0 else op)
    return scaled


def _offdiagonal(basis: np.ndarray, op: np.ndarray) -> float:
    projected = basis.T @ op @ basis
    return float(np.max(np.abs(projected - np.diag(projected.diagonal())), initial=0.0))


def _split_degenerate(vectors: np.ndarray, operators: list[np.ndarray], position: int) -> np.ndarray:
    """Diagonalize operator `position` inside span(vectors), then recurse into each cluster."""
    if position == len(operators) or vectors.shape[1] == 1:
        return vectors
    restricted = vectors.T @ operators[position] @ vectors
    values, rotation = np.linalg.eigh(0.5 * (restricted + restricted.T))
    vectors = vectors @ rotation
    start = 0
    while start < values.size:
        stop = start + 1
        while stop < values.size and abs(values[stop] - values[start]) < EPS_DIAG:
            stop += 1
        if stop - start > 1:
            vectors[:, start:stop] = _split_degenerate(vectors[:, start:stop], operators, position + 1)
        start = stop
    return vectors


def joint_eigenbasis(operators: list[np.ndarray], rng: np.random.Generator) -> np.ndarray:
    """
    Orthogonal basis diagonalizing a family of commuting real symmetric
    matrices: eigh of a random positive combination, falling back to
    cluster-by-cluster splitting when repeated draws fail.
    """
    size = operators[0].shape[0]
    if size == 1:
        return np.ones((1, 1))
    scaled = _spectral_scale(operators)
    for attempt in range(MAX_RETRIES):
        coefficients = rng.uniform(1.0, 2.0, len(scaled))
        combined = sum(c * op for c, op in zip(coefficients, scaled))
        _, basis = np.linalg.eigh(0.5 * (combined + combined.T))
        worst = max(_offdiagonal(basis, op) for op in scaled)
        if worst < EPS_DIAG:
            return basis
        logger.debug("random combination %d left off-diagonal %.2e; retrying", attempt, worst)
    logger.warning("falling back to sequential splitting for a %dx%d block", size, size)
    basis = _split_degenerate(np.eye(size), scaled, 0)
    worst = max(_offdiagonal(basis, op) for op in scaled)
    if worst >= EPS_DIAG:
        raise StructuralError(f"no joint eigenbasis found (off-diagonal {worst:.2e})")
    return basis


def _fix_sign(column: np.ndarray) -> float:
    significant = np.flatnonzero(np.abs(column) > SIGN_TOL)
    return -1.0 if significant.size and column[significant[0]] < 0 else 1.0


def _labels(vector: np.ndarray, operators: list[np.ndarray], decimals: int) -> tuple[float, ...]:
    return tuple(round(float(vector @ op @ vector), decimals) + 0.0 for op in operators)


def _symmetry_key(labels: tuple[float, ...]) -> tuple[float, ...]:
    inversion, exchange, total = labels
    return total, -exchange, -inversion


def _build_v(n, w, sectors, symmetries, rng):
    d = dimension(n)
    columns, keys = [], []
    for dz in range(n + 1):
        block = sectors[dz]
        family = []
        for dx in range(n + 1):
            overlap = w[np.ix_(block, sectors[dx])]
            family.append(overlap @ overlap.T)
        local = [g[np.ix_(block, block)] for g in symmetries]
        basis = joint_eigenbasis(family + local, rng)
        for j in range(basis.shape[1]):
            vector = basis[:, j]
            column = np.zeros(d)
            column[block] = vector * _fix_sign(vector)
            profile = _labels(vector, family, PROFILE_DECIMALS)
            columns.append(column)
            keys.append((dz, tuple(-p for p in profile), _symmetry_key(_labels(vector, local, LABEL_DECIMALS))))
    order = sorted(range(d), key=keys.__getitem__)
    return np.column_stack([columns[i] for i in order])


def _build_u(n, w, sectors, symmetries, rng):
    """U in the z basis plus W^T U, whose columns live in single x-frame sectors."""
    d = dimension(n)
    framed_columns, keys = [], []
    for dx in range(n + 1):
        block = sectors[dx]
        family = []
        for dz in range(n + 1):
            overlap = w[np.ix_(sectors[dz], block)]
            family.append(overlap.T @ overlap)
        local = [g[np.ix_(block, block)] for g in symmetries]
        basis = joint_eigenbasis(family + local, rng)
        for j in range(basis.shape[1]):
            vector = basis[:, j]
            framed = np.zeros(d)
            framed[block] = vector
            framed *= _fix_sign(w[:, block] @ vector)
            profile = _labels(vector, family, PROFILE_DECIMALS)
            lowest = next(dz for dz, weight in enumerate(profile) if weight > EPS_DIAG)
            framed_columns.append(framed)
            keys.append((lowest, dx, tuple(-p for p in profile),
                         _symmetry_key(_labels(vector, local, LABEL_DECIMALS))))
    order = sorted(range(d), key=keys.__getitem__)
    framed = np.column_stack([framed_columns[i] for i in order])
    return w @ framed, framed


def _extract_factor(n, dz, dx, framed_u, framed_v, u_sector, v_sector, x_block):
    rows = np.flatnonzero(u_sector == dx)
    cols = np.flatnonzero(v_sector == dz)
    block = framed_u[np.ix_(x_block, rows)].T @ framed_v[np.ix_(x_block, cols)]
    block[np.abs(block) < EPS_LAMBDA] = 0.0
    if np.any(np.count_nonzero(block, axis=0) > 1) or np.any(np.count_nonzero(block, axis=1) > 1):
        raise StructuralError(f"Lambda({dz},{dx}) has a row or column with more than one nonzero")
    local_rows, local_cols = np.nonzero(block)
    return LambdaFactor(dz, dx, dimension(n), rows[local_rows], cols[local_cols], block[local_rows, local_cols])


def compute_joint_svd(n: int, rng: np.random.Generator | None = None) -> JointSVD:
    n = check_size(n)
    limit = svd_max_n()
    if n > limit:
        raise DenseLimitError(n, limit)
    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    single = rotation_matrix(n, np.pi / 2, 0.0)
    w = np.kron(single, single)
    sectors = [sector_indices(n, delta) for delta in range(n + 1)]
    symmetries = symmetry_generators(n)
    logger.info("building joint SVD for N=%d (dimension %d)", n, dimension(n))

    v = _build_v(n, w, sectors, symmetries, rng)
    u, framed_u = _build_u(n, w, sectors, symmetries, rng)
    framed_v = two_mode_apply(single.T, v)

    labels = np.empty(dimension(n), dtype=np.int64)
    for delta, block in enumerate(sectors):
        labels[block] = delta
    v_sector = labels[np.argmax(np.abs(v), axis=0)]
    u_sector = labels[np.argmax(np.abs(framed_u), axis=0)]
    for delta in range(n + 1):
        expected = sector_size(n, delta)
        if np.count_nonzero(v_sector == delta) != expected or np.count_nonzero(u_sector == delta) != expected:
            raise StructuralError(f"sector {delta} does not hold {expected} columns of U and V")

    factors = {}
    for dx in range(n + 1):
        for dz in range(n + 1):
            factors[(dx, dz)] = _extract_factor(n, dz, dx, framed_u, framed_v, u_sector, v_sector, sectors[dx])
    logger.info("joint SVD for N=%d: %d nonzero Lambda entries", n,
                sum(len(f) for f in factors.values()))
    return JointSVD(n, u, v, factors)

