"""
Analysis of the V (and U) basis states: sector classification, entanglement
spectrum and column selection for plotting.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .ensemble import Basis, TwoEnsembleState, entanglement_entropy, epr_state, to_x_frame
from .exceptions import DomainError, StructuralError
from .joint_svd import JointSVD
from .projectors import sector_labels, sector_size

logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-8


@dataclass(frozen=True)
class VBasisLabel:
    index: int
    sector: int
    leakage: float


@dataclass(frozen=True)
class SpectrumEntry:
    index: int
    sector: int
    entropy: float
    ratio: float


def _column(matrix: np.ndarray, index: int, n: int) -> TwoEnsembleState:
    if not 0 <= index < matrix.shape[1]:
        raise DomainError(f"column {index} outside [0, {matrix.shape[1]})")
    return TwoEnsembleState(n, matrix[:, index])


def vbasis_state(jsvd: JointSVD, index: int) -> TwoEnsembleState:
    """V column `index` as a z-basis state."""
    return _column(jsvd.v, index, jsvd.n)


def ubasis_state(jsvd: JointSVD, index: int) -> TwoEnsembleState:
    return _column(jsvd.u, index, jsvd.n)


def classify_sectors(jsvd: JointSVD, basis: Basis = Basis.V) -> list[VBasisLabel]:
    """
    Sector of every V column (z offsets) or U column (x offsets). Raises
    StructuralError if a column leaks out of its sector or a sector holds the
    wrong number of columns.
    """
    labels = sector_labels(jsvd.n)
    if basis is Basis.V:
        weights = np.abs(jsvd.v) ** 2
    elif basis is Basis.U:
        weights = np.column_stack([np.abs(to_x_frame(ubasis_state(jsvd, j)).amps) ** 2 for j in range(jsvd.dim)])
    else:
        raise DomainError(f"classification is defined for V and U, not {basis.value}")
    result = []
    for index in range(jsvd.dim):
        per_sector = np.bincount(labels, weights=weights[:, index], minlength=jsvd.n + 1)
        sector = int(np.argmax(per_sector))
        # norm of the part outside the sector
        leakage = float(np.sqrt(np.delete(per_sector, sector).sum()))
        if leakage > EIGEN_TOL:
            raise StructuralError(f"{basis.value} column {index} is not confined to one sector (leakage {leakage:.2e})")
        result.append(VBasisLabel(index, sector, leakage))
    counts = np.bincount([label.sector for label in result], minlength=jsvd.n + 1)
    for delta, count in enumerate(counts):
        if count != sector_size(jsvd.n, delta):
            raise StructuralError(f"sector {delta} holds {count} columns, expected {sector_size(jsvd.n, delta)}")
    return result


def entanglement_spectrum(jsvd: JointSVD) -> list[SpectrumEntry]:
    """Entropy of every V column, relative to log2(N+1), ordered by sector then index."""
    max_entropy = np.log2(jsvd.n + 1)
    entries = []
    for label in classify_sectors(jsvd):
        entropy = entanglement_entropy(vbasis_state(jsvd, label.index))
        entries.append(SpectrumEntry(label.index, label.sector, entropy, entropy / max_entropy))
    return sorted(entries, key=lambda e: (e.sector, e.index))


def epr_column(jsvd: JointSVD) -> int:
    """V column with the largest overlap with the EPR state."""
    overlaps = np.abs(jsvd.v.T @ epr_state(jsvd.n).amps.real)
    return int(np.argmax(overlaps))


def select_column(jsvd: JointSVD, sector: int, rank: int) -> int:
    """The `rank`-th most entangled V column of a sector, ties broken by index."""
    if not 0 <= sector <= jsvd.n:
        raise DomainError(f"sector {sector} outside [0, {jsvd.n}]")
    members = [e for e in entanglement_spectrum(jsvd) if e.sector == sector]
    if not 0 <= rank < len(members):
        raise DomainError(f"sector {sector} has {len(members)} columns; rank {rank} is out of range")
    members.sort(key=lambda e: (-round(e.entropy, 10), e.index))
    return members[rank].index


def vbasis_amplitude_map(jsvd: JointSVD, index: int) -> np.ndarray:
    """Real amplitudes of a V column on the (N+1)x(N+1) grid, indexed [k2, k1]."""
    return vbasis_state(jsvd, index).amplitude_grid().real.copy()


def degenerate_groups(jsvd: JointSVD, basis: Basis = Basis.V) -> list[list[int]]:
    """
    Columns grouped into joint eigenspaces of the P^z P^x P^z family: same
    sector and the same |Lambda| entry against every partner offset. No
    readout sequence separates two columns of one group.
    """
    if basis is Basis.V:
        sectors = jsvd.v_sectors()

        def signature(j: int) -> np.ndarray:
            return np.array([abs(jsvd.factor(int(sectors[j]), dx).forward_amp[j]) for dx in range(jsvd.n + 1)])
    elif basis is Basis.U:
        sectors = np.array([label.sector for label in classify_sectors(jsvd, Basis.U)])

        def signature(j: int) -> np.ndarray:
            return np.array([abs(jsvd.factor(dz, int(sectors[j])).inverse_amp[j]) for dz in range(jsvd.n + 1)])
    else:
        raise DomainError(f"groups are defined for V and U, not {basis.value}")
    groups: list[list[int]] = []
    representatives: list[tuple[int, np.ndarray]] = []
    for j in range(jsvd.dim):
        key = signature(j)
        for group, (sector, reference) in zip(groups, representatives):
            if sector == sectors[j] and np.max(np.abs(key - reference)) < EIGEN_TOL:
                group.append(j)
                break
        else:
            groups.append([j])
            representatives.append((int(sectors[j]), key))
    return groups


def collapse_weight(jsvd: JointSVD, state: TwoEnsembleState, basis: Basis = Basis.V) -> float:
    """Largest share of the state's norm held by one group of degenerate_groups."""
    z_amps = jsvd.to_z(state).amps
    matrix = jsvd.v if basis is Basis.V else jsvd.u
    weights = np.abs(matrix.T @ z_amps) ** 2
    weights = weights / weights.sum()
    return max(float(weights[group].sum()) for group in degenerate_groups(jsvd, basis))
