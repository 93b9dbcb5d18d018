"""
Figure data: every figure is a list of panels, each written to its own file
by the `figure` management command.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import RunConfig
from .ensemble import DensityMatrix, SpinAxis, random_state, xx_polarized_state
from .exceptions import ConfigurationError, DomainError
from .fast_strobe import fast_apply_sequence
from .joint_svd import JointSVD
from .mixed_state import run_rounds
from .output import Records, Table
from .povm import PovmParams, c_function, log_c_function, sample_povm_trajectory
from .strobe import (
    OutcomeSequence,
    apply_sequence,
    basis_probabilities,
    sample_trajectory,
    strobe_diagnostics,
    trajectory_rng,
)
from .vbasis import entanglement_spectrum, select_column, vbasis_amplitude_map

logger = logging.getLogger(__name__)

FIGURE_DEFAULTS = {
    2: {"n": 30, "alpha": 50.0},
    3: {"n": 30, "alpha": 10.0},
    5: {"n": 20},
    6: {"n": 15},
    7: {"n": 5},
    8: {"n": 5},
    9: {"n": 10},
    10: {"n": 5},
}
NEEDS_SVD = frozenset({5, 7, 8, 9, 10})
TOP_WEIGHTS = 8

Loader = Callable[[int], JointSVD]


@dataclass
class Panel:
    key: str
    data: Table | Records
    tau: float | None = None
    n: int | None = None

    def header(self, config: RunConfig, figure_id: int) -> dict:
        header = config.header(figure_id)
        if self.n is not None:
            header["N"] = self.n
        if self.tau is not None:
            header["tau"] = self.tau
        return header


def _grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    k1, k2 = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    return k1.ravel(), k2.ravel()


def figure_2(config: RunConfig, loader: Loader) -> list[Panel]:
    """C-function heat maps over (k1, k2) for bright and dark outcomes."""
    n, alpha = config.n, config.alpha
    bright = (int(round(alpha ** 2)), 0)
    mixed = (int(round(alpha ** 2 - alpha)), int(round(alpha)))
    settings = {
        "a": (math.pi / (8 * n), bright),
        "b": (math.pi / (2 * n), bright),
        "c": (math.pi / 8, bright),
        "d": (math.pi / (2 * n), mixed),
    }
    k1, k2 = _grid(n)
    panels = []
    for key, (tau, (n_c, n_d)) in settings.items():
        values = c_function(n_c, n_d, (k1 - k2) * tau, alpha)
        rows = [(int(a), int(b), float(v)) for a, b, v in zip(k1, k2, values)]
        panels.append(Panel(key, Table(f"fig2{key}", ["k1", "k2", "value"], rows), tau=tau))
    return panels


def figure_3(config: RunConfig, loader: Loader) -> list[Panel]:
    """Outcome probabilities |C|^2 over (delta, n_d) at fixed total photon number."""
    n, alpha = config.n, config.alpha
    total = int(round(alpha ** 2))
    deltas, n_d = np.meshgrid(np.arange(-n, n + 1), np.arange(total + 1), indexing="ij")
    deltas, n_d = deltas.ravel(), n_d.ravel()
    n_c = total - n_d
    panels = []
    for key, tau in (("a", math.pi / (2 * n)), ("b", 1 / math.sqrt(n))):
        log_mag, _ = log_c_function(n_c, n_d, deltas * tau, alpha)
        probabilities = np.exp(2 * log_mag)
        rows = [(int(d), int(c), int(m), float(p)) for d, c, m, p in zip(deltas, n_c, n_d, probabilities)]
        panels.append(Panel(key, Table(f"fig3{key}", ["delta", "nc", "nd", "prob"], rows), tau=tau))
    return panels


def figure_5(config: RunConfig, loader: Loader) -> list[Panel]:
    """Diagonal amplitudes after all-zero sequences, and the convergence table."""
    jsvd = loader(config.n)
    initial = xx_polarized_state(config.n)
    rows = []
    for count in (0, 1, 2, 6):
        projected = fast_apply_sequence(initial, OutcomeSequence.odd_rounds(count), jsvd)
        grid = jsvd.to_z(projected).normalized().amplitude_grid()
        rows.extend((count, k, float(grid[k, k].real)) for k in range(config.n + 1))
    amplitudes = Table("fig5a", ["L", "k", "amplitude"], rows)
    diagnostics = strobe_diagnostics(initial, list(range(config.rounds + 1)))
    table = Table("fig5b", ["L", "fidelity", "entropy_ratio", "probability", "amplitude"], [
        (d.rounds, d.fidelity, d.entropy_ratio, d.probability, d.amplitude) for d in diagnostics
    ])
    return [Panel("a", amplitudes), Panel("b", table)]


def figure_6(config: RunConfig, loader: Loader) -> list[Panel]:
    """Two-ensemble outcome probabilities in the xx, yy and zz bases after L rounds."""
    initial = xx_polarized_state(config.n)
    k1, k2 = _grid(config.n)
    panels = []
    for key, count in (("a", 1), ("b", 2), ("c", 6)):
        projected = apply_sequence(initial, OutcomeSequence.odd_rounds(count))
        rows = []
        for axis in (SpinAxis.X, SpinAxis.Y, SpinAxis.Z):
            probabilities = basis_probabilities(projected, axis, axis)
            rows.extend((count, f"{axis.value}{axis.value}", int(a), int(b), float(probabilities[a, b]))
                        for a, b in zip(k1, k2))
        panels.append(Panel(key, Table(f"fig6{key}", ["L", "basis", "k1", "k2", "prob"], rows)))
    return panels


def _top_weights(jsvd: JointSVD, state) -> list[list]:
    weights = np.abs(jsvd.express(state).amps) ** 2
    weights = weights / weights.sum()
    order = np.argsort(-weights, kind="stable")[:TOP_WEIGHTS]
    return [[int(i), float(weights[i])] for i in order]


def _trajectory_panel(config: RunConfig, jsvd: JointSVD, key: str, index: int) -> Panel:
    start_rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(index, 0)))
    initial = random_state(config.n, start_rng) if index < 2 else xx_polarized_state(config.n)
    total = 2 * config.rounds + 1
    rng = trajectory_rng(config.seed, index)
    records = []
    if config.finite_alpha:
        params = PovmParams(config.alpha, config.tau)
        trajectory = sample_povm_trajectory(initial, total, params, rng)
        for step, (basis, outcome, offset, probability, state) in enumerate(zip(
                trajectory.bases, trajectory.outcomes, trajectory.offsets,
                trajectory.step_probs, trajectory.step_states)):
            records.append({
                "seed": config.seed, "step": step, "basis": basis.value,
                "delta": offset.magnitude if offset else None,
                "nc": outcome.n_c, "nd": outcome.n_d,
                "residual": offset.residual if offset else None,
                "condProb": probability, "stateWeights": _top_weights(jsvd, state),
            })
    else:
        trajectory = sample_trajectory(initial, total, rng, seed=config.seed, index=index)
        for step, ((basis, delta), probability, state) in enumerate(zip(
                trajectory.entries, trajectory.step_probs, trajectory.step_states)):
            records.append({
                "seed": config.seed, "step": step, "basis": basis.value, "delta": delta,
                "condProb": probability, "stateWeights": _top_weights(jsvd, state),
            })
    return Panel(key, Records(f"fig7{key}", records))


def figure_7(config: RunConfig, loader: Loader) -> list[Panel]:
    """Sampled trajectories: panels a, b start from random states, c, d from the xx-polarized state."""
    jsvd = loader(config.n)
    keys = ("a", "b", "c", "d")
    if config.threads <= 1:
        return [_trajectory_panel(config, jsvd, key, i) for i, key in enumerate(keys)]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(lambda item: _trajectory_panel(config, jsvd, item[1], item[0]), enumerate(keys)))


def figure_8(config: RunConfig, loader: Loader) -> list[Panel]:
    """Outcome-averaged V-basis weights per round, from a random state and the xx-polarized state."""
    jsvd = loader(config.n)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(0,)))
    panels = []
    for key, initial in (("a", random_state(config.n, rng)), ("b", xx_polarized_state(config.n))):
        history = run_rounds(DensityMatrix.from_state(initial), config.rounds, jsvd)
        rows = [(count, index, float(weight))
                for count, distribution in enumerate(history)
                for index, weight in enumerate(distribution.values)]
        panels.append(Panel(key, Table(f"fig8{key}", ["round", "index", "weight"], rows)))
    return panels


FIGURE_9_COLUMNS = {"a": (0, 0), "b": (0, 3), "c": (1, 0), "d": (3, 0)}


def figure_9(config: RunConfig, loader: Loader) -> list[Panel]:
    """Amplitude maps of selected V columns, chosen by (sector, entropy rank)."""
    jsvd = loader(config.n)
    k1, k2 = _grid(config.n)
    panels = []
    for key, (sector, rank) in FIGURE_9_COLUMNS.items():
        try:
            index = select_column(jsvd, sector, rank)
        except DomainError as exc:
            logger.warning("skipping panel %s: %s", key, exc)
            continue
        grid = vbasis_amplitude_map(jsvd, index)
        rows = [(int(a), int(b), float(grid[b, a])) for a, b in zip(k1, k2)]
        panels.append(Panel(key, Table(f"fig9{key}", ["k1", "k2", "amplitude"], rows)))
    return panels


def figure_10(config: RunConfig, loader: Loader) -> list[Panel]:
    """Entanglement spectrum of the V basis at N (panel a) and 2N (panel b)."""
    panels = []
    for key, n in (("a", config.n), ("b", 2 * config.n)):
        spectrum = entanglement_spectrum(loader(n))
        rows = [(e.index, e.sector, e.ratio) for e in spectrum]
        panels.append(Panel(key, Table(f"fig10{key}", ["index", "sector", "E_over_Emax"], rows), n=n))
    return panels


FIGURES = {
    2: figure_2,
    3: figure_3,
    5: figure_5,
    6: figure_6,
    7: figure_7,
    8: figure_8,
    9: figure_9,
    10: figure_10,
}


def build_figure(figure_id: int, config: RunConfig, loader: Loader) -> list[Panel]:
    if figure_id not in FIGURES:
        raise ConfigurationError(f"unknown figure {figure_id}; choose from {sorted(FIGURES)}")
    logger.info("building figure %d for N=%d", figure_id, config.n)
    return FIGURES[figure_id](config, loader)
