"""Post-solve diagnostics: transmit beampattern and SINR gap summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Scenario, Waveform, steering_vector
from .solver import SolverReport


@dataclass(frozen=True)
class Beampattern:
    angles: np.ndarray   # radians, strictly increasing over [-pi/2, pi/2]
    power_db: np.ndarray

    def __post_init__(self):
        if not np.all(np.diff(self.angles) > 0):
            raise ValueError("angle grid must be strictly increasing")
        if not np.all(np.isfinite(self.power_db)):
            raise ValueError("beampattern powers must be finite")

    @property
    def peak_db(self) -> float:
        return float(np.max(self.power_db))

    @property
    def normalized_db(self) -> np.ndarray:
        return self.power_db - self.peak_db

    def power_at(self, angle: float) -> float:
        """Power (dB) at the grid point closest to ``angle``."""
        return float(self.power_db[int(np.argmin(np.abs(self.angles - angle)))])


def snapshot_covariance(s: Waveform, n_tx: int) -> np.ndarray:
    """Sum of snapshot outer products s_n s_n^H for the column-stacked code."""
    if len(s) % n_tx != 0:
        raise ValueError(f"waveform length {len(s)} not divisible by n_tx={n_tx}")
    snaps = s.entries.reshape(-1, n_tx)
    return snaps.T @ snaps.conj()


def transmit_power(s: Waveform, n_tx: int, angle: float) -> float:
    """Radiated power toward ``angle``: sum over snapshots of |a_t(angle)^T s_n|^2.

    Uses the same transposed steering product as the receive model, so nulls
    placed by the optimizer show up at the interferer angles themselves.
    """
    a = steering_vector(angle, n_tx)
    snaps = s.entries.reshape(-1, n_tx)
    return float(np.sum(np.abs(snaps @ a) ** 2))


def beampattern(s: Waveform, scenario: Scenario, grid_size: int = 721) -> Beampattern:
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if len(s) != scenario.code_length:
        raise ValueError("waveform length does not match scenario")
    angles = np.linspace(-np.pi / 2, np.pi / 2, grid_size)
    r = snapshot_covariance(s, scenario.n_tx)
    # quadratic form with the conjugated steering vector, per transmit_power
    powers = np.array([
        np.real(steering_vector(th, scenario.n_tx) @ r @ steering_vector(th, scenario.n_tx).conj())
        for th in angles
    ])
    powers = np.maximum(powers, 1e-300)  # guard the log against exact nulls
    return Beampattern(angles=angles, power_db=10.0 * np.log10(powers))


def response_pattern(s: Waveform, scenario: Scenario, grid_size: int = 721) -> Beampattern:
    """Filter-output angular response |f^H A(theta) s|^2 with the max-SINR filter.

    This is the end-to-end (transmit plus receive) pattern: it peaks at the
    target angle and carries the deep clutter notches that the transmit-only
    pattern of a small array cannot express.
    """
    from .model import optimal_filter, steering_matrix

    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    f = optimal_filter(scenario, s).entries
    angles = np.linspace(-np.pi / 2, np.pi / 2, grid_size)
    powers = np.array([
        np.abs(f.conj() @ (steering_matrix(scenario, th) @ s.entries)) ** 2
        for th in angles
    ])
    powers = np.maximum(powers, 1e-300)
    return Beampattern(angles=angles, power_db=10.0 * np.log10(powers))


@dataclass(frozen=True)
class GapRow:
    label: str
    solver_sinr_db: float
    baseline_sinr_db: float

    @property
    def gap_db(self) -> float:
        return self.baseline_sinr_db - self.solver_sinr_db


@dataclass(frozen=True)
class GapSummary:
    rows: tuple[GapRow, ...]

    @property
    def median_gap_db(self) -> float:
        return float(np.median([r.gap_db for r in self.rows]))

    @property
    def max_gap_db(self) -> float:
        return float(np.max([r.gap_db for r in self.rows]))


def sinr_gap_report(pairs: list[tuple[str, SolverReport, SolverReport]]) -> GapSummary:
    """Gap table from (label, solver report, baseline report) triples."""
    if not pairs:
        raise ValueError("need at least one report pair")
    rows = tuple(
        GapRow(label=label, solver_sinr_db=rep.final_sinr_db,
               baseline_sinr_db=base.final_sinr_db)
        for label, rep, base in pairs
    )
    return GapSummary(rows=rows)
