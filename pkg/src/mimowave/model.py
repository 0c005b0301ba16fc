"""Radar scene linear algebra: steering, clutter covariance, receive filter, SINR.

All angles are radians, all powers enter in dB and are converted to linear
ratios against the noise floor. The transmit waveform is a column-stacked
vector of N snapshots across the N_T transmit antennas; the receive side
stacks N snapshots across N_R antennas the same way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve


def db_to_linear(x_db: float) -> float:
    return float(10.0 ** (x_db / 10.0))


def linear_to_db(x: float) -> float:
    return float(10.0 * np.log10(x))


@dataclass(frozen=True)
class Scenario:
    """Target/interferer geometry and powers for a colocated ULA MIMO radar.

    ``interferers`` is a list of (angle_rad, power_db) pairs for the fixed
    signal-dependent clutter sources.
    """

    n_tx: int
    n_rx: int
    n_samples: int
    target_angle: float
    target_power_db: float
    interferers: tuple[tuple[float, float], ...] = ()
    noise_power_db: float = 0.0

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1 or self.n_samples < 1:
            raise ValueError("n_tx, n_rx and n_samples must be >= 1")
        for ang in [self.target_angle] + [a for a, _ in self.interferers]:
            if not -np.pi / 2 <= ang <= np.pi / 2:
                raise ValueError(f"angle {ang} outside [-pi/2, pi/2]")
        object.__setattr__(self, "interferers", tuple((float(a), float(p)) for a, p in self.interferers))
        if not np.isfinite(self.target_snr) or self.target_snr <= 0:
            raise ValueError("target power ratio must be positive and finite")

    @property
    def n_interferers(self) -> int:
        return len(self.interferers)

    @property
    def target_snr(self) -> float:
        """Linear power ratio of the target against the noise floor."""
        return db_to_linear(self.target_power_db - self.noise_power_db)

    @property
    def interferer_ratios(self) -> np.ndarray:
        """Linear clutter-to-noise power ratios, one per interferer."""
        return np.array([db_to_linear(p - self.noise_power_db) for _, p in self.interferers])

    @property
    def code_length(self) -> int:
        return self.n_tx * self.n_samples

    @property
    def filter_length(self) -> int:
        return self.n_rx * self.n_samples

    @property
    def modulus(self) -> float:
        """Nominal per-entry magnitude of a constant-modulus waveform."""
        return 1.0 / np.sqrt(self.n_tx * self.n_samples)


@dataclass(frozen=True)
class Waveform:
    """Column-stacked transmit code of length n_tx * n_samples."""

    entries: np.ndarray
    modulus: float
    constant_modulus: bool = False

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex).reshape(-1)
        object.__setattr__(self, "entries", entries)
        if self.constant_modulus:
            err = np.max(np.abs(np.abs(entries) - self.modulus))
            if err > 1e-9:
                raise ValueError(f"constant-modulus violation: max |.|-deviation {err:.3e}")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Filter:
    """FIR receive filter of length n_rx * n_samples."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(entries)):
            raise ValueError("filter entries must be finite")
        if np.all(entries == 0):
            raise ValueError("filter must be nonzero")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)


def steering_vector(angle: float, n_elements: int) -> np.ndarray:
    """Half-wavelength ULA steering vector, element i = exp(j*pi*i*sin(angle))."""
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    return np.exp(1j * np.pi * np.arange(n_elements) * np.sin(angle))


def steering_matrix(scenario: Scenario, angle: float) -> np.ndarray:
    """Snapshot-wise map from transmit code to receive array: I_N kron (a_r a_t^T)."""
    a_r = steering_vector(angle, scenario.n_rx)
    a_t = steering_vector(angle, scenario.n_tx)
    return np.kron(np.eye(scenario.n_samples), np.outer(a_r, a_t))


def _check_waveform(scenario: Scenario, s: Waveform) -> np.ndarray:
    if len(s) != scenario.code_length:
        raise ValueError(f"waveform length {len(s)} != n_tx*n_samples = {scenario.code_length}")
    return s.entries


def clutter_matrix(scenario: Scenario, s: Waveform) -> np.ndarray:
    """Signal-dependent clutter covariance, sum of rank-one terms per interferer."""
    sv = _check_waveform(scenario, s)
    n = scenario.filter_length
    out = np.zeros((n, n), dtype=complex)
    for (angle, _), ratio in zip(scenario.interferers, scenario.interferer_ratios):
        v = steering_matrix(scenario, angle) @ sv
        out += ratio * np.outer(v, v.conj())
    return out


def sinr(scenario: Scenario, s: Waveform, f: Filter) -> float:
    """Output SINR (linear) of the filtered receive signal for waveform s."""
    sv = _check_waveform(scenario, s)
    if len(f) != scenario.filter_length:
        raise ValueError(f"filter length {len(f)} != n_rx*n_samples = {scenario.filter_length}")
    fv = f.entries
    target = steering_matrix(scenario, scenario.target_angle) @ sv
    num = scenario.target_snr * np.abs(fv.conj() @ target) ** 2
    den = np.real(fv.conj() @ clutter_matrix(scenario, s) @ fv) + np.real(fv.conj() @ fv)
    return float(num / den)


def optimal_filter(scenario: Scenario, s: Waveform) -> Filter:
    """Max-SINR receive filter (T(s) + I)^-1 A(theta_0) s.

    Uses a Cholesky solve; T(s) + I is always Hermitian positive definite.
    """
    sv = _check_waveform(scenario, s)
    lhs = clutter_matrix(scenario, s) + np.eye(scenario.filter_length)
    rhs = steering_matrix(scenario, scenario.target_angle) @ sv
    c, low = cho_factor(lhs)
    return Filter(cho_solve((c, low), rhs))


def quadratic_form_matrix(scenario: Scenario, s: Waveform) -> np.ndarray:
    """A^H(theta_0) [T(s) + I]^-1 A(theta_0): the PSD matrix whose quadratic
    form in s gives the optimal-filter SINR up to the target power ratio.
    """
    _check_waveform(scenario, s)
    a0 = steering_matrix(scenario, scenario.target_angle)
    lhs = clutter_matrix(scenario, s) + np.eye(scenario.filter_length)
    c, low = cho_factor(lhs)
    y = a0.conj().T @ cho_solve((c, low), a0)
    # symmetrize to kill roundoff asymmetry
    return 0.5 * (y + y.conj().T)


def optimal_sinr(scenario: Scenario, s: Waveform) -> float:
    """SINR (linear) attained with the optimal receive filter for waveform s."""
    sv = _check_waveform(scenario, s)
    y = quadratic_form_matrix(scenario, s)
    return float(scenario.target_snr * np.real(sv.conj() @ y @ sv))


def chirp_reference(n_tx: int, n_samples: int) -> Waveform:
    """Column-stacked orthogonal chirp code, the standard similarity reference."""
    if n_tx < 1 or n_samples < 1:
        raise ValueError("n_tx and n_samples must be >= 1")
    k = np.arange(1, n_tx + 1)[:, None]
    n = np.arange(1, n_samples + 1)[None, :]
    mat = np.exp(2j * np.pi * k * (n - 1) / n_samples) * np.exp(1j * np.pi * (n - 1) ** 2 / n_samples)
    mat = mat / np.sqrt(n_tx * n_samples)
    return Waveform(mat.T.reshape(-1), modulus=1.0 / np.sqrt(n_tx * n_samples), constant_modulus=True)
