"""Discrete-phase constant-modulus waveform design for colocated MIMO radar."""

from .model import (
    Filter,
    Scenario,
    Waveform,
    chirp_reference,
    clutter_matrix,
    optimal_filter,
    optimal_sinr,
    quadratic_form_matrix,
    sinr,
    steering_matrix,
    steering_vector,
)
from .constellation import (
    Constellation,
    HullRegion,
    SimilaritySet,
    build_alphabet,
    build_hull,
    build_similarity_set,
    hull_contains,
    project_onto_hull,
    quantize_nearest,
    quantize_reference,
)
from .solver import (
    SolverConfig,
    SolverReport,
    cam_solve,
    continuous_baseline,
    exhaustive_oracle,
    inner_maximize,
)
from .analysis import Beampattern, beampattern, sinr_gap_report

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
