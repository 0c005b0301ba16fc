"""Waveform optimizers: hull-relaxed quadratic ascent with quantization,
a continuous-phase arc-constrained baseline, and an exhaustive-search oracle.

All three maximize the quadratic form s^H Y s for a fixed positive
semidefinite Y inside an outer loop that refreshes Y from the current
waveform. The quadratic form is convex, so its maximum over the per-entry
feasible regions sits at extreme points; the ascent schemes below exploit
that by combining a linear minorant (exact lower bound for PSD Y) with
per-entry closed-form maximization, which guarantees a monotone objective.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .constellation import (
    Constellation,
    HullRegion,
    SimilaritySet,
    build_hull,
    build_similarity_set,
    hull_contains,
    project_onto_hull,
    quantize_nearest,
    quantize_reference,
)
from .model import Scenario, Waveform, linear_to_db, optimal_sinr, quadratic_form_matrix


@dataclass(frozen=True)
class SolverConfig:
    max_outer_iters: int = 50
    outer_tol: float = 1e-4        # relative SINR change across outer rounds
    inner_max_iters: int = 200
    inner_tol: float = 1e-10       # relative objective change in the inner ascent
    step_rule: str = "backtracking"  # "fixed" or "backtracking" gradient refinement
    seed: int = 0

    def __post_init__(self):
        if self.max_outer_iters < 1 or self.inner_max_iters < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.outer_tol <= 0 or self.inner_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.step_rule not in ("fixed", "backtracking"):
            raise ValueError(f"unknown step_rule {self.step_rule!r}")


@dataclass
class SolverReport:
    final_waveform: Waveform
    relaxed_waveform: Waveform
    final_sinr_db: float
    relaxed_sinr_db: float
    sinr_trace_db: list[float]
    objective_trace: list[list[float]]
    outer_iterations: int
    wall_time: float
    similarity_tolerance: float
    similarity_arc: float
    projected_init: bool = False


def _objective(y: np.ndarray, s: np.ndarray) -> float:
    return float(np.real(s.conj() @ y @ s))


def _vertex_linear_argmax(c: complex, vertices: np.ndarray) -> complex:
    """argmax_v Re(c^* v) over the polygon vertices (ties: first index)."""
    return complex(vertices[int(np.argmax(np.real(np.conj(c) * vertices)))])


def _coordinate_ascent(y: np.ndarray, hulls: list[HullRegion], s: np.ndarray) -> np.ndarray:
    """Cyclic exact per-entry maximization over the hull vertices.

    Fixing all other entries, the objective in entry k is a convex quadratic,
    so its maximum over the polygon is attained at a vertex; scanning the
    vertices is exact and the sweep is monotone.
    """
    s = s.copy()
    ys = y @ s
    improved = True
    sweeps = 0
    while improved and sweeps < 50:
        improved = False
        sweeps += 1
        for k, hull in enumerate(hulls):
            b = ys[k] - y[k, k] * s[k]  # coupling term from the other entries
            verts = hull.vertices
            scores = np.real(y[k, k]) * np.abs(verts) ** 2 + 2.0 * np.real(np.conj(verts) * b)
            cur = np.real(y[k, k]) * abs(s[k]) ** 2 + 2.0 * np.real(np.conj(s[k]) * b)
            j = int(np.argmax(scores))
            if scores[j] > cur + 1e-12:
                ys += y[:, k] * (verts[j] - s[k])
                s[k] = verts[j]
                improved = True
    return s


def _ascend(
    y: np.ndarray,
    hulls: list[HullRegion],
    s_start: np.ndarray,
    cfg: SolverConfig,
    trace: list[float] | None = None,
) -> np.ndarray:
    """Monotone ascent of s^H Y s over the polygon product from one start."""
    n = y.shape[0]
    s = s_start.copy()
    # uniform vertex counts let the per-entry argmax vectorize
    vmat = None
    if len({len(h.vertices) for h in hulls}) == 1:
        vmat = np.stack([h.vertices for h in hulls])
    obj = _objective(y, s)
    if trace is not None:
        trace.append(obj)
    for _ in range(cfg.inner_max_iters):
        c = y @ s
        if np.max(np.abs(c)) < 1e-300:
            break
        if vmat is not None:
            idx = np.argmax(np.real(np.conj(c)[:, None] * vmat), axis=1)
            s_new = vmat[np.arange(n), idx]
        else:
            s_new = np.array([_vertex_linear_argmax(c[k], hulls[k].vertices) for k in range(n)])
        obj_new = _objective(y, s_new)
        if obj_new < obj - 1e-12:
            break  # surrogate step cannot decrease the objective for PSD Y
        s, prev = s_new, obj
        obj = obj_new
        if trace is not None:
            trace.append(obj)
        if abs(obj - prev) <= cfg.inner_tol * max(abs(prev), 1.0):
            break

    s = _coordinate_ascent(y, hulls, s)
    obj = _objective(y, s)

    # projected-gradient refinement off the vertex set; accept only improving steps
    lam = float(np.linalg.eigvalsh(y)[-1])
    if lam > 0:
        step = 1.0 / (2.0 * lam)
        for _ in range(20):
            g = 2.0 * (y @ s)
            cand = s + step * g
            cand = np.array([project_onto_hull(cand[k], hulls[k]) for k in range(len(hulls))])
            obj_c = _objective(y, cand)
            if obj_c > obj + 1e-14:
                s, obj = cand, obj_c
                if trace is not None:
                    trace.append(obj)
            elif cfg.step_rule == "backtracking" and step > 1e-8 / (2.0 * lam):
                step *= 0.5
            else:
                break
    return s


def inner_maximize(
    y: np.ndarray,
    hulls: list[HullRegion],
    s_init: np.ndarray,
    cfg: SolverConfig,
    trace: list[float] | None = None,
    n_random_starts: int = 2,
) -> tuple[np.ndarray, bool]:
    """Maximize s^H Y s over the per-entry convex polygons.

    Minorize-maximize: the linear surrogate 2 Re(s_t^H Y s) - s_t^H Y s_t
    lower-bounds the objective for PSD Y and separates across entries, each
    maximized over the polygon vertices in closed form. A vertex coordinate
    ascent polish and an objective-guarded projected-gradient step follow.
    The ascent runs from the supplied start, from the projected top
    eigenvector of Y, and from seeded random vertex picks; the best result
    wins, so the returned objective never drops below the s_init ascent.
    Returns the solution and a flag telling whether s_init needed projecting.
    """
    n = y.shape[0]
    if len(hulls) != n or len(s_init) != n:
        raise ValueError("dimension mismatch between Y, hulls and s_init")
    s0 = np.asarray(s_init, dtype=complex).copy()
    projected = False
    for k, hull in enumerate(hulls):
        if not hull_contains(s0[k], hull):
            s0[k] = project_onto_hull(s0[k], hull)
            projected = True

    starts = [s0]
    vals, vecs = np.linalg.eigh(y)
    if vals[-1] > 0:
        lead = vecs[:, -1]
        # align the global phase with the start, then push onto the polygons
        phase = np.vdot(lead, s0)
        if abs(phase) > 1e-12:
            lead = lead * (phase / abs(phase))
        scale = np.mean([abs(v) for v in s0]) / max(np.mean(np.abs(lead)), 1e-30)
        starts.append(np.array([
            project_onto_hull(lead[k] * scale, hulls[k]) for k in range(n)
        ]))
    rng = np.random.default_rng(cfg.seed)
    for _ in range(n_random_starts):
        starts.append(np.array([
            hulls[k].vertices[rng.integers(len(hulls[k].vertices))] for k in range(n)
        ]))

    best = None
    best_obj = -np.inf
    for i, start in enumerate(starts):
        cand = _ascend(y, hulls, start, cfg, trace=trace if i == 0 else None)
        obj = _objective(y, cand)
        if obj > best_obj + 1e-15:
            best, best_obj = cand, obj
    if trace is not None and (not trace or best_obj > trace[-1]):
        trace.append(best_obj)
    return best, projected


def build_feasible_structure(
    s0: Waveform, order: int, span: int
) -> tuple[Waveform, list[SimilaritySet], list[HullRegion], Constellation]:
    """Quantize the reference onto the alphabet and build per-entry similarity
    sets and hulls."""
    n = len(s0)
    c = Constellation(order=order, modulus=s0.modulus)
    q0 = quantize_reference(s0, c)
    sets = [build_similarity_set(q0.entries[k], k, span, c) for k in range(n)]
    hulls = [build_hull(ss) for ss in sets]
    return q0, sets, hulls, c


def cam_solve(scenario: Scenario, s0: Waveform, order: int, span: int,
              cfg: SolverConfig | None = None) -> SolverReport:
    """Discrete-phase waveform design by convex-hull relaxation.

    Outer rounds refresh Y from the current relaxed iterate and maximize the
    quadratic form over the product of hulls; the final iterate is quantized
    entrywise to the nearest similarity-set point.
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    q0, sets, hulls, _ = build_feasible_structure(s0, order, span)

    s = q0.entries.copy()
    trace_db: list[float] = []
    obj_trace: list[list[float]] = []
    projected = False
    sigma = scenario.target_snr
    rounds = 0
    for rounds in range(1, cfg.max_outer_iters + 1):
        y = quadratic_form_matrix(scenario, Waveform(s, modulus=s0.modulus))
        inner: list[float] = []
        s, proj = inner_maximize(y, hulls, s, cfg, trace=inner)
        projected = projected or proj
        obj_trace.append(inner)
        sinr_db = linear_to_db(sigma * _objective(quadratic_form_matrix(
            scenario, Waveform(s, modulus=s0.modulus)), s))
        trace_db.append(sinr_db)
        if rounds > 1 and abs(trace_db[-1] - trace_db[-2]) < cfg.outer_tol * max(abs(trace_db[-2]), 1.0):
            break

    q = np.array([quantize_nearest(s[k], sets[k]) for k in range(len(s))])
    quantized = Waveform(q, modulus=s0.modulus, constant_modulus=True)
    relaxed = Waveform(s, modulus=s0.modulus)
    return SolverReport(
        final_waveform=quantized,
        relaxed_waveform=relaxed,
        final_sinr_db=linear_to_db(optimal_sinr(scenario, quantized)),
        relaxed_sinr_db=trace_db[-1],
        sinr_trace_db=trace_db,
        objective_trace=obj_trace,
        outer_iterations=rounds,
        wall_time=time.perf_counter() - t0,
        similarity_tolerance=sets[0].tolerance,
        similarity_arc=sets[0].arc,
        projected_init=projected,
    )


def _project_onto_arc(z: complex, center_angle: float, half_width: float, modulus: float) -> complex:
    """Nearest point of the circular arc {modulus * e^{j a} : |a - center| <= w}."""
    if half_width >= np.pi:
        if z == 0:
            return modulus * np.exp(1j * center_angle)
        return modulus * z / abs(z)
    if z == 0:
        return modulus * np.exp(1j * center_angle)
    d = np.angle(z * np.exp(-1j * center_angle))
    d = float(np.clip(d, -half_width, half_width))
    return modulus * np.exp(1j * (center_angle + d))


def continuous_baseline(scenario: Scenario, s0: Waveform, tolerance: float,
                        cfg: SolverConfig | None = None) -> SolverReport:
    """Continuous-phase design under the same similarity budget.

    The per-entry feasible set is the circular arc of phases within
    arccos(1 - tolerance^2 / 2) of the reference phase. The inner ascent uses
    the same linear minorant as the hull solver, maximized on each arc in
    closed form (clamp the phase of the coupling coefficient to the arc).
    """
    if not 0.0 <= tolerance <= 2.0:
        raise ValueError("similarity tolerance must be in [0, 2]")
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    half = float(np.arccos(np.clip(1.0 - tolerance ** 2 / 2.0, -1.0, 1.0)))
    centers = np.angle(s0.entries)
    mod = s0.modulus
    sigma = scenario.target_snr

    s = s0.entries.copy()
    trace_db: list[float] = []
    obj_trace: list[list[float]] = []
    rounds = 0
    for rounds in range(1, cfg.max_outer_iters + 1):
        y = quadratic_form_matrix(scenario, Waveform(s, modulus=mod))
        inner: list[float] = [_objective(y, s)]
        for _ in range(cfg.inner_max_iters):
            c = y @ s
            if np.max(np.abs(c)) < 1e-300:
                break
            s_new = np.array([
                _project_onto_arc(c[k], centers[k], half, mod) for k in range(len(s))
            ])
            obj_new = _objective(y, s_new)
            if obj_new < inner[-1] - 1e-12:
                break
            s = s_new
            inner.append(obj_new)
            if abs(inner[-1] - inner[-2]) <= cfg.inner_tol * max(abs(inner[-2]), 1.0):
                break
        obj_trace.append(inner)
        sinr_db = linear_to_db(sigma * _objective(quadratic_form_matrix(
            scenario, Waveform(s, modulus=mod)), s))
        trace_db.append(sinr_db)
        if rounds > 1 and abs(trace_db[-1] - trace_db[-2]) < cfg.outer_tol * max(abs(trace_db[-2]), 1.0):
            break

    out = Waveform(s, modulus=mod, constant_modulus=True)
    return SolverReport(
        final_waveform=out,
        relaxed_waveform=out,
        final_sinr_db=trace_db[-1],
        relaxed_sinr_db=trace_db[-1],
        sinr_trace_db=trace_db,
        objective_trace=obj_trace,
        outer_iterations=rounds,
        wall_time=time.perf_counter() - t0,
        similarity_tolerance=tolerance,
        similarity_arc=2.0 * half,
    )


class BudgetExceededError(ValueError):
    def __init__(self, cardinality: int, budget: int):
        self.cardinality = cardinality
        self.budget = budget
        super().__init__(
            f"enumeration would visit {cardinality} candidates, budget is {budget}"
        )


def exhaustive_oracle(y: np.ndarray, sets: list[SimilaritySet],
                      budget: int = 10 ** 6) -> tuple[np.ndarray, float]:
    """Global discrete maximum of q^H Y q by full enumeration.

    Ties resolve to the lexicographically smallest index vector. Refuses to
    run when the candidate count exceeds ``budget``.
    """
    sizes = [ss.span + 1 for ss in sets]
    cardinality = int(np.prod(sizes))
    if cardinality > budget:
        raise BudgetExceededError(cardinality, budget)
    point_lists = [ss.points for ss in sets]
    best_q = None
    best_obj = -np.inf
    for combo in itertools.product(*point_lists):
        q = np.array(combo)
        obj = _objective(y, q)
        if obj > best_obj + 1e-15:
            best_obj = obj
            best_q = q
    return best_q, float(best_obj)
