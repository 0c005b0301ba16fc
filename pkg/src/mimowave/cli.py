"""Experiment driver: config parsing, run orchestration, CSV/JSON emission.

Config files are flat ``section.key = value`` text. Angles are degrees in
configs and radians internally. All emitted files are deterministic for a
fixed config and seed: 12 significant digits, ``.`` decimal separator,
``\\n`` line endings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import analysis, model, solver
from .model import Scenario, chirp_reference
from .solver import BudgetExceededError, SolverConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_BUDGET = 4

MODES = ("cam", "baseline", "oracle", "sweep", "beampattern")
OUT_DIR_ENV = "MIMOWAVE_OUT_DIR"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    omega: int
    eta: int
    solver: SolverConfig
    out_dir: Path
    formats: tuple[str, ...]
    mode: str
    sweep_n_values: tuple[int, ...] = (8,)
    sweep_omega_values: tuple[int, ...] = (16,)
    sweep_eta_values: tuple[int, ...] = (6,)
    oracle_trials: int = 10
    oracle_budget: int = 10 ** 6
    beampattern_grid_size: int = 721


_KNOWN_KEYS = {
    "scenario.n_tx", "scenario.n_rx", "scenario.n_samples",
    "scenario.target_angle_deg", "scenario.target_power_db",
    "scenario.interferer_angles_deg", "scenario.interferer_powers_db",
    "scenario.noise_power_db",
    "constellation.omega", "constellation.eta",
    "solver.max_outer_iters", "solver.outer_tol", "solver.inner_max_iters",
    "solver.inner_tol", "solver.step_rule", "solver.seed",
    "output.directory", "output.formats",
    "mode",
    "sweep.n_values", "sweep.omega_values", "sweep.eta_values",
    "oracle.trials", "oracle.budget",
    "beampattern.grid_size",
}


def _parse_kv(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = val
    return values


def _get(values, key, conv, default=None):
    if key not in values:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return conv(values[key])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"key {key!r}: invalid value {values[key]!r} ({exc})") from exc


def _float_list(text: str) -> tuple[float, ...]:
    if not text:
        return ()
    return tuple(float(x) for x in text.split(","))


def _int_list(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(int(x) for x in text.split(","))


def load_config(path, mode: str | None = None,
                out_dir: str | None = None, seed: int | None = None) -> RunConfig:
    """Parse and validate a config file; CLI overrides win over file values."""
    path = Path(path)
    values = _parse_kv(path)

    angles = _get(values, "scenario.interferer_angles_deg", _float_list, ())
    powers = _get(values, "scenario.interferer_powers_db", _float_list, ())
    if len(angles) != len(powers):
        raise ConfigError(
            "scenario.interferer_angles_deg and scenario.interferer_powers_db "
            f"have different lengths ({len(angles)} vs {len(powers)})")
    try:
        scenario = Scenario(
            n_tx=_get(values, "scenario.n_tx", int),
            n_rx=_get(values, "scenario.n_rx", int),
            n_samples=_get(values, "scenario.n_samples", int),
            target_angle=np.deg2rad(_get(values, "scenario.target_angle_deg", float)),
            target_power_db=_get(values, "scenario.target_power_db", float),
            interferers=tuple((np.deg2rad(a), p) for a, p in zip(angles, powers)),
            noise_power_db=_get(values, "scenario.noise_power_db", float, 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc

    omega = _get(values, "constellation.omega", int)
    eta = _get(values, "constellation.eta", int)
    _validate_pair(omega, eta)

    try:
        solver_cfg = SolverConfig(
            max_outer_iters=_get(values, "solver.max_outer_iters", int, 50),
            outer_tol=_get(values, "solver.outer_tol", float, 1e-4),
            inner_max_iters=_get(values, "solver.inner_max_iters", int, 200),
            inner_tol=_get(values, "solver.inner_tol", float, 1e-10),
            step_rule=_get(values, "solver.step_rule", str, "backtracking"),
            seed=seed if seed is not None else _get(values, "solver.seed", int, 0),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid solver config: {exc}") from exc

    formats = tuple(f.strip() for f in _get(values, "output.formats", str, "csv, json").split(","))
    for f in formats:
        if f not in ("csv", "json"):
            raise ConfigError(f"output.formats: unknown format {f!r}")

    run_mode = mode or values.get("mode", "cam")
    if run_mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {run_mode!r}")

    directory = out_dir or os.environ.get(OUT_DIR_ENV) or values.get("output.directory", "out")

    sweep_n = _get(values, "sweep.n_values", _int_list, (scenario.n_samples,))
    sweep_omega = _get(values, "sweep.omega_values", _int_list, (omega,))
    sweep_eta = _get(values, "sweep.eta_values", _int_list, (eta,))
    if len(sweep_omega) != len(sweep_eta):
        raise ConfigError("sweep.omega_values and sweep.eta_values differ in length")
    for om, et in zip(sweep_omega, sweep_eta):
        _validate_pair(om, et)

    return RunConfig(
        scenario=scenario,
        omega=omega,
        eta=eta,
        solver=solver_cfg,
        out_dir=Path(directory),
        formats=formats,
        mode=run_mode,
        sweep_n_values=sweep_n,
        sweep_omega_values=sweep_omega,
        sweep_eta_values=sweep_eta,
        oracle_trials=_get(values, "oracle.trials", int, 10),
        oracle_budget=_get(values, "oracle.budget", int, 10 ** 6),
        beampattern_grid_size=_get(values, "beampattern.grid_size", int, 721),
    )


def _validate_pair(omega: int, eta: int):
    if omega < 2:
        raise ConfigError("omega must be >= 2")
    if eta % 2 != 0:
        raise ConfigError("eta must be even")
    if eta < 2:
        raise ConfigError("eta must be >= 2")
    if eta > omega:
        raise ConfigError("eta exceeds omega")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_csv(path: Path, header: list[str], rows: list[list]):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _write_json(path: Path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def similarity_tolerance(omega: int, eta: int) -> float:
    """Euclidean similarity budget implied by an (omega, eta) pair."""
    arc = eta * 2.0 * np.pi / omega
    return float(np.sqrt(2.0 * (1.0 - np.cos(arc / 2.0))))


def _solution_payload(report: solver.SolverReport, cfg: RunConfig) -> dict:
    return {
        "entries": [[z.real, z.imag] for z in report.final_waveform.entries],
        "sinr_db": report.final_sinr_db,
        "similarity_tolerance": report.similarity_tolerance,
        "similarity_arc": report.similarity_arc,
        "omega": cfg.omega,
        "eta": cfg.eta,
        "n_tx": cfg.scenario.n_tx,
        "n_samples": cfg.scenario.n_samples,
        "outer_iterations": report.outer_iterations,
    }


def _run_cam(cfg: RunConfig) -> solver.SolverReport:
    s0 = chirp_reference(cfg.scenario.n_tx, cfg.scenario.n_samples)
    return solver.cam_solve(cfg.scenario, s0, cfg.omega, cfg.eta, cfg.solver)


def _run_baseline(cfg: RunConfig) -> solver.SolverReport:
    s0 = chirp_reference(cfg.scenario.n_tx, cfg.scenario.n_samples)
    eps = similarity_tolerance(cfg.omega, cfg.eta)
    return solver.continuous_baseline(cfg.scenario, s0, eps, cfg.solver)


def _mode_solve(cfg: RunConfig, out: Path):
    report = _run_cam(cfg) if cfg.mode == "cam" else _run_baseline(cfg)
    if "csv" in cfg.formats:
        _write_csv(out / "sinr_trace.csv", ["iter", "sinr_db_relaxed"],
                   [[i + 1, float(v)] for i, v in enumerate(report.sinr_trace_db)])
    if "json" in cfg.formats:
        _write_json(out / "solution.json", _solution_payload(report, cfg))


def _mode_beampattern(cfg: RunConfig, out: Path):
    report = _run_cam(cfg)
    bp = analysis.beampattern(report.final_waveform, cfg.scenario, cfg.beampattern_grid_size)
    rows = [[float(np.rad2deg(a)), float(p), float(pn)]
            for a, p, pn in zip(bp.angles, bp.power_db, bp.normalized_db)]
    _write_csv(out / "beampattern.csv",
               ["theta_deg", "power_db", "power_db_normalized"], rows)
    if "json" in cfg.formats:
        _write_json(out / "solution.json", _solution_payload(report, cfg))


def _mode_oracle(cfg: RunConfig, out: Path):
    """Fixed-Y trials on randomized tiny scenes: hull solver vs full enumeration."""
    rng = np.random.default_rng(cfg.solver.seed)
    rows = []
    for trial in range(cfg.oracle_trials):
        n_int = int(rng.integers(0, 3))
        scen = Scenario(
            n_tx=cfg.scenario.n_tx,
            n_rx=cfg.scenario.n_rx,
            n_samples=cfg.scenario.n_samples,
            target_angle=float(rng.uniform(-np.pi / 3, np.pi / 3)),
            target_power_db=cfg.scenario.target_power_db,
            interferers=tuple(
                (float(rng.uniform(-np.pi / 2, np.pi / 2)), float(rng.uniform(10, 30)))
                for _ in range(n_int)),
            noise_power_db=cfg.scenario.noise_power_db,
        )
        s0 = chirp_reference(scen.n_tx, scen.n_samples)
        q0, sets, hulls, _ = solver.build_feasible_structure(s0, cfg.omega, cfg.eta)
        y = model.quadratic_form_matrix(scen, q0)
        s_rel, _ = solver.inner_maximize(y, hulls, q0.entries, cfg.solver)
        from .constellation import quantize_nearest
        q = np.array([quantize_nearest(s_rel[k], sets[k]) for k in range(len(s_rel))])
        cam_obj = float(np.real(q.conj() @ y @ q))
        _, oracle_obj = solver.exhaustive_oracle(y, sets, cfg.oracle_budget)
        rows.append([trial, oracle_obj, cam_obj,
                     float(10.0 * np.log10(oracle_obj / cam_obj))])
    _write_csv(out / "oracle_gap.csv", ["trial", "oracle_obj", "cam_obj", "gap_db"], rows)


def _mode_sweep(cfg: RunConfig, out: Path):
    rows = []
    baseline_cache: dict[tuple[int, float], float] = {}
    for n in cfg.sweep_n_values:
        scen = replace(cfg.scenario, n_samples=n)
        s0 = chirp_reference(scen.n_tx, n)
        for om, et in zip(cfg.sweep_omega_values, cfg.sweep_eta_values):
            eps = similarity_tolerance(om, et)
            rep = solver.cam_solve(scen, s0, om, et, cfg.solver)
            key = (n, round(eps, 12))
            if key not in baseline_cache:
                base = solver.continuous_baseline(scen, s0, eps, cfg.solver)
                baseline_cache[key] = base.final_sinr_db
            base_db = baseline_cache[key]
            rows.append([n, om, et, eps, rep.final_sinr_db, base_db,
                         base_db - rep.final_sinr_db])
    _write_csv(out / "sweep.csv",
               ["n", "omega", "eta", "epsilon", "cam_sinr_db", "baseline_sinr_db", "gap_db"],
               rows)


def run(cfg: RunConfig) -> int:
    """Execute one mode; returns the process exit code."""
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    try:
        if cfg.mode in ("cam", "baseline"):
            _mode_solve(cfg, out)
        elif cfg.mode == "beampattern":
            _mode_beampattern(cfg, out)
        elif cfg.mode == "oracle":
            _mode_oracle(cfg, out)
        elif cfg.mode == "sweep":
            _mode_sweep(cfg, out)
    except BudgetExceededError as exc:
        _emit_error("oracle_budget_exceeded", str(exc))
        return EXIT_BUDGET
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        _emit_error("numerical_failure", str(exc))
        return EXIT_NUMERICAL
    return EXIT_OK


def _emit_error(kind: str, message: str):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def load_solution(path) -> np.ndarray:
    """Reload the quantized entries written by ``solution.json``."""
    payload = json.loads(Path(path).read_text())
    return np.array([re + 1j * im for re, im in payload["entries"]])


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mimowave",
        description="Discrete-phase MIMO radar waveform design experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "solve": "cam",
        "baseline": "baseline",
        "oracle": "oracle",
        "sweep": "sweep",
        "beampattern": "beampattern",
    }
    for name in commands:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, mode=commands[args.command],
                          out_dir=args.out, seed=args.seed)
    except ConfigError as exc:
        _emit_error("config_error", str(exc))
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
