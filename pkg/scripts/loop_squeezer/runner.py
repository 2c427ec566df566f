"""Config-driven experiment pipelines: gate programs, negativity curves, scalability.

Library code here never prints; warnings raised during a run are recorded in the
report under "warnings".
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from loop_squeezer.config import build_program, get_thread_count, set_by_path, validate_config
from loop_squeezer.constants import SCALABILITY_CAT, VERSION
from loop_squeezer.fock import (
    FockState,
    fidelity,
    make_vacuum,
    moments,
    save_state,
    wigner,
    wigner_grid,
)
from loop_squeezer.fs import FileLock, ensure_out_dir, write_csv, write_json
from loop_squeezer.gates import (
    GateProgram,
    LossScenario,
    fidelity_chain,
    ideal_model_predict,
    realistic_model_predict,
)
from loop_squeezer.gaussian import (
    GaussianState,
    apply_channel,
    gaussian_density,
    gaussian_fidelity,
    squeeze_cov,
)
from loop_squeezer.projections import max_negative_steps, negativity_curve
from loop_squeezer.scheduler import TimingBudget, check_timing, compile_schedule
from loop_squeezer.sources import CatSpec, PhaseSpaceCat, cat_phase_space, make_cat
from loop_squeezer.temporal import (
    NS,
    ModeFunction,
    eval_mode,
    fit_mode,
    mode_overlap,
    shifted_mode,
    synthesize_timeseries,
    time_grid,
)
from loop_squeezer.tomography import (
    five_fold_metrics,
    gaussian_ellipse_fit,
    normalized_variances,
    reference_metrics,
    sample_quadratures,
)

Writer = Callable[[Path], None]
Progress = Optional[Callable[[], None]]
PhaseSpaceState = Union[GaussianState, PhaseSpaceCat]

SWEEP_COLUMNS = {
    "programs": [
        "value",
        "label",
        "fidelity_ideal_theory",
        "w00",
        "var_x",
        "var_p",
        "var_x_ratio",
        "var_p_ratio",
    ],
    "negativity_curves": ["value", "scenario", "w00_final", "last_negative_step"],
    "scalability": ["value", "r", "max_steps", "squeezing_db"],
}


def _scenario_label(value: Any) -> str:
    return value if isinstance(value, str) else str(value.get("name", "custom"))


def _timing(config: Dict[str, Any]) -> Dict[str, Any]:
    t = config["timing"]
    budget = TimingBudget(t["pulse_length_ns"], t["component_response_ns"], t["tau_ns"])
    return check_timing(budget).to_json()


def _grid_axes(config: Dict[str, Any]) -> np.ndarray:
    grid = config["wigner_grid"]
    return np.linspace(-grid["extent"], grid["extent"], grid["points"])


def _grid_rows(xs: np.ndarray, values: np.ndarray) -> List[Tuple[float, float, float]]:
    return [(float(x), float(p), float(values[i, j])) for i, x in enumerate(xs) for j, p in enumerate(xs)]


def _steps_json(program: GateProgram) -> List[Dict[str, Any]]:
    return [
        {"R": s.R, "phi_deg": s.phi_deg, "g": s.gain, "variant": s.variant, "implied_r": s.implied_r}
        for s in program.steps
    ]


# Fock engine


def _fock_input(config: Dict[str, Any]) -> Tuple[FockState, Optional[float]]:
    cutoff = config["cutoff"]
    threshold = config["numerics"]["cutoff_warning_threshold"]
    if config["input"]["kind"] == "cat":
        state, probability = make_cat(CatSpec.from_dict(config["input"]["cat"]), cutoff, threshold)
        return state, probability
    return make_vacuum(1, cutoff), None


def _fock_program(
    k: int, program: GateProgram, state: FockState, config: Dict[str, Any], workers: int
) -> Tuple[Dict[str, Any], Dict[str, Writer]]:
    numerics = config["numerics"]
    tomo = config["tomography"]
    result = realistic_model_predict(
        state,
        program,
        method=config["fock_method"],
        trajectories=numerics.get("monte_carlo_trajectories", 0),
        seed=tomo["seed"],
        workers=workers,
        tol=numerics["quadrature_tol"],
        max_nodes=numerics["quadrature_max_nodes"],
        threshold=numerics["cutoff_warning_threshold"],
    )
    out = result.output
    ideal = ideal_model_predict(state, program)
    out_m = moments(out)
    var_x_ratio, var_p_ratio = normalized_variances(out, state)
    entry: Dict[str, Any] = {
        "label": program.label,
        "r": list(program.r_values),
        "steps": _steps_json(program),
        "fidelity_ideal_theory": fidelity(out, ideal),
        "fidelity_chain": fidelity_chain(result),
        "negativity_in": wigner(state, 0.0, 0.0),
        "w00": wigner(out, 0.0, 0.0),
        "var_x": out_m.var_x,
        "var_p": out_m.var_p,
        "var_x_ratio": var_x_ratio,
        "var_p_ratio": var_p_ratio,
        "ellipse": gaussian_ellipse_fit(out).to_json(),
    }
    files: Dict[str, Writer] = {}
    if tomo["enabled"]:
        dataset = sample_quadratures(out, tomo["phases_deg"], tomo["samples_per_phase"], tomo["seed"] + k, workers)
        summary = five_fold_metrics(
            dataset,
            reference_metrics(ideal, state),
            subsets=tomo["subsets"],
            cutoff=tomo["cutoff"],
            max_iters=tomo["max_iters"],
            tol=tomo["tol"],
            bins=tomo["bins"],
            diluted=tomo["diluted"],
            workers=workers,
        )
        for key, stats in summary.items():
            entry[f"{key}_mean"] = stats["mean"]
            entry[f"{key}_se"] = stats["se"]
        if config["outputs"]["dataset_csv"]:
            files[f"program{k}_quadratures.csv"] = dataset.to_csv
    outputs = config["outputs"]
    if outputs["wigner_csv"]:
        xs = _grid_axes(config)
        files[f"program{k}_wigner.csv"] = lambda p: write_csv(p, ["x", "p", "w"], _grid_rows(xs, wigner_grid(out, xs, xs)))
    if outputs["states_json"]:
        files[f"program{k}_state.json"] = lambda p: save_state(out, p)
    return entry, files


# Phase-space engine


def _phase_space_input(config: Dict[str, Any]) -> PhaseSpaceState:
    if config["input"]["kind"] == "cat":
        return cat_phase_space(CatSpec.from_dict(config["input"]["cat"]))
    return GaussianState.vacuum()


def _ps_moments(state: PhaseSpaceState) -> GaussianState:
    return state if isinstance(state, GaussianState) else state.moments()


def _ps_wigner(state: PhaseSpaceState, x: Any, p: Any) -> np.ndarray:
    if isinstance(state, GaussianState):
        points = np.stack(np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float)), axis=-1)
        return gaussian_density(points, state.mean, state.cov)
    return state.wigner(x, p)


def _ps_apply(state: PhaseSpaceState, X: np.ndarray, Y: np.ndarray) -> PhaseSpaceState:
    if isinstance(state, GaussianState):
        return apply_channel(state, X, Y)
    return state.apply_channel(X, Y)


def _phase_space_program(
    k: int, program: GateProgram, state: PhaseSpaceState, config: Dict[str, Any]
) -> Tuple[Dict[str, Any], Dict[str, Writer]]:
    current = state
    chain: List[PhaseSpaceState] = []
    for X, Y in program.gaussian_channels():
        current = _ps_apply(current, X, Y)
        chain.append(current)
    in_m, out_m = _ps_moments(state), _ps_moments(current)
    entry: Dict[str, Any] = {
        "label": program.label,
        "r": list(program.r_values),
        "steps": _steps_json(program),
        "negativity_in": float(_ps_wigner(state, 0.0, 0.0)),
        "w00": float(_ps_wigner(current, 0.0, 0.0)),
        "var_x": out_m.var_x,
        "var_p": out_m.var_p,
        "var_x_ratio": out_m.var_x / in_m.var_x,
        "var_p_ratio": out_m.var_p / in_m.var_p,
    }
    if isinstance(state, GaussianState):
        totals = np.cumsum(program.r_values)
        chain_f = [gaussian_fidelity(s, squeeze_cov(state, float(r))) for s, r in zip(chain, totals)]  # type: ignore[arg-type]
        entry["fidelity_chain"] = chain_f
        entry["fidelity_ideal_theory"] = chain_f[-1]
    files: Dict[str, Writer] = {}
    if config["outputs"]["wigner_csv"]:
        xs = _grid_axes(config)
        gx, gp = np.meshgrid(xs, xs, indexing="ij")
        values = np.asarray(_ps_wigner(current, gx, gp))
        files[f"program{k}_wigner.csv"] = lambda p: write_csv(p, ["x", "p", "w"], _grid_rows(xs, values))
    return entry, files


def _run_programs(config: Dict[str, Any], workers: int, progress: Progress = None) -> Tuple[Dict[str, Any], Dict[str, Writer]]:
    scenario = LossScenario.from_config(config["scenario"])
    programs = [build_program(entry, scenario) for entry in config["programs"]]
    report: Dict[str, Any] = {"scenario": scenario.name, "engine": config["engine"]}
    files: Dict[str, Writer] = {}
    entries = []
    if config["engine"] == "fock":
        state, probability = _fock_input(config)
        if probability is not None:
            report["herald_probability"] = probability
        for k, program in enumerate(programs):
            entry, extra = _fock_program(k, program, state, config, workers)
            entries.append(entry)
            files.update(extra)
            if progress:
                progress()
    else:
        ps_state = _phase_space_input(config)
        for k, program in enumerate(programs):
            entry, extra = _phase_space_program(k, program, ps_state, config)
            entries.append(entry)
            files.update(extra)
            if progress:
                progress()
    if config["outputs"]["schedule_csv"]:
        tau = config["timing"]["tau_ns"]
        for k, program in enumerate(programs):
            schedule = compile_schedule(program, tau, input_kind=config["input"]["kind"])
            entries[k]["vbs_sequence"] = schedule.vbs_sequence
            files[f"program{k}_schedule.csv"] = schedule.to_csv
    report["programs"] = entries
    return report, files


# Loss projections


def _map(fn: Callable[[Any], Any], items: Sequence[Any], workers: int, progress: Progress = None) -> List[Any]:
    """Results in input order, serial or threaded."""
    results = []
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for result in executor.map(fn, items):
                results.append(result)
                if progress:
                    progress()
        return results
    for item in items:
        results.append(fn(item))
        if progress:
            progress()
    return results


def _last_negative(values: Sequence[float]) -> int:
    """Largest step count n with W(0,0) < 0 for every count up to n; -1 if the input is not negative."""
    last = -1
    for n, value in enumerate(values):
        if value >= 0:
            break
        last = n
    return last


def _run_negativity_curves(config: Dict[str, Any], workers: int, progress: Progress = None) -> Tuple[Dict[str, Any], Dict[str, Writer]]:
    section = config["negativity_curves"]
    cat = CatSpec.from_dict(config["input"]["cat"])

    def curve(name: Any) -> Dict[str, Any]:
        scenario = LossScenario.from_config(name)
        values = negativity_curve(cat, section["r"], scenario, section["max_steps"])
        return {
            "scenario": _scenario_label(name),
            "w00": values,
            "last_negative_step": _last_negative(values),
        }

    curves = _map(curve, section["scenarios"], workers, progress)
    rows = [(c["scenario"], n, w) for c in curves for n, w in enumerate(c["w00"])]
    files: Dict[str, Writer] = {
        "negativity_curves.csv": lambda p: write_csv(p, ["scenario", "step", "w00"], rows)
    }
    return {"r": list(section["r"]), "curves": curves}, files


def _run_scalability(config: Dict[str, Any], workers: int, progress: Progress = None) -> Tuple[Dict[str, Any], Dict[str, Writer]]:
    section = config["scalability"]
    scenario = LossScenario.from_config(section["scenario"])
    cat_data = dict(SCALABILITY_CAT)
    cat_data.update(section.get("cat", {}))
    if "detector" in section:
        cat_data["detector"] = section["detector"]
    cat = CatSpec.from_dict(cat_data)

    def count(r: float) -> Dict[str, Any]:
        return {
            "r": float(r),
            "max_steps": max_negative_steps(r, scenario, cat, section["max_steps"]),
            "squeezing_db": 20.0 * r / math.log(10.0),
        }

    rows = _map(count, section["r_values"], workers, progress)
    files: Dict[str, Writer] = {
        "scalability.csv": lambda p: write_csv(
            p, ["r", "max_steps", "squeezing_db"], [(x["r"], x["max_steps"], x["squeezing_db"]) for x in rows]
        )
    }
    return {"scenario": scenario.name, "detector": cat.detector, "rows": rows}, files


PIPELINES = {
    "programs": _run_programs,
    "negativity_curves": _run_negativity_curves,
    "scalability": _run_scalability,
}


def _collect_warnings(caught: Sequence[warnings.WarningMessage]) -> List[str]:
    seen: List[str] = []
    for w in caught:
        text = f"{w.category.__name__}: {w.message}"
        if text not in seen:
            seen.append(text)
    return seen


def _write_outputs(out_dir: Path, report: Dict[str, Any], files: Dict[str, Writer]) -> None:
    out = ensure_out_dir(out_dir)
    with FileLock(out):
        for name, writer in files.items():
            writer(out / name)
        write_json(out / "report.json", report)


def run_experiment(
    config: Dict[str, Any],
    out_dir: Optional[Path] = None,
    workers: Optional[int] = None,
    progress: Progress = None,
) -> Dict[str, Any]:
    """Validate config, run its pipeline and return the report; files go to out_dir."""
    validate_config(config)
    workers = get_thread_count(config) if workers is None else workers
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        body, files = PIPELINES[config["experiment"]](config, workers, progress)
    report: Dict[str, Any] = {
        "name": config["name"],
        "experiment": config["experiment"],
        "version": VERSION,
        "timing": _timing(config),
    }
    report.update(body)
    report["warnings"] = _collect_warnings(caught)
    if out_dir is not None:
        _write_outputs(Path(out_dir), report, files)
    return report


def _sweep_rows(value: Any, report: Dict[str, Any]) -> List[Dict[str, Any]]:
    experiment = report["experiment"]
    if experiment == "programs":
        columns = SWEEP_COLUMNS["programs"][1:]
        return [dict({"value": value}, **{c: p.get(c) for c in columns}) for p in report["programs"]]
    if experiment == "negativity_curves":
        return [
            {
                "value": value,
                "scenario": c["scenario"],
                "w00_final": c["w00"][-1],
                "last_negative_step": c["last_negative_step"],
            }
            for c in report["curves"]
        ]
    return [dict({"value": value}, **row) for row in report["rows"]]


def sweep(
    config: Dict[str, Any],
    path: str,
    values: Sequence[Any],
    out_path: Optional[Path] = None,
    workers: Optional[int] = None,
    progress: Progress = None,
) -> List[Dict[str, Any]]:
    """One run per value at the dotted config path; rows come back in value order."""
    validate_config(config)
    workers = get_thread_count(config) if workers is None else workers
    configs = [set_by_path(config, path, value) for value in values]
    for cfg in configs:
        validate_config(cfg)

    def run(cfg: Dict[str, Any]) -> Dict[str, Any]:
        return run_experiment(cfg, workers=1)

    reports = _map(run, configs, workers, progress)
    rows = [row for value, report in zip(values, reports) for row in _sweep_rows(value, report)]
    if out_path is not None:
        columns = SWEEP_COLUMNS[config["experiment"]]
        write_csv(Path(out_path), columns, [[row.get(c) for c in columns] for row in rows])
    return rows


def run_schedule(config: Dict[str, Any], out_dir: Optional[Path] = None) -> Dict[str, Any]:
    """Control schedules of the configured programs plus the timing check."""
    validate_config(config)
    scenario = LossScenario.from_config(config["scenario"])
    tau = config["timing"]["tau_ns"]
    kind = config["input"]["kind"]
    schedules = [compile_schedule(build_program(e, scenario), tau, input_kind=kind) for e in config["programs"]]
    report = {
        "name": config["name"],
        "timing": _timing(config),
        "schedules": [s.to_json() for s in schedules],
    }
    if out_dir is not None:
        files: Dict[str, Writer] = {f"program{k}_schedule.csv": s.to_csv for k, s in enumerate(schedules)}
        _write_outputs(Path(out_dir), report, files)
    return report


def run_mode_fit(
    config: Dict[str, Any], out_dir: Optional[Path] = None, workers: Optional[int] = None
) -> Dict[str, Any]:
    """Synthesize heralded windows from the configured packet and fit it back."""
    validate_config(config)
    workers = get_thread_count(config) if workers is None else workers
    t = config["temporal"]
    truth = ModeFunction.from_mhz(t["gamma1_mhz"], t["gamma2_mhz"], t["t0_ns"])
    guess = t["initial_guess"]
    initial = ModeFunction.from_mhz(guess["gamma1_mhz"], guess["gamma2_mhz"], guess["t0_ns"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ensemble = synthesize_timeseries(
            truth, t["variance"], t["windows"], t["duration_ns"], t["dt_ns"], t["seed"], workers
        )
        result = fit_mode(ensemble, initial)
    tau_s = config["timing"]["tau_ns"] * NS
    report = {
        "name": config["name"],
        "true_mode": truth.to_json(),
        "initial_guess": initial.to_json(),
        "fit": result.to_json(),
        "embedded_variance": t["variance"],
        "overlap_with_truth": abs(mode_overlap(result.mode, truth)),
        "adjacent_bin_overlap": mode_overlap(truth, shifted_mode(truth, 2, tau_s)),
        "warnings": _collect_warnings(caught),
    }
    if out_dir is not None:
        grid = time_grid(t["duration_ns"], t["dt_ns"])
        fitted = eval_mode(result.mode, grid)
        true_amp = eval_mode(truth, grid)
        # the fitted packet may come out with the opposite global sign
        sign = 1.0 if float(np.dot(fitted, true_amp)) >= 0 else -1.0
        rows = [(float(x / NS), float(a), float(sign * b)) for x, a, b in zip(grid, true_amp, fitted)]
        files: Dict[str, Writer] = {"mode_profile.csv": lambda p: write_csv(p, ["t_ns", "true", "fitted"], rows)}
        _write_outputs(Path(out_dir), report, files)
    return report
