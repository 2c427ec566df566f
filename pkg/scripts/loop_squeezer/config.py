"""Experiment config loading and validation for loop-squeezer."""

import copy
import json
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from loop_squeezer.constants import DEFAULT_CONFIG, SCENARIO_PRESETS, THREADS_ENV
from loop_squeezer.errors import ConfigError, DegenerateGateError
from loop_squeezer.gates import METHODS, GateProgram, LossScenario
from loop_squeezer.sources import CatSpec

BUNDLED_DIR = Path(__file__).parent / "configs"
EXPERIMENTS = ("programs", "negativity_curves", "scalability")
ENGINES = ("fock", "phase_space")
INPUT_KINDS = ("vacuum", "cat")


def bundled_configs() -> List[str]:
    return sorted(p.name for p in BUNDLED_DIR.glob("*.json"))


def _resolve(path_or_name: Union[str, Path]) -> Path:
    path = Path(path_or_name)
    if path.is_file():
        return path
    name = path.name if path.suffix == ".json" else f"{path.name}.json"
    bundled = BUNDLED_DIR / name
    if bundled.is_file():
        return bundled
    raise ConfigError(f"no config file {path_or_name} (bundled: {', '.join(bundled_configs())})")


def merge_config(base: Dict[str, Any], user: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursive merge: nested dicts merge key by key, anything else replaces."""
    for key, value in user.items():
        if isinstance(value, Mapping) and isinstance(base.get(key), dict):
            merge_config(base[key], value)
        else:
            base[key] = copy.deepcopy(value)
    return base


def load_experiment_config(path_or_name: Union[str, Path]) -> Dict[str, Any]:
    """Defaults merged with a config file given by path or by bundled file name."""
    path = _resolve(path_or_name)
    try:
        with open(path) as f:
            user = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    if not isinstance(user, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    config = copy.deepcopy(DEFAULT_CONFIG)
    # a scenario dict replaces the default preset name
    return merge_config(config, user)


def _repeat(values: Sequence[Any], n: int) -> List[Any]:
    return [values[i % len(values)] for i in range(n)]


def build_program(entry: Mapping[str, Any], scenario: LossScenario) -> GateProgram:
    """GateProgram from a config entry: an r list or explicit R/phi/g steps.

    n_steps truncates explicit steps and cycles an r list.
    """
    label = str(entry.get("label", ""))
    n_steps = entry.get("n_steps")
    if "steps" in entry:
        program = GateProgram.from_explicit_steps(entry["steps"], scenario, label, entry.get("target_r"))
        if n_steps is not None:
            if n_steps > len(program):
                raise ValueError(f"n_steps {n_steps} exceeds the {len(program)} explicit steps")
            program = program.prefix(int(n_steps))
        return program
    r_list = list(entry.get("r", []))
    if n_steps is not None and r_list:
        r_list = _repeat(r_list, int(n_steps))
    return GateProgram.from_r_list(r_list, scenario, label)


def _is_int(value: Any, minimum: int) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= minimum


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _check_scenario(value: Any, where: str, problems: List[str]) -> Optional[LossScenario]:
    if isinstance(value, str) and value not in SCENARIO_PRESETS:
        problems.append(f"{where}: unknown scenario {value!r}; presets: {', '.join(sorted(SCENARIO_PRESETS))}")
        return None
    if not isinstance(value, (str, dict)):
        problems.append(f"{where}: must be a preset name or an object")
        return None
    try:
        return LossScenario.from_config(value)
    except (ValueError, TypeError) as e:
        problems.append(f"{where}: {e}")
        return None


def _check_programs(config: Dict[str, Any], scenario: Optional[LossScenario], problems: List[str]) -> None:
    programs = config.get("programs")
    if not isinstance(programs, list):
        problems.append("programs: must be a list")
        return
    if config.get("experiment") == "programs" and not programs:
        problems.append("programs: at least one program is required")
    for i, entry in enumerate(programs):
        where = f"programs.{i}"
        if not isinstance(entry, dict):
            problems.append(f"{where}: must be an object")
            continue
        if ("r" in entry) == ("steps" in entry):
            problems.append(f"{where}: give exactly one of 'r' or 'steps'")
            continue
        body = entry.get("r", entry.get("steps"))
        if not isinstance(body, list) or not body:
            problems.append(f"{where}: program must have at least one step")
            continue
        if "n_steps" in entry and not _is_int(entry["n_steps"], 1):
            problems.append(f"{where}.n_steps: must be an integer >= 1")
            continue
        if "r" in entry and not all(_is_number(r) for r in body):
            problems.append(f"{where}.r: entries must be numbers")
            continue
        if "steps" in entry:
            bad = [j for j, s in enumerate(body) if not isinstance(s, dict) or not _is_number(s.get("R"))]
            if bad:
                problems.append(f"{where}.steps: step(s) {bad} need a numeric R")
                continue
        if scenario is None:
            continue
        try:
            build_program(entry, scenario)
        except DegenerateGateError as e:
            problems.append(f"{where}: {e}")
        except (ValueError, TypeError, KeyError) as e:
            problems.append(f"{where}: {e}")


def _check_tomography(tomo: Dict[str, Any], problems: List[str]) -> None:
    phases = tomo.get("phases_deg", [])
    if not isinstance(phases, list) or not phases or not all(_is_number(p) for p in phases):
        problems.append("tomography.phases_deg: must be a nonempty list of numbers")
    elif len(set(phases)) != len(phases):
        problems.append("tomography.phases_deg: phases must be distinct")
    if not _is_int(tomo.get("subsets"), 2):
        problems.append("tomography.subsets: must be an integer >= 2")
    if not _is_int(tomo.get("samples_per_phase"), 1):
        problems.append("tomography.samples_per_phase: must be a positive integer")
    for key in ("cutoff", "bins"):
        if not _is_int(tomo.get(key), 2):
            problems.append(f"tomography.{key}: must be an integer >= 2")
    if not _is_int(tomo.get("max_iters"), 1):
        problems.append("tomography.max_iters: must be a positive integer")
    if not _is_number(tomo.get("tol")) or tomo["tol"] <= 0:
        problems.append("tomography.tol: must be positive")
    if not _is_int(tomo.get("seed"), 0):
        problems.append("tomography.seed: must be a non-negative integer")


def _check_positive(section: Dict[str, Any], name: str, keys: Sequence[str], problems: List[str]) -> None:
    for key in keys:
        value = section.get(key)
        if not _is_number(value) or value <= 0:
            problems.append(f"{name}.{key}: must be a positive number")


def validate_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Collect every violation and raise one ConfigError listing them all."""
    problems: List[str] = []
    unknown = sorted(set(config) - set(DEFAULT_CONFIG))
    if unknown:
        problems.append(f"unknown keys: {', '.join(unknown)}")
    if config.get("experiment") not in EXPERIMENTS:
        problems.append(f"experiment: must be one of {', '.join(EXPERIMENTS)}")
    if config.get("engine") not in ENGINES:
        problems.append(f"engine: must be one of {', '.join(ENGINES)}")
    if config.get("fock_method") not in METHODS:
        problems.append(f"fock_method: must be one of {', '.join(METHODS)}")
    if not _is_int(config.get("cutoff"), 2):
        problems.append("cutoff: must be an integer >= 2")

    source = config.get("input", {})
    if source.get("kind") not in INPUT_KINDS:
        problems.append(f"input.kind: must be one of {', '.join(INPUT_KINDS)}")
    try:
        CatSpec.from_dict(source.get("cat", {}))
    except (ValueError, TypeError) as e:
        problems.append(f"input.cat: {e}")

    scenario = _check_scenario(config.get("scenario"), "scenario", problems)
    _check_programs(config, scenario, problems)
    _check_tomography(config.get("tomography", {}), problems)

    grid = config.get("wigner_grid", {})
    if not _is_number(grid.get("extent")) or grid["extent"] <= 0:
        problems.append("wigner_grid.extent: must be positive")
    if not _is_int(grid.get("points"), 2):
        problems.append("wigner_grid.points: must be an integer >= 2")

    curves = config.get("negativity_curves", {})
    for i, name in enumerate(curves.get("scenarios", [])):
        _check_scenario(name, f"negativity_curves.scenarios.{i}", problems)
    if not _is_int(curves.get("max_steps"), 0):
        problems.append("negativity_curves.max_steps: must be a non-negative integer")
    r_curve = curves.get("r", [])
    if not r_curve or not all(_is_number(r) and r != 0 for r in r_curve):
        problems.append("negativity_curves.r: must be a nonempty list of nonzero numbers")
    elif len({math.copysign(1.0, r) for r in r_curve}) > 1:
        problems.append("negativity_curves.r: values must share a sign")

    scal = config.get("scalability", {})
    r_values = scal.get("r_values", [])
    if not r_values or not all(_is_number(r) and r > 0 for r in r_values):
        problems.append("scalability.r_values: must be a nonempty list of positive numbers")
    _check_scenario(scal.get("scenario", "best_recorded"), "scalability.scenario", problems)
    if not _is_int(scal.get("max_steps"), 1):
        problems.append("scalability.max_steps: must be an integer >= 1")
    if "detector" in scal and scal["detector"] not in ("on_off", "projector"):
        problems.append("scalability.detector: must be 'on_off' or 'projector'")
    try:
        CatSpec.from_dict(scal.get("cat", {}))
    except (ValueError, TypeError) as e:
        problems.append(f"scalability.cat: {e}")

    _check_positive(config.get("timing", {}), "timing", ("tau_ns", "pulse_length_ns", "component_response_ns"), problems)

    temporal = config.get("temporal", {})
    _check_positive(temporal, "temporal", ("gamma1_mhz", "gamma2_mhz", "variance", "duration_ns", "dt_ns"), problems)
    if temporal.get("gamma1_mhz") == temporal.get("gamma2_mhz"):
        problems.append("temporal: gamma1_mhz and gamma2_mhz must differ")
    if not _is_int(temporal.get("windows"), 1000):
        problems.append("temporal.windows: must be an integer >= 1000")

    runtime = config.get("runtime", {})
    if not _is_int(runtime.get("parallel_workers"), 1):
        problems.append("runtime.parallel_workers: must be an integer >= 1")

    numerics = config.get("numerics", {})
    _check_positive(numerics, "numerics", ("cutoff_warning_threshold", "quadrature_tol"), problems)
    if not _is_int(numerics.get("quadrature_max_nodes"), 32):
        problems.append("numerics.quadrature_max_nodes: must be an integer >= 32")
    if not _is_int(numerics.get("monte_carlo_trajectories", 0), 0):
        problems.append("numerics.monte_carlo_trajectories: must be a non-negative integer")

    if problems:
        raise ConfigError(problems)
    return config


def apply_overrides(
    config: Dict[str, Any], seed: Optional[int] = None, cutoff: Optional[int] = None
) -> Dict[str, Any]:
    """Copy of config with the --seed / --cutoff command-line overrides applied."""
    config = copy.deepcopy(config)
    if seed is not None:
        config["tomography"]["seed"] = seed
        config["temporal"]["seed"] = seed
    if cutoff is not None:
        config["cutoff"] = cutoff
    return config


def get_thread_count(config: Dict[str, Any]) -> int:
    """Worker threads: LOOP_SQUEEZER_THREADS if set, else the runtime section."""
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    runtime = config.get("runtime", {})
    if not runtime.get("parallel", True):
        return 1
    return max(1, int(runtime.get("parallel_workers", 1)))


def _parse_key(part: str) -> Union[str, int]:
    return int(part) if part.isdigit() else part


def set_by_path(config: Dict[str, Any], path: str, value: Any) -> Dict[str, Any]:
    """Copy of config with the value at a dotted path (list indices as numbers) replaced."""
    config = copy.deepcopy(config)
    parts = [_parse_key(p) for p in path.split(".")]
    if not path or any(p == "" for p in parts):
        raise ConfigError(f"invalid parameter path {path!r}")
    node: Any = config
    for part in parts[:-1]:
        try:
            node = node[part]
        except (KeyError, IndexError, TypeError) as e:
            raise ConfigError(f"parameter path {path!r} not found at {part!r}") from e
    last = parts[-1]
    if isinstance(node, list):
        if not isinstance(last, int) or last >= len(node):
            raise ConfigError(f"parameter path {path!r}: index {last!r} out of range")
    elif not isinstance(node, dict):
        raise ConfigError(f"parameter path {path!r} does not lead into an object or list")
    node[last] = value
    return config
