"""Tests for loop_squeezer.config module."""

import copy
import json
from pathlib import Path
from typing import Any, Dict

import pytest

from loop_squeezer.config import (
    apply_overrides,
    build_program,
    bundled_configs,
    get_thread_count,
    load_experiment_config,
    merge_config,
    set_by_path,
    validate_config,
)
from loop_squeezer.constants import DEFAULT_CONFIG
from loop_squeezer.errors import ConfigError
from loop_squeezer.gates import LossScenario


class TestBundledConfigs:
    """Tests for the shipped experiment configs."""

    def test_listed(self) -> None:
        """The reproduced experiments ship as JSON configs."""
        names = bundled_configs()
        assert "table1_vacuum.json" in names
        assert "appendixD_iterations.json" in names
        assert all(n.endswith(".json") for n in names)

    @pytest.mark.parametrize("name", bundled_configs())
    def test_bundled_config_validates(self, name: str) -> None:
        """Bundled configs load and pass validation."""
        config = load_experiment_config(name)
        assert validate_config(config) is config
        assert config["name"] == name[: -len(".json")]

    def test_name_without_suffix(self) -> None:
        """Bundled names resolve with or without .json."""
        assert load_experiment_config("table2_vacuum")["cutoff"] == 30


class TestLoadExperimentConfig:
    """Tests for load_experiment_config."""

    def test_defaults_fill_missing_keys(self, temp_dir: Path) -> None:
        """Keys absent from the file come from the defaults."""
        path = temp_dir / "mine.json"
        path.write_text(json.dumps({"name": "mine", "tomography": {"seed": 3}}))

        config = load_experiment_config(path)

        assert config["name"] == "mine"
        assert config["tomography"]["seed"] == 3
        assert config["tomography"]["subsets"] == DEFAULT_CONFIG["tomography"]["subsets"]
        assert config["engine"] == DEFAULT_CONFIG["engine"]

    def test_defaults_not_mutated(self, temp_dir: Path) -> None:
        """Loading never changes DEFAULT_CONFIG."""
        before = copy.deepcopy(DEFAULT_CONFIG)
        path = temp_dir / "mine.json"
        path.write_text(json.dumps({"tomography": {"seed": 3}, "programs": [{"r": [0.2]}]}))
        load_experiment_config(path)
        assert DEFAULT_CONFIG == before

    def test_missing_file(self, temp_dir: Path) -> None:
        """An unknown name is a ConfigError."""
        with pytest.raises(ConfigError):
            load_experiment_config("no_such_config")

    def test_invalid_json(self, temp_dir: Path) -> None:
        """Broken JSON is a ConfigError."""
        path = temp_dir / "broken.json"
        path.write_text("{ not json }")
        with pytest.raises(ConfigError):
            load_experiment_config(path)

    def test_top_level_list(self, temp_dir: Path) -> None:
        """The top level must be an object."""
        path = temp_dir / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_experiment_config(path)


class TestMergeConfig:
    """Tests for merge_config."""

    def test_nested_merge(self) -> None:
        """Nested dicts merge key by key."""
        merged = merge_config({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}})
        assert merged == {"a": {"x": 1, "y": 3}, "b": 1}

    def test_dict_replaces_scalar(self) -> None:
        """A scenario object replaces a preset name."""
        merged = merge_config({"scenario": "current"}, {"scenario": {"name": "ideal"}})
        assert merged == {"scenario": {"name": "ideal"}}

    def test_lists_replace(self) -> None:
        """Lists are replaced, not concatenated."""
        assert merge_config({"r": [1, 2]}, {"r": [3]}) == {"r": [3]}


class TestBuildProgram:
    """Tests for build_program."""

    def test_r_list(self) -> None:
        """An r list becomes one step per value."""
        program = build_program({"label": "x", "r": [0.33, 0.14]}, LossScenario.preset("current"))
        assert len(program) == 2
        assert program.label == "x"
        assert program.r_values == (0.33, 0.14)

    def test_r_list_cycles(self) -> None:
        """n_steps cycles the r list."""
        program = build_program({"r": [0.33, 0.14, 0.37], "n_steps": 5}, LossScenario())
        assert program.r_values == (0.33, 0.14, 0.37, 0.33, 0.14)

    def test_explicit_steps_truncate(self) -> None:
        """n_steps keeps the leading explicit steps."""
        entry = {
            "steps": [{"R": 0.48, "g": -0.96}, {"R": 0.75, "g": 0.58}],
            "target_r": [0.33, 0.14],
            "n_steps": 1,
        }
        program = build_program(entry, LossScenario())
        assert len(program) == 1
        assert program.r_values == (0.33,)

    def test_explicit_steps_too_many(self) -> None:
        """n_steps cannot exceed the explicit steps."""
        with pytest.raises(ValueError):
            build_program({"steps": [{"R": 0.4, "g": -0.82}], "n_steps": 2}, LossScenario())


class TestValidateConfig:
    """Tests for validate_config."""

    def test_sample_config_valid(self, sample_config: Dict[str, Any]) -> None:
        """The fixture config passes."""
        validate_config(sample_config)

    def test_collects_all_problems(self, sample_config: Dict[str, Any]) -> None:
        """Every violation is reported at once."""
        sample_config["engine"] = "quantum"
        sample_config["cutoff"] = 1
        sample_config["bogus"] = True

        with pytest.raises(ConfigError) as exc:
            validate_config(sample_config)

        problems = exc.value.problems
        assert len(problems) == 3
        assert any("unknown keys: bogus" in p for p in problems)
        assert any(p.startswith("engine") for p in problems)
        assert any(p.startswith("cutoff") for p in problems)

    def test_programs_required(self, sample_config: Dict[str, Any]) -> None:
        """A programs experiment needs a program."""
        sample_config["programs"] = []
        with pytest.raises(ConfigError, match="at least one program"):
            validate_config(sample_config)

    def test_programs_optional_for_curves(self, sample_config: Dict[str, Any]) -> None:
        """Other experiments run without programs."""
        sample_config["experiment"] = "negativity_curves"
        sample_config["programs"] = []
        validate_config(sample_config)

    def test_r_and_steps_exclusive(self, sample_config: Dict[str, Any]) -> None:
        """A program gives an r list or steps, not both."""
        sample_config["programs"][0]["r"] = [0.2]
        with pytest.raises(ConfigError, match="exactly one"):
            validate_config(sample_config)

    def test_mixed_signs(self, sample_config: Dict[str, Any]) -> None:
        """One program squeezes one quadrature."""
        sample_config["programs"] = [{"r": [0.2, -0.2]}]
        with pytest.raises(ConfigError, match="share a sign"):
            validate_config(sample_config)

    def test_zero_r(self, sample_config: Dict[str, Any]) -> None:
        """r = 0 is not a gate."""
        sample_config["programs"] = [{"r": [0.0]}]
        with pytest.raises(ConfigError):
            validate_config(sample_config)

    def test_unknown_scenario(self, sample_config: Dict[str, Any]) -> None:
        """Scenario names must be presets."""
        sample_config["scenario"] = "tomorrow"
        with pytest.raises(ConfigError, match="unknown scenario"):
            validate_config(sample_config)

    def test_scenario_object(self, sample_config: Dict[str, Any]) -> None:
        """A scenario object overrides a preset."""
        sample_config["scenario"] = {"name": "current", "loop_eta": 0.9}
        validate_config(sample_config)

    def test_duplicate_phases(self, sample_config: Dict[str, Any]) -> None:
        """Tomography phases are distinct."""
        sample_config["tomography"]["phases_deg"] = [0.0, 0.0, 90.0]
        with pytest.raises(ConfigError, match="distinct"):
            validate_config(sample_config)

    def test_too_few_windows(self, sample_config: Dict[str, Any]) -> None:
        """The mode fit needs a thousand windows."""
        sample_config["temporal"]["windows"] = 10
        with pytest.raises(ConfigError, match="temporal.windows"):
            validate_config(sample_config)


class TestOverrides:
    """Tests for apply_overrides and set_by_path."""

    def test_seed_and_cutoff(self, sample_config: Dict[str, Any]) -> None:
        """--seed reaches both seeded sections; --cutoff replaces the cutoff."""
        config = apply_overrides(sample_config, seed=5, cutoff=12)
        assert config["tomography"]["seed"] == 5
        assert config["temporal"]["seed"] == 5
        assert config["cutoff"] == 12
        assert sample_config["tomography"]["seed"] == 20240517

    def test_no_overrides(self, sample_config: Dict[str, Any]) -> None:
        """Nothing given, nothing changed."""
        assert apply_overrides(sample_config) == sample_config

    def test_set_nested(self, sample_config: Dict[str, Any]) -> None:
        """Dotted paths reach into dicts and lists."""
        config = set_by_path(sample_config, "programs.0.steps.0.R", 0.5)
        assert config["programs"][0]["steps"][0]["R"] == 0.5
        assert sample_config["programs"][0]["steps"][0]["R"] == 0.40

    def test_set_new_key(self, sample_config: Dict[str, Any]) -> None:
        """A missing last key is created."""
        config = set_by_path(sample_config, "programs.0.n_steps", 1)
        assert config["programs"][0]["n_steps"] == 1

    @pytest.mark.parametrize(
        "path",
        ["", "programs..R", "nowhere.x", "programs.7.R", "programs.0.steps.3", "scenario.loop_eta"],
    )
    def test_bad_paths(self, sample_config: Dict[str, Any], path: str) -> None:
        """Unreachable paths are ConfigErrors."""
        with pytest.raises(ConfigError):
            set_by_path(sample_config, path, 1.0)


class TestThreadCount:
    """Tests for get_thread_count."""

    def test_runtime_section(self, clean_threads_env: None) -> None:
        """parallel_workers applies when parallel is on."""
        assert get_thread_count({"runtime": {"parallel": True, "parallel_workers": 3}}) == 3

    def test_parallel_off(self, clean_threads_env: None) -> None:
        """parallel False means one thread."""
        assert get_thread_count({"runtime": {"parallel": False, "parallel_workers": 3}}) == 1

    def test_env_wins(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """LOOP_SQUEEZER_THREADS overrides the config."""
        monkeypatch.setenv("LOOP_SQUEEZER_THREADS", "6")
        assert get_thread_count({"runtime": {"parallel": False, "parallel_workers": 3}}) == 6

    def test_bad_env_ignored(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """A non-numeric override falls back to the config."""
        monkeypatch.setenv("LOOP_SQUEEZER_THREADS", "many")
        assert get_thread_count({"runtime": {"parallel": True, "parallel_workers": 2}}) == 2
