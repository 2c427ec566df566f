"""Tests for loop_squeezer.projections module."""

import pytest

from loop_squeezer.constants import SCALABILITY_CAT
from loop_squeezer.gates import GateProgram, LossScenario
from loop_squeezer.projections import (
    max_negative_steps,
    negativity_curve,
    repeated_r,
    steps_table,
    subtraction_survives,
)
from loop_squeezer.sources import CatSpec, cat_phase_space


class TestRepeatedR:
    """Tests for repeated_r."""

    def test_cycles(self) -> None:
        """Values repeat in order."""
        assert repeated_r([0.1, 0.2], 5) == [0.1, 0.2, 0.1, 0.2, 0.1]

    def test_truncates(self) -> None:
        """Fewer steps than values keeps the leading ones."""
        assert repeated_r([0.33, 0.14, 0.37], 2) == [0.33, 0.14]

    def test_empty(self) -> None:
        """An empty list cannot be cycled."""
        with pytest.raises(ValueError):
            repeated_r([], 3)


class TestNegativityCurve:
    """Tests for negativity_curve."""

    def test_length_and_start(self) -> None:
        """Step 0 is the cat with the scenario's preparation loss."""
        scenario = LossScenario.preset("current")
        values = negativity_curve(CatSpec(), [0.33, 0.14, 0.37], scenario, 4)
        assert len(values) == 5
        start = cat_phase_space(CatSpec().with_loss(scenario.cat_preparation_loss)).negativity()
        assert values[0] == pytest.approx(start)

    def test_ideal_scenario_is_flat(self) -> None:
        """Noiseless squeezing never changes W(0,0)."""
        values = negativity_curve(CatSpec(), [0.33, 0.14, 0.37], LossScenario.preset("ideal"), 6)
        assert all(v == pytest.approx(values[0], abs=1e-9) for v in values)

    def test_current_scenario_degrades(self) -> None:
        """Losses push W(0,0) up step after step."""
        values = negativity_curve(CatSpec(), [0.33, 0.14, 0.37], LossScenario.preset("current"), 6)
        assert values[0] < 0
        assert values[1] > values[0]
        assert values[-1] > values[1]

    def test_better_scenarios_keep_more_negativity(self) -> None:
        """Improved hardware ends with a more negative W(0,0) than today's."""
        r = [0.33, 0.14, 0.37]
        current = negativity_curve(CatSpec(), r, LossScenario.preset("current"), 3)
        improved = negativity_curve(CatSpec(), r, LossScenario.preset("quarter_loss"), 3)
        assert improved[-1] < current[-1]

    def test_zero_steps(self) -> None:
        """max_steps = 0 returns only the input value."""
        assert len(negativity_curve(CatSpec(), [0.2], LossScenario.preset("current"), 0)) == 1


class TestSubtractionSurvives:
    """Tests for the closed-form ideal-subtraction criterion."""

    def test_moderate_loss_survives(self) -> None:
        """30% loss and an ideal step keep the negativity."""
        program = GateProgram.from_r_list([0.3], LossScenario.preset("ideal"))
        assert subtraction_survives(program, 0.3)

    def test_heavy_loss_fails(self) -> None:
        """Beyond 50% loss no negativity is left."""
        program = GateProgram.from_r_list([0.3], LossScenario.preset("ideal"))
        assert not subtraction_survives(program, 0.6)


class TestMaxNegativeSteps:
    """Tests for max_negative_steps and steps_table."""

    def test_ideal_never_stops(self) -> None:
        """Without loss the count reaches the cap."""
        assert max_negative_steps(0.3, LossScenario.preset("ideal"), max_steps=10) == 10

    def test_count_is_boundary(self) -> None:
        """n steps keep W(0,0) < 0 and n + 1 do not."""
        scenario = LossScenario.preset("best_recorded")
        n = max_negative_steps(0.3, scenario)
        values = negativity_curve(CatSpec.from_dict(SCALABILITY_CAT), [0.3], scenario, n + 1)
        assert values[n] < 0
        assert values[n + 1] >= 0

    def test_best_recorded_counts(self) -> None:
        """Best recorded hardware iterates 18, 10, 7 and 5 times."""
        rows = steps_table([0.1, 0.2, 0.3, 0.4], LossScenario.preset("best_recorded"))
        assert [row["max_steps"] for row in rows] == [18, 10, 7, 5]
        assert rows[0]["squeezing_db"] == pytest.approx(0.8686, abs=1e-4)

    def test_default_cat_is_projector_heralded(self) -> None:
        """Without a cat the count uses the projector source, not the table cat."""
        scenario = LossScenario.preset("best_recorded")
        projector = CatSpec.from_dict(SCALABILITY_CAT)
        assert projector.detector == "projector"
        assert max_negative_steps(0.1, scenario) == max_negative_steps(0.1, scenario, projector)

    def test_on_off_herald_iterates_less(self) -> None:
        """Multi-photon heralds cost the weakest gate one step."""
        scenario = LossScenario.preset("best_recorded")
        on_off = CatSpec.from_dict(dict(SCALABILITY_CAT, detector="on_off"))
        assert max_negative_steps(0.1, scenario, on_off) == 17
