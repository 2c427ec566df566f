"""Tests for loop_squeezer.sources module."""

import math

import pytest

from loop_squeezer.errors import HeraldError, StateError
from loop_squeezer.fock import moments, parity_value
from loop_squeezer.sources import (
    AncillaSpec,
    CatSpec,
    cat_phase_space,
    db_to_r,
    make_ancilla,
    make_cat,
)


class TestAncillaSpec:
    """Tests for AncillaSpec."""

    def test_db_to_r(self) -> None:
        """-6 dB is r = 6 ln(10) / 20."""
        assert db_to_r(-6.0) == pytest.approx(6.0 * math.log(10.0) / 20.0)

    def test_ideal(self) -> None:
        """No level means infinite squeezing."""
        spec = AncillaSpec(None)
        assert spec.is_ideal
        assert math.isinf(spec.r)

    def test_positive_level_rejected(self) -> None:
        """A positive level is refused."""
        with pytest.raises(ValueError):
            AncillaSpec(2.0)

    def test_bad_quadrature(self) -> None:
        """Only x and p ancillae exist."""
        with pytest.raises(ValueError):
            AncillaSpec(-3.0, 0.0, "z")

    def test_from_dict_defaults(self) -> None:
        """Missing keys fall back to a lossless ancilla on the given quadrature."""
        spec = AncillaSpec.from_dict({"pure_squeezing_db": -5.0}, "p")
        assert spec.preparation_loss == 0.0
        assert spec.quadrature == "p"


class TestMakeAncilla:
    """Tests for Fock-basis ancillae."""

    def test_x_ancilla_variance(self) -> None:
        """A lossless -3 dB x ancilla has Var(x) = 10^-0.3 / 2."""
        state = make_ancilla(AncillaSpec(-3.0, 0.0, "x"), 25)
        assert moments(state).var_x == pytest.approx(0.5 * 10 ** -0.3, abs=1e-5)

    def test_p_ancilla_variance(self) -> None:
        """A p ancilla is squeezed along p."""
        state = make_ancilla(AncillaSpec(-3.0, 0.0, "p"), 25)
        assert moments(state).var_p == pytest.approx(0.5 * 10 ** -0.3, abs=1e-5)

    def test_lossy_ancilla_matches_covariance_model(self) -> None:
        """Preparation loss in Fock space matches the variance formula."""
        spec = AncillaSpec(-6.8, 0.22, "x")
        state = make_ancilla(spec, 30)
        v_sq, _ = spec.variances()
        assert moments(state).var_x == pytest.approx(v_sq, abs=1e-4)

    def test_ideal_has_no_fock_form(self) -> None:
        """Infinite squeezing cannot be truncated."""
        with pytest.raises(StateError):
            make_ancilla(AncillaSpec(None), 10)


class TestCatSpec:
    """Tests for CatSpec validation."""

    def test_defaults(self) -> None:
        """Defaults describe a 30% lossy on/off-heralded cat."""
        spec = CatSpec()
        assert spec.detector == "on_off"
        assert spec.preparation_loss == pytest.approx(0.3)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"source_squeezing_r": 0.0},
            {"tap_reflectivity": 0.0},
            {"tap_reflectivity": 0.7},
            {"preparation_loss": 1.0},
            {"detector": "pnr"},
        ],
    )
    def test_invalid(self, kwargs: dict) -> None:
        """Out-of-range parameters are rejected."""
        with pytest.raises(ValueError):
            CatSpec(**kwargs)

    def test_from_dict_merges_defaults(self) -> None:
        """Partial dicts keep the remaining defaults."""
        spec = CatSpec.from_dict({"preparation_loss": 0.13})
        assert spec.preparation_loss == pytest.approx(0.13)
        assert spec.source_squeezing_r == pytest.approx(0.4)

    def test_with_loss(self) -> None:
        """with_loss only swaps the preparation loss."""
        spec = CatSpec().with_loss(0.1)
        assert spec.preparation_loss == 0.1
        assert spec.tap_reflectivity == CatSpec().tap_reflectivity


class TestMakeCat:
    """Tests for the heralded cat source."""

    def test_heralded_state_is_valid(self) -> None:
        """The heralded cat is a valid state with a small herald probability."""
        state, probability = make_cat(CatSpec(), 25)
        state.validate()
        assert 0.0 < probability < 0.05

    def test_lossy_cat_is_negative(self) -> None:
        """30% loss keeps W(0,0) < 0."""
        state, _ = make_cat(CatSpec(), 25)
        assert parity_value(state) < 0

    def test_weak_ideal_subtraction_is_odd(self) -> None:
        """Weak squeezing, weak tap and no loss leave an odd state: W(0,0) = -1/pi."""
        state, _ = make_cat(CatSpec(0.05, 0.01, 0.0, "projector"), 20)
        assert parity_value(state) == pytest.approx(-1.0 / math.pi, abs=1e-4)

    def test_vanishing_herald(self) -> None:
        """An essentially unsqueezed source never heralds."""
        with pytest.raises(HeraldError):
            make_cat(CatSpec(source_squeezing_r=1e-7), 10)

    @pytest.mark.parametrize("detector", ["on_off", "projector"])
    def test_phase_space_matches_fock(self, detector: str) -> None:
        """The exact phase-space cat agrees with the Fock model."""
        spec = CatSpec(detector=detector)
        state, _ = make_cat(spec, 30)
        exact = cat_phase_space(spec)
        assert exact.negativity() == pytest.approx(parity_value(state), abs=1e-6)
        assert exact.moments().var_x == pytest.approx(moments(state).var_x, abs=1e-6)
        assert exact.moments().var_p == pytest.approx(moments(state).var_p, abs=1e-6)

    def test_phase_space_vanishing_herald(self) -> None:
        """The on/off phase-space cat also refuses a zero-probability herald."""
        with pytest.raises(HeraldError):
            cat_phase_space(CatSpec(source_squeezing_r=1e-7))
