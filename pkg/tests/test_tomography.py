"""Tests for loop_squeezer.tomography module."""

import math
from pathlib import Path

import numpy as np
import pytest

from loop_squeezer.errors import IllPosedWarning
from loop_squeezer.fock import fidelity, fock_state, make_squeezed_vacuum, make_vacuum, resize, wigner
from loop_squeezer.sources import CatSpec, make_cat
from loop_squeezer.tomography import (
    QuadratureDataset,
    five_fold_metrics,
    gaussian_ellipse_fit,
    mle_reconstruct,
    negativity,
    normalized_variances,
    reference_metrics,
    sample_quadratures,
)


def _dataset(samples: int = 100) -> QuadratureDataset:
    rng = np.random.default_rng(0)
    return QuadratureDataset(tuple((phase, rng.normal(0.0, 0.7, samples)) for phase in (0.0, 45.0, 90.0)))


class TestQuadratureDataset:
    """Tests for QuadratureDataset."""

    def test_counts(self) -> None:
        """Samples and phases are tallied."""
        data = _dataset()
        assert data.n_samples == 300
        assert data.phases_deg == [0.0, 45.0, 90.0]

    def test_duplicate_phases(self) -> None:
        """Each phase appears once."""
        with pytest.raises(ValueError):
            QuadratureDataset(((0.0, np.ones(3)), (0.0, np.ones(3))))

    def test_empty_group(self) -> None:
        """Every phase needs samples."""
        with pytest.raises(ValueError):
            QuadratureDataset(((0.0, np.array([])),))

    def test_no_groups(self) -> None:
        """A dataset needs at least one phase."""
        with pytest.raises(ValueError):
            QuadratureDataset(())

    def test_split(self) -> None:
        """Five subsets share every phase and partition the samples."""
        parts = _dataset().split(5)
        assert len(parts) == 5
        assert all(p.phases_deg == [0.0, 45.0, 90.0] for p in parts)
        assert sum(p.n_samples for p in parts) == 300
        assert parts[2].metadata["subset"] == 2

    def test_csv_round_trip(self, temp_dir: Path) -> None:
        """CSV export keeps phases and sample counts."""
        data = _dataset(20)
        data.to_csv(temp_dir / "q.csv")
        loaded = QuadratureDataset.from_csv(temp_dir / "q.csv")
        assert loaded.phases_deg == data.phases_deg
        assert loaded.n_samples == data.n_samples
        assert np.allclose(loaded.groups[1][1], data.groups[1][1], atol=1e-9)

    def test_json_round_trip(self) -> None:
        """JSON export keeps the samples."""
        data = _dataset(10)
        loaded = QuadratureDataset.from_json(data.to_json())
        assert np.array_equal(loaded.groups[0][1], data.groups[0][1])


class TestSampling:
    """Tests for sample_quadratures."""

    def test_vacuum_variance(self) -> None:
        """Vacuum samples have variance 1/2 at every phase."""
        data = sample_quadratures(make_vacuum(1, 10), [0.0, 60.0, 120.0], 3000, seed=3)
        for _, samples in data.groups:
            assert np.var(samples) == pytest.approx(0.5, abs=0.05)

    def test_deterministic(self) -> None:
        """The same seed reproduces the dataset regardless of workers."""
        state = make_squeezed_vacuum(0.3, 20)
        a = sample_quadratures(state, [0.0, 90.0], 200, seed=9, workers=1)
        b = sample_quadratures(state, [0.0, 90.0], 200, seed=9, workers=2)
        for (_, sa), (_, sb) in zip(a.groups, b.groups):
            assert np.array_equal(sa, sb)

    def test_different_seeds_differ(self) -> None:
        """Distinct seeds give distinct samples."""
        state = make_vacuum(1, 6)
        a = sample_quadratures(state, [0.0], 50, seed=1)
        b = sample_quadratures(state, [0.0], 50, seed=2)
        assert not np.array_equal(a.groups[0][1], b.groups[0][1])

    def test_needs_single_mode(self) -> None:
        """Two-mode states cannot be sampled directly."""
        with pytest.raises(ValueError):
            sample_quadratures(make_vacuum(2, 4), [0.0], 10)


class TestMetrics:
    """Tests for W(0,0), variance ratios and the ellipse fit."""

    def test_negativity(self) -> None:
        """W(0,0) of |1> is -1/pi."""
        assert negativity(fock_state(1, 6)) == pytest.approx(-1.0 / math.pi, abs=1e-10)

    def test_normalized_variances(self) -> None:
        """Squeezing vacuum by r scales the variances by e^{-2r} and e^{2r}."""
        dx, dp = normalized_variances(make_squeezed_vacuum(0.3, 30), make_vacuum(1, 30))
        assert dx == pytest.approx(math.exp(-0.6), abs=1e-5)
        assert dp == pytest.approx(math.exp(0.6), abs=1e-4)

    def test_ellipse_x_squeezed(self) -> None:
        """An x-squeezed vacuum fits to -2.6 dB at angle 0."""
        fit = gaussian_ellipse_fit(make_squeezed_vacuum(0.3, 30))
        assert fit.squeezing_db == pytest.approx(10 * math.log10(math.exp(-0.6)), abs=1e-3)
        assert fit.antisqueezing_db == pytest.approx(10 * math.log10(math.exp(0.6)), abs=1e-3)
        assert fit.angle_deg == pytest.approx(0.0, abs=1e-6)

    def test_ellipse_p_squeezed(self) -> None:
        """A p-squeezed vacuum has its squeezed axis at 90 degrees."""
        fit = gaussian_ellipse_fit(make_squeezed_vacuum(-0.3, 30))
        assert fit.angle_deg % 180.0 == pytest.approx(90.0, abs=1e-6)

    def test_ellipse_from_samples(self) -> None:
        """Sampled variances give a comparable fit."""
        data = sample_quadratures(make_squeezed_vacuum(0.3, 30), seed=5)
        fit = gaussian_ellipse_fit(data)
        assert fit.squeezing_db == pytest.approx(-2.606, abs=0.2)

    def test_ellipse_needs_three_axes(self) -> None:
        """Phases 0 and 180 share an axis."""
        with pytest.raises(ValueError):
            gaussian_ellipse_fit(make_vacuum(1, 5), [0.0, 180.0, 90.0])


class TestMLE:
    """Tests for maximum-likelihood reconstruction."""

    def test_too_few_samples(self) -> None:
        """Fewer than 100 samples are refused."""
        with pytest.raises(ValueError):
            mle_reconstruct(_dataset(20), cutoff=5)

    def test_two_axes_warn(self) -> None:
        """Two quadrature axes leave the state underdetermined."""
        data = sample_quadratures(make_vacuum(1, 6), [0.0, 90.0], 200, seed=1)
        with pytest.warns(IllPosedWarning):
            mle_reconstruct(data, cutoff=5, max_iters=20)

    def test_likelihood_never_decreases(self) -> None:
        """The diluted iteration is monotone in the likelihood."""
        data = sample_quadratures(make_squeezed_vacuum(0.2, 15), [0.0, 45.0, 90.0, 135.0], 500, seed=2)
        result = mle_reconstruct(data, cutoff=8, max_iters=100, bins=40)
        history = np.array(result.log_likelihood)
        assert np.all(np.diff(history) >= -1e-12)
        result.state.validate(psd_tol=1e-8)

    @pytest.mark.slow
    def test_vacuum_round_trip(self) -> None:
        """Reconstruction from 12 x 3000 vacuum samples has F >= 0.99."""
        truth = make_vacuum(1, 10)
        data = sample_quadratures(truth, seed=4)
        result = mle_reconstruct(data, cutoff=10)
        assert fidelity(result.state, truth) >= 0.99

    @pytest.mark.slow
    def test_cat_round_trip(self) -> None:
        """A modeled cat comes back with F >= 0.98 and W(0,0) within 0.02/pi."""
        cat, _ = make_cat(CatSpec(), 30)
        truth = resize(cat, 20)
        data = sample_quadratures(truth, seed=8)
        result = mle_reconstruct(data, cutoff=20)
        assert fidelity(result.state, truth) >= 0.98
        assert abs(wigner(result.state, 0.0, 0.0) - wigner(truth, 0.0, 0.0)) <= 0.02 / math.pi
        assert wigner(result.state, 0.0, 0.0) < 0

    @pytest.mark.slow
    def test_five_fold_summary(self) -> None:
        """Five subsets give a mean and standard error per metric."""
        truth = make_vacuum(1, 10)
        data = sample_quadratures(truth, seed=6)
        summary = five_fold_metrics(data, reference_metrics(truth, truth), cutoff=10, workers=2)
        assert set(summary) == {"w00", "fidelity", "var_x_ratio", "var_p_ratio"}
        assert summary["fidelity"]["mean"] > 0.95
        assert summary["w00"]["se"] >= 0.0

    def test_five_fold_needs_two_subsets(self) -> None:
        """A single subset has no spread."""
        with pytest.raises(ValueError):
            five_fold_metrics(_dataset(), reference_metrics(), subsets=1)

    def test_reference_metrics_keys(self) -> None:
        """Without references only W(0,0) is computed."""
        compute = reference_metrics()
        assert set(compute(make_vacuum(1, 5), _dataset())) == {"w00"}
