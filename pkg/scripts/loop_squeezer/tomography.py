"""Homodyne sampling, maximum-likelihood reconstruction and state metrics."""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from loop_squeezer.constants import (
    FIVE_FOLD_SUBSETS,
    MLE_BINS,
    MLE_CUTOFF,
    MLE_DILUTION,
    MLE_MAX_ITERS,
    MLE_SPAN_SIGMAS,
    MLE_TOL,
    SAMPLES_PER_PHASE,
    TOMOGRAPHY_PHASES_DEG,
)
from loop_squeezer.errors import ConvergenceWarning, IllPosedWarning, StateError
from loop_squeezer.fock import (
    FockState,
    fidelity,
    moments,
    quadrature_vectors,
    resize,
    sample_quadrature,
    squeeze_db,
    wigner,
)
from loop_squeezer.fs import read_csv_rows, write_csv

BIN_NODES = 3


@dataclass(frozen=True, eq=False)
class QuadratureDataset:
    """Homodyne samples grouped by measurement phase (degrees)."""

    groups: Tuple[Tuple[float, np.ndarray], ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        groups = tuple((float(phase), np.asarray(s, dtype=float).ravel()) for phase, s in self.groups)
        if not groups:
            raise ValueError("dataset has no phase groups")
        phases = [phase for phase, _ in groups]
        if len(set(phases)) != len(phases):
            raise ValueError(f"phase angles must be distinct, got {phases}")
        for phase, samples in groups:
            if samples.size == 0:
                raise ValueError(f"phase {phase} has no samples")
        object.__setattr__(self, "groups", groups)

    @property
    def phases_deg(self) -> List[float]:
        return [phase for phase, _ in self.groups]

    @property
    def n_samples(self) -> int:
        return int(sum(s.size for _, s in self.groups))

    def split(self, k: int) -> List["QuadratureDataset"]:
        """k datasets, each holding one contiguous part of every phase group."""
        parts = [(phase, np.array_split(s, k)) for phase, s in self.groups]
        return [
            QuadratureDataset(
                tuple((phase, chunks[i]) for phase, chunks in parts),
                dict(self.metadata, subset=i),
            )
            for i in range(k)
        ]

    def rows(self) -> List[Tuple[float, float]]:
        return [(phase, float(x)) for phase, s in self.groups for x in s]

    def to_csv(self, path: Path) -> None:
        write_csv(path, ["phase_deg", "sample"], self.rows())

    @classmethod
    def from_csv(cls, path: Path) -> "QuadratureDataset":
        grouped: Dict[float, List[float]] = {}
        for row in read_csv_rows(path):
            grouped.setdefault(float(row["phase_deg"]), []).append(float(row["sample"]))
        return cls(tuple((phase, np.array(v)) for phase, v in grouped.items()), {"source": str(path)})

    def to_json(self) -> Dict[str, Any]:
        return {
            "groups": [{"phase_deg": phase, "samples": s.tolist()} for phase, s in self.groups],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_json(cls, payload: Dict[str, Any]) -> "QuadratureDataset":
        groups = tuple((g["phase_deg"], np.asarray(g["samples"])) for g in payload["groups"])
        return cls(groups, dict(payload.get("metadata", {})))


@dataclass(frozen=True)
class EllipseFit:
    """Gaussian contour of a state: squeezed and antisqueezed levels and tilt."""

    squeezing_db: float
    antisqueezing_db: float
    angle_deg: float
    cov: Tuple[Tuple[float, float], Tuple[float, float]]
    residual: float = 0.0

    def to_json(self) -> Dict[str, Any]:
        return {
            "squeezing_db": self.squeezing_db,
            "antisqueezing_db": self.antisqueezing_db,
            "angle_deg": self.angle_deg,
            "cov": [list(row) for row in self.cov],
            "residual": self.residual,
        }


@dataclass(frozen=True, eq=False)
class MLEResult:
    state: FockState
    log_likelihood: Tuple[float, ...]
    iterations: int
    converged: bool


def sample_quadratures(
    state: FockState,
    phases_deg: Sequence[float] = TOMOGRAPHY_PHASES_DEG,
    n_per_phase: int = SAMPLES_PER_PHASE,
    seed: int = 0,
    workers: int = 1,
) -> QuadratureDataset:
    """Independent samples of x_phi per phase; phase i draws from default_rng([seed, i])."""
    if state.n_modes != 1:
        raise ValueError("sampling needs a single-mode state")

    def draw(i: int) -> np.ndarray:
        rng = np.random.default_rng([seed, i])
        return sample_quadrature(state, math.radians(phases_deg[i]), n_per_phase, rng)

    indices = range(len(phases_deg))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            samples = list(executor.map(draw, indices))
    else:
        samples = [draw(i) for i in indices]
    groups = tuple((float(phase), s) for phase, s in zip(phases_deg, samples))
    return QuadratureDataset(groups, {"seed": seed, "source": "simulated"})


def _distinct_axes(phases_deg: Sequence[float]) -> int:
    return len({round(phase % 180.0, 9) for phase in phases_deg})


def _bin_model(
    data: QuadratureDataset, cutoff: int, bins: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Observed frequencies, bin vectors, node weights and the bin index of each vector."""
    pooled = np.concatenate([s for _, s in data.groups])
    center = float(np.mean(pooled))
    half = MLE_SPAN_SIGMAS * float(np.std(pooled))
    edges = np.linspace(center - half, center + half, bins + 1)
    t, w = np.polynomial.legendre.leggauss(BIN_NODES)
    half_width = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half_width * t[None, :]).ravel()
    node_w = np.tile(half_width * w, bins)
    freqs, vecs, weights, owner = [], [], [], []
    for g, (phase, samples) in enumerate(data.groups):
        counts, _ = np.histogram(samples, bins=edges)
        freqs.append(counts.astype(float))
        vecs.append(quadrature_vectors(nodes, math.radians(phase), cutoff))
        weights.append(node_w)
        owner.append(g * bins + np.repeat(np.arange(bins), BIN_NODES))
    f = np.concatenate(freqs)
    f = f / f.sum()
    return f, np.vstack(vecs), np.concatenate(weights), np.concatenate(owner)


def _bin_probabilities(
    rho: np.ndarray, vecs: np.ndarray, weights: np.ndarray, owner: np.ndarray, n_bins: int
) -> np.ndarray:
    per_node = np.real(np.sum(vecs.conj() * (vecs @ rho.T), axis=1)) * weights
    return np.bincount(owner, weights=per_node, minlength=n_bins)


def _log_likelihood(f: np.ndarray, p: np.ndarray) -> float:
    seen = f > 0
    return float(np.sum(f[seen] * np.log(np.clip(p[seen], 1e-300, None))))


def mle_reconstruct(
    data: QuadratureDataset,
    cutoff: int = MLE_CUTOFF,
    max_iters: int = MLE_MAX_ITERS,
    tol: float = MLE_TOL,
    bins: int = MLE_BINS,
    diluted: bool = True,
) -> MLEResult:
    """Iterative R rho R likelihood maximization over binned quadrature projectors.

    The diluted form mixes R with the identity and halves the mixing until the
    likelihood does not drop, so the likelihood never decreases.
    """
    if data.n_samples < 100:
        raise ValueError(f"need at least 100 samples, got {data.n_samples}")
    if _distinct_axes(data.phases_deg) < 3:
        warnings.warn(
            IllPosedWarning("fewer than three distinct quadrature axes: reconstruction is ill-posed"),
            stacklevel=2,
        )
    f, vecs, weights, owner = _bin_model(data, cutoff, bins)
    n_bins = f.size
    # Bin projectors only cover the observed range, so their sum G is not the identity.
    # Iterate on sigma = G^1/2 rho G^1/2 with projectors G^-1/2 Pi G^-1/2, which sum to I.
    G = (vecs.T * weights) @ vecs.conj()
    g_vals, g_vecs = np.linalg.eigh(0.5 * (G + G.conj().T))
    if g_vals[0] <= 0:
        raise StateError("binned projectors do not span the Fock space; lower the cutoff")
    g_inv_root = (g_vecs / np.sqrt(g_vals)) @ g_vecs.conj().T
    vecs = vecs @ g_inv_root.T
    identity = np.eye(cutoff, dtype=complex)
    sigma = identity / cutoff
    p = _bin_probabilities(sigma, vecs, weights, owner, n_bins)
    history = [_log_likelihood(f, p)]
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        ratio = np.where(p > 0, f / np.clip(p, 1e-300, None), 0.0)
        R = (vecs.T * (ratio[owner] * weights)) @ vecs.conj()
        mix = MLE_DILUTION if diluted else 1.0
        while True:
            M = (1.0 - mix) * identity + mix * R
            candidate = M @ sigma @ M
            candidate = 0.5 * (candidate + candidate.conj().T)
            candidate /= np.real(np.trace(candidate))
            p_new = _bin_probabilities(candidate, vecs, weights, owner, n_bins)
            ll = _log_likelihood(f, p_new)
            if not diluted or ll >= history[-1] or mix < 1e-8:
                break
            mix *= 0.5
        if ll < history[-1] and diluted:
            converged = True
            break
        gain = ll - history[-1]
        sigma, p = candidate, p_new
        history.append(ll)
        if abs(gain) < tol:
            converged = True
            break
    if not converged:
        warnings.warn(
            ConvergenceWarning(f"likelihood iteration stopped at the cap of {max_iters}"),
            stacklevel=2,
        )
    rho = g_inv_root @ sigma @ g_inv_root
    state = FockState((cutoff,), 0.5 * (rho + rho.conj().T)).normalized()
    return MLEResult(state, tuple(history), iterations, converged)


def negativity(state: FockState) -> float:
    """W(0, 0)."""
    return wigner(state, 0.0, 0.0)


def normalized_variances(out_state: FockState, in_state: FockState) -> Tuple[float, float]:
    """Output over input variance of x and of p."""
    out_m, in_m = moments(out_state), moments(in_state)
    if in_m.var_x <= 0 or in_m.var_p <= 0:
        raise StateError("input state has a non-positive quadrature variance")
    return out_m.var_x / in_m.var_x, out_m.var_p / in_m.var_p


def _phase_variances(
    source: Union[QuadratureDataset, FockState], phases_deg: Sequence[float]
) -> Tuple[List[float], np.ndarray]:
    if isinstance(source, QuadratureDataset):
        return source.phases_deg, np.array([np.var(s, ddof=1) for _, s in source.groups])
    m = moments(source)
    return list(phases_deg), np.array([m.quadrature_variance(math.radians(a)) for a in phases_deg])


def gaussian_ellipse_fit(
    source: Union[QuadratureDataset, FockState],
    phases_deg: Sequence[float] = TOMOGRAPHY_PHASES_DEG,
) -> EllipseFit:
    """Fit Var(phi) = Cxx cos^2 + Cpp sin^2 + 2 Cxp sin cos and read off the ellipse.

    Levels are 10 log10(Var / (1/2)); the angle is that of the squeezed axis.
    """
    phases, variances = _phase_variances(source, phases_deg)
    if _distinct_axes(phases) < 3:
        raise ValueError("an ellipse needs at least three distinct quadrature axes")
    phi = np.radians(phases)
    A = np.column_stack([np.cos(phi) ** 2, np.sin(phi) ** 2, 2 * np.sin(phi) * np.cos(phi)])
    coef, *_ = np.linalg.lstsq(A, variances, rcond=None)
    residual = float(np.max(np.abs(A @ coef - variances)))
    cov = np.array([[coef[0], coef[2]], [coef[2], coef[1]]])
    evals, evecs = np.linalg.eigh(cov)
    if evals[0] <= 0:
        raise StateError("fitted covariance is not positive definite")
    if abs(evals[1] - evals[0]) < 1e-9:
        angle = 0.0
    else:
        vx, vp = evecs[:, 0]
        angle = math.degrees(math.atan2(vp, vx))
        while angle <= -90.0:
            angle += 180.0
        while angle > 90.0:
            angle -= 180.0
    return EllipseFit(
        squeezing_db=squeeze_db(float(evals[0])),
        antisqueezing_db=squeeze_db(float(evals[1])),
        angle_deg=angle,
        cov=((float(cov[0, 0]), float(cov[0, 1])), (float(cov[1, 0]), float(cov[1, 1]))),
        residual=residual,
    )


def five_fold_metrics(
    dataset: QuadratureDataset,
    metrics: Callable[[FockState, QuadratureDataset], Dict[str, float]],
    subsets: int = FIVE_FOLD_SUBSETS,
    cutoff: int = MLE_CUTOFF,
    max_iters: int = MLE_MAX_ITERS,
    tol: float = MLE_TOL,
    bins: int = MLE_BINS,
    diluted: bool = True,
    workers: int = 1,
) -> Dict[str, Dict[str, float]]:
    """Reconstruct each subset, evaluate metrics, report mean and standard error."""
    if subsets < 2:
        raise ValueError("the split protocol needs at least two subsets")
    parts = dataset.split(subsets)

    def evaluate(part: QuadratureDataset) -> Dict[str, float]:
        result = mle_reconstruct(part, cutoff, max_iters, tol, bins, diluted)
        return metrics(result.state, part)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            values = list(executor.map(evaluate, parts))
    else:
        values = [evaluate(part) for part in parts]
    summary: Dict[str, Dict[str, float]] = {}
    for key in values[0]:
        column = np.array([v[key] for v in values], dtype=float)
        summary[key] = {
            "mean": float(np.mean(column)),
            "se": float(np.std(column, ddof=1) / math.sqrt(len(column))),
        }
    return summary


def reference_metrics(
    ideal: Optional[FockState] = None, reference_input: Optional[FockState] = None
) -> Callable[[FockState, QuadratureDataset], Dict[str, float]]:
    """Metric function for five_fold_metrics: W(0,0), fidelity with ideal, variances."""

    def compute(state: FockState, part: QuadratureDataset) -> Dict[str, float]:
        out: Dict[str, float] = {"w00": negativity(state)}
        if ideal is not None:
            out["fidelity"] = fidelity(state, resize(ideal, state.cutoff))
        if reference_input is not None:
            dx, dp = normalized_variances(state, resize(reference_input, state.cutoff))
            out["var_x_ratio"], out["var_p_ratio"] = dx, dp
        return out

    return compute
