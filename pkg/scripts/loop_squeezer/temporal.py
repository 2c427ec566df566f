"""Temporal wave packet of the heralded pulses and its variance-maximizing fit.

A mode is f(t) = N (exp(g1 (t - t0)) - exp(g2 (t - t0))) for t <= t0 and zero after,
with g1, g2 the cavity half widths in rad/s. Each loop round trip delays the packet
by tau, so the i-th time bin carries f(t - (i - 1) tau).
"""

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from loop_squeezer.constants import (
    GAMMA1_MHZ,
    GAMMA2_MHZ,
    MODE_DT_NS,
    MODE_GAMMA_BOUNDS_MHZ,
    MODE_WINDOW_NS,
    ROUND_TRIP_NS,
    VACUUM_VARIANCE,
)
from loop_squeezer.errors import ConvergenceWarning, ModeFitError
from loop_squeezer.fs import read_csv_rows, write_csv

MHZ = 2.0 * math.pi * 1e6
NS = 1e-9
MIN_WINDOWS = 1000
SYNTH_CHUNK = 1000
# samples per 1/gamma needed to resolve the faster cavity
SAMPLES_PER_EFOLD = 3.0
IDENTIFIABILITY_SIGMAS = 5.0
# fit starts: bandwidth factors and herald-time shifts around the initial guess
START_SCALES = (0.7, 1.4)
START_SHIFTS_NS = (-4.0, 4.0)
# initial simplex edges in (ln MHz, ln MHz, ns)
SIMPLEX_STEPS = (0.1, 0.1, 2.0)
FIT_XATOL = 1e-6
FIT_FATOL = 1e-12
# objective value for parameters with no usable mode; projected variances are positive
FIT_PENALTY = 1.0


@dataclass(frozen=True)
class ModeFunction:
    gamma1: float
    gamma2: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ModeFitError(f"bandwidths must be positive, got {self.gamma1}, {self.gamma2}")
        if math.isclose(self.gamma1, self.gamma2, rel_tol=1e-9):
            raise ModeFitError("gamma1 and gamma2 must differ")

    @classmethod
    def from_mhz(cls, gamma1_mhz: float, gamma2_mhz: float, t0_ns: float = 0.0) -> "ModeFunction":
        """Bandwidths given as gamma / 2pi in MHz, herald time in ns."""
        return cls(gamma1_mhz * MHZ, gamma2_mhz * MHZ, t0_ns * NS)

    @property
    def gamma1_mhz(self) -> float:
        return self.gamma1 / MHZ

    @property
    def gamma2_mhz(self) -> float:
        return self.gamma2 / MHZ

    @property
    def t0_ns(self) -> float:
        return self.t0 / NS

    @property
    def norm(self) -> float:
        """Normalization constant N."""
        g1, g2 = self.gamma1, self.gamma2
        return math.sqrt(2.0 * g1 * g2 * (g1 + g2)) / abs(g1 - g2)

    def canonical(self) -> "ModeFunction":
        """Same packet with gamma1 < gamma2 (swapping only flips the sign)."""
        if self.gamma1 <= self.gamma2:
            return self
        return replace(self, gamma1=self.gamma2, gamma2=self.gamma1)

    def to_json(self) -> Dict[str, float]:
        return {"gamma1_mhz": self.gamma1_mhz, "gamma2_mhz": self.gamma2_mhz, "t0_ns": self.t0_ns}


DEFAULT_MODE = ModeFunction.from_mhz(GAMMA1_MHZ, GAMMA2_MHZ)


def eval_mode(f: ModeFunction, t: Any) -> np.ndarray:
    """Normalized mode amplitude at times t (seconds)."""
    u = np.asarray(t, dtype=float) - f.t0
    before = u <= 0
    u = np.where(before, u, 0.0)
    return np.where(before, f.norm * (np.exp(f.gamma1 * u) - np.exp(f.gamma2 * u)), 0.0)


def time_grid(duration_ns: float = MODE_WINDOW_NS, dt_ns: float = MODE_DT_NS) -> np.ndarray:
    n = int(round(duration_ns / dt_ns))
    if n < 2:
        raise ModeFitError(f"window of {duration_ns} ns holds fewer than two samples")
    return np.arange(n) * dt_ns * NS


def sample_mode(f: ModeFunction, t_grid: np.ndarray) -> np.ndarray:
    """Mode on a uniform grid as a unit vector (sum of squares exactly 1)."""
    t_grid = np.asarray(t_grid, dtype=float)
    dt = float(t_grid[1] - t_grid[0])
    v = eval_mode(f, t_grid) * math.sqrt(dt)
    total = float(np.linalg.norm(v))
    if total == 0.0:
        raise ModeFitError("mode lies entirely outside the time grid")
    return v / total


def mode_overlap(f: ModeFunction, g: ModeFunction) -> float:
    """Analytic inner product of two modes."""
    T = min(f.t0, g.t0)
    total = 0.0
    for a, sa in ((f.gamma1, 1.0), (f.gamma2, -1.0)):
        for b, sb in ((g.gamma1, 1.0), (g.gamma2, -1.0)):
            total += sa * sb * math.exp(a * (T - f.t0) + b * (T - g.t0)) / (a + b)
    return f.norm * g.norm * total


def shifted_mode(f: ModeFunction, i: int, tau: float = ROUND_TRIP_NS * NS) -> ModeFunction:
    """Mode of the i-th time bin, delayed by (i - 1) round trips."""
    if i < 1:
        raise ValueError(f"time-bin index starts at 1, got {i}")
    return replace(f, t0=f.t0 + (i - 1) * tau)


def expected_projected_variance(candidate: ModeFunction, true_mode: ModeFunction, variance: float) -> float:
    """Variance seen through candidate when only true_mode departs from vacuum."""
    return VACUUM_VARIANCE + mode_overlap(candidate, true_mode) ** 2 * (variance - VACUUM_VARIANCE)


@dataclass(frozen=True, eq=False)
class TimeSeriesEnsemble:
    """Homodyne windows aligned on the herald, summarized by their sample covariance.

    vacuum_level is the per-sample variance of pure vacuum noise in the units of the
    data; the raw windows are kept only when asked for.
    """

    t: np.ndarray
    covariance: np.ndarray
    n_windows: int
    vacuum_level: float = VACUUM_VARIANCE
    windows: Optional[np.ndarray] = None

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @classmethod
    def from_windows(
        cls, t: np.ndarray, windows: np.ndarray, vacuum_level: float = VACUUM_VARIANCE, keep: bool = True
    ) -> "TimeSeriesEnsemble":
        windows = np.asarray(windows, dtype=float)
        if windows.ndim != 2 or windows.shape[1] != len(t):
            raise ModeFitError(f"windows of shape {windows.shape} do not match {len(t)} time samples")
        cov = np.cov(windows, rowvar=False)
        return cls(np.asarray(t, dtype=float), cov, windows.shape[0], vacuum_level, windows if keep else None)

    def normalized_covariance(self) -> np.ndarray:
        """Covariance rescaled so vacuum noise has variance 1/2."""
        return self.covariance * (VACUUM_VARIANCE / self.vacuum_level)

    def scaled(self, k: float) -> "TimeSeriesEnsemble":
        """Every sample multiplied by k."""
        windows = None if self.windows is None else self.windows * k
        return TimeSeriesEnsemble(self.t, self.covariance * k * k, self.n_windows, self.vacuum_level * k * k, windows)

    def to_csv(self, path: Path) -> None:
        if self.windows is None:
            raise ModeFitError("ensemble keeps only its covariance; synthesize with keep_windows=True")
        t_ns = self.t / NS
        rows = [(w, float(t_ns[j]), float(self.windows[w, j])) for w in range(self.n_windows) for j in range(len(t_ns))]
        write_csv(path, ["window", "t_ns", "value"], rows)

    @classmethod
    def from_csv(cls, path: Path, vacuum_level: float = VACUUM_VARIANCE) -> "TimeSeriesEnsemble":
        grouped: Dict[int, List[Tuple[float, float]]] = {}
        for row in read_csv_rows(path):
            grouped.setdefault(int(row["window"]), []).append((float(row["t_ns"]), float(row["value"])))
        if not grouped:
            raise ModeFitError(f"{path} holds no samples")
        first = sorted(grouped[min(grouped)])
        t = np.array([tn for tn, _ in first]) * NS
        windows = np.array([[v for _, v in sorted(grouped[w])] for w in sorted(grouped)])
        return cls.from_windows(t, windows, vacuum_level)


def _check_sampling(mode: ModeFunction, dt: float) -> None:
    fastest = max(mode.gamma1, mode.gamma2)
    if dt > 1.0 / (SAMPLES_PER_EFOLD * fastest):
        raise ModeFitError(
            f"dt = {dt / NS:.3g} ns is too coarse for a {fastest / MHZ:.1f} MHz cavity; "
            f"need dt <= {1e9 / (SAMPLES_PER_EFOLD * fastest):.3g} ns"
        )


def synthesize_timeseries(
    true_mode: ModeFunction,
    variance: float,
    windows: int,
    duration_ns: float = MODE_WINDOW_NS,
    dt_ns: float = MODE_DT_NS,
    seed: int = 0,
    workers: int = 1,
    keep_windows: bool = False,
) -> TimeSeriesEnsemble:
    """White vacuum noise plus a rank-one excess along true_mode.

    Each window is y = w + (sqrt(2V) - 1) <f, w> f with w ~ N(0, 1/2) per sample, so the
    quadrature of true_mode has variance V and every orthogonal mode stays at vacuum.
    Chunk c of SYNTH_CHUNK windows draws from default_rng([seed, c]).
    """
    if variance <= 0:
        raise ValueError(f"embedded variance must be positive, got {variance}")
    if windows < 2:
        raise ValueError(f"need at least two windows, got {windows}")
    t = time_grid(duration_ns, dt_ns)
    _check_sampling(true_mode, dt_ns * NS)
    f = sample_mode(true_mode, t)
    excess = math.sqrt(2.0 * variance) - 1.0
    sizes = [min(SYNTH_CHUNK, windows - start) for start in range(0, windows, SYNTH_CHUNK)]

    def draw(c: int) -> np.ndarray:
        rng = np.random.default_rng([seed, c])
        w = rng.normal(0.0, math.sqrt(VACUUM_VARIANCE), size=(sizes[c], len(t)))
        return w + excess * np.outer(w @ f, f)

    def moments(c: int) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
        y = draw(c)
        return y.sum(axis=0), y.T @ y, y if keep_windows else None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(moments, range(len(sizes))))
    else:
        parts = [moments(c) for c in range(len(sizes))]
    total = np.zeros(len(t))
    outer = np.zeros((len(t), len(t)))
    for s, o, _ in parts:
        total += s
        outer += o
    mean = total / windows
    cov = (outer - windows * np.outer(mean, mean)) / (windows - 1)
    kept = np.vstack([y for _, _, y in parts]) if keep_windows else None
    return TimeSeriesEnsemble(t, cov, windows, VACUUM_VARIANCE, kept)


def projected_variance(ensemble: TimeSeriesEnsemble, mode: ModeFunction) -> float:
    """Empirical variance of the quadrature in mode, in vacuum-normalized units."""
    g = sample_mode(mode, ensemble.t)
    return float(g @ ensemble.normalized_covariance() @ g)


@dataclass(frozen=True)
class FitResult:
    mode: ModeFunction
    variance: float
    identifiable: bool
    evaluations: int
    converged: bool

    def to_json(self) -> Dict[str, Any]:
        return dict(
            self.mode.to_json(),
            variance=self.variance,
            identifiable=self.identifiable,
            evaluations=self.evaluations,
            converged=self.converged,
        )


def identifiability_margin(n_windows: int) -> float:
    """Excess over vacuum needed before a fitted maximum is more than sampling noise."""
    return IDENTIFIABILITY_SIGMAS * VACUUM_VARIANCE * math.sqrt(2.0 / n_windows)


def _log_point(f: ModeFunction) -> np.ndarray:
    return np.array([math.log(f.gamma1_mhz), math.log(f.gamma2_mhz), f.t0_ns])


def _start_points(initial: ModeFunction, lower: np.ndarray, upper: np.ndarray) -> List[np.ndarray]:
    """The initial guess, then every combination of rescaled bandwidths and shifted t0."""
    x0 = _log_point(initial.canonical())
    points = [x0]
    for a, b, shift in itertools.product(START_SCALES, START_SCALES, START_SHIFTS_NS):
        points.append(x0 + np.array([math.log(a), math.log(b), shift]))
    return [np.clip(p, lower, upper) for p in points]


def _simplex(x: np.ndarray, steps: np.ndarray, upper: np.ndarray) -> np.ndarray:
    vertices = [x]
    for i, step in enumerate(steps):
        v = x.copy()
        v[i] = x[i] + step if x[i] + step <= upper[i] else x[i] - step
        vertices.append(v)
    return np.array(vertices)


def fit_mode(
    ensemble: TimeSeriesEnsemble,
    initial: ModeFunction,
    bounds_mhz: Tuple[float, float] = MODE_GAMMA_BOUNDS_MHZ,
    max_evals: int = 4000,
) -> FitResult:
    """(gamma1, gamma2, t0) maximizing the projected quadrature variance.

    Nelder-Mead over (ln MHz, ln MHz, ns) inside the bandwidth box and the time
    window, restarted from a small grid around the initial guess; the best start is
    polished with a fresh, tighter simplex. max_evals bounds each run.
    """
    if ensemble.n_windows < MIN_WINDOWS:
        raise ModeFitError(f"need at least {MIN_WINDOWS} windows, got {ensemble.n_windows}")
    _check_sampling(initial, ensemble.dt)
    cov = ensemble.normalized_covariance()
    t = ensemble.t

    def objective(x: np.ndarray) -> float:
        try:
            g = sample_mode(ModeFunction.from_mhz(math.exp(x[0]), math.exp(x[1]), x[2]), t)
        except (ModeFitError, ArithmeticError, ValueError):
            return FIT_PENALTY
        value = float(g @ cov @ g)
        return -value if math.isfinite(value) else FIT_PENALTY

    lower = np.array([math.log(bounds_mhz[0]), math.log(bounds_mhz[0]), t[0] / NS])
    upper = np.array([math.log(bounds_mhz[1]), math.log(bounds_mhz[1]), t[-1] / NS])
    bounds = list(zip(lower, upper))

    def run(x: np.ndarray, steps: np.ndarray) -> Any:
        return minimize(
            objective,
            x,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "maxfev": max_evals,
                "xatol": FIT_XATOL,
                "fatol": FIT_FATOL,
                "initial_simplex": _simplex(x, steps, upper),
            },
        )

    steps = np.array(SIMPLEX_STEPS)
    runs = [run(x, steps) for x in _start_points(initial, lower, upper)]
    best = min(runs, key=lambda r: r.fun)
    polished = run(best.x, steps / 4.0)
    final = polished if polished.fun <= best.fun else best
    if not polished.success:
        warnings.warn(ConvergenceWarning(f"mode fit stopped: {polished.message}"), stacklevel=2)
    if final.fun >= FIT_PENALTY:
        raise ModeFitError("no start produced a usable mode inside the bounds")
    mode = ModeFunction.from_mhz(math.exp(final.x[0]), math.exp(final.x[1]), final.x[2]).canonical()
    value = -float(final.fun)
    return FitResult(
        mode=mode,
        variance=value,
        identifiable=value - VACUUM_VARIANCE > identifiability_margin(ensemble.n_windows),
        evaluations=sum(int(r.nfev) for r in runs) + int(polished.nfev),
        converged=bool(polished.success),
    )
