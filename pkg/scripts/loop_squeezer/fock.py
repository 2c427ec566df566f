"""Truncated Fock-basis states and channels for loop-squeezer.

Quadratures use hbar = 1: x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)),
so the vacuum has Var(x) = Var(p) = 1/2. Two-mode matrices index |n1, n2> as
n1 * d + n2 (mode 0 major).

Beam splitter convention (Heisenberg picture, identical for p):

    x1 -> sqrt(R) x1 + sqrt(T) x2
    x2 -> sqrt(T) x1 - sqrt(R) x2
"""

import json
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import expm

from loop_squeezer.constants import (
    CUTOFF_WARNING_THRESHOLD,
    HERMITIAN_TOL,
    PSD_TOL,
    TRACE_TOL,
)
from loop_squeezer.errors import CutoffWarning, DimensionMismatchError, StateError
from loop_squeezer.gaussian import GaussianState

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class FockState:
    """Density matrix of one or two modes in a truncated Fock basis."""

    dims: Tuple[int, ...]
    data: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) not in (1, 2):
            raise DimensionMismatchError(f"FockState supports 1 or 2 modes, got {len(dims)}")
        if any(d < 2 for d in dims):
            raise DimensionMismatchError(f"cutoff must be >= 2 per mode, got {dims}")
        if len(dims) == 2 and dims[0] != dims[1]:
            raise DimensionMismatchError(f"mixed cutoffs are not supported: {dims}")
        size = int(np.prod(dims))
        data = np.array(self.data, dtype=complex)
        if data.shape != (size, size):
            raise DimensionMismatchError(f"data shape {data.shape} does not match dims {dims}")
        data.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def cutoff(self) -> int:
        return self.dims[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.data + self.data.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def normalized(self) -> "FockState":
        tr = np.trace(self.data)
        if abs(tr) == 0:
            raise StateError("cannot normalize a zero-trace matrix")
        return FockState(self.dims, self.data / tr)

    def validate(self, psd_tol: float = PSD_TOL) -> "FockState":
        """Raise StateError unless the matrix is Hermitian, unit-trace and PSD."""
        if np.max(np.abs(self.data - self.data.conj().T)) > HERMITIAN_TOL:
            raise StateError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > TRACE_TOL:
            raise StateError(f"density matrix trace is {self.trace():.12f}, expected 1")
        lowest = self.min_eigenvalue()
        if lowest < -psd_tol:
            raise StateError(f"density matrix has negative eigenvalue {lowest:.3e}")
        return self

    def populations(self, mode: int = 0) -> np.ndarray:
        """Photon-number distribution of one mode."""
        reduced = self if self.n_modes == 1 else partial_trace(self, mode)
        return np.real(np.diag(reduced.data)).copy()

    def top_population(self) -> float:
        """Largest population held by the top two Fock levels of any mode."""
        return max(float(np.sum(self.populations(m)[-2:])) for m in range(self.n_modes))

    def cutoff_adequate(self, threshold: float = CUTOFF_WARNING_THRESHOLD) -> bool:
        return self.top_population() < threshold


def warn_if_truncated(state: FockState, threshold: float, context: str) -> None:
    top = state.top_population()
    if top >= threshold:
        warnings.warn(
            CutoffWarning(
                f"{context}: top Fock levels hold {top:.2e} of the population "
                f"(threshold {threshold:.0e}); raise the cutoff"
            ),
            stacklevel=3,
        )


def make_vacuum(n_modes: int, cutoff: int) -> FockState:
    """Vacuum |0...0><0...0|."""
    size = cutoff**n_modes
    data = np.zeros((size, size), dtype=complex)
    data[0, 0] = 1.0
    return FockState((cutoff,) * n_modes, data)


def fock_state(n: int, cutoff: int) -> FockState:
    """Number state |n><n|."""
    if not 0 <= n < cutoff:
        raise DimensionMismatchError(f"|{n}> does not fit below cutoff {cutoff}")
    data = np.zeros((cutoff, cutoff), dtype=complex)
    data[n, n] = 1.0
    return FockState((cutoff,), data)


def pure_state(amplitudes: np.ndarray) -> FockState:
    vec = np.asarray(amplitudes, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return FockState((len(vec),), np.outer(vec, vec.conj()))


def squeezed_vacuum_amplitudes(r: float, cutoff: int) -> np.ndarray:
    """<n|S(r)|0> for S(r) = exp[r/2 (a^2 - a^dag^2)], which maps x -> e^{-r} x."""
    amps = np.zeros(cutoff, dtype=complex)
    if r == 0:
        amps[0] = 1.0
        return amps
    t = math.tanh(abs(r))
    sign = -1.0 if r > 0 else 1.0
    log_norm = -0.5 * math.log(math.cosh(r))
    for k in range((cutoff + 1) // 2):
        n = 2 * k
        log_mag = (
            k * math.log(t)
            + 0.5 * math.lgamma(n + 1)
            - k * math.log(2.0)
            - math.lgamma(k + 1)
            + log_norm
        )
        amps[n] = sign**k * math.exp(log_mag)
    return amps


def make_squeezed_vacuum(
    r: float, cutoff: int, threshold: float = CUTOFF_WARNING_THRESHOLD
) -> FockState:
    """Pure squeezed vacuum S(r)|0>; Var(x) = e^{-2r}/2, Var(p) = e^{2r}/2."""
    state = pure_state(squeezed_vacuum_amplitudes(r, cutoff))
    warn_if_truncated(state, threshold, f"squeezed vacuum r={r:.4f}")
    return state


def two_mode_squeezed_vacuum(r: float, cutoff: int) -> FockState:
    """sum_n tanh(r)^n / cosh(r) |n, n>, renormalized after truncation."""
    vec = np.zeros(cutoff * cutoff, dtype=complex)
    t = math.tanh(r)
    for n in range(cutoff):
        vec[n * cutoff + n] = t**n / math.cosh(r)
    vec /= np.linalg.norm(vec)
    return FockState((cutoff, cutoff), np.outer(vec, vec.conj()))


# Single-mode operators


@lru_cache(maxsize=64)
def annihilation(d: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(complex)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=64)
def _quadrature_moment_ops(d: int) -> Tuple[np.ndarray, ...]:
    """x, p, x^2, p^2 and (xp + px)/2 with exact matrix elements below d."""
    a = np.array(annihilation(d + 2))
    x = (a + a.conj().T) / np.sqrt(2)
    p = (a - a.conj().T) / (1j * np.sqrt(2))
    ops = (x, p, x @ x, p @ p, 0.5 * (x @ p + p @ x))
    out = tuple(np.ascontiguousarray(op[:d, :d]) for op in ops)
    for op in out:
        op.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def squeeze_unitary(d: int, r: float) -> np.ndarray:
    """Matrix of S(r) below d, built in a padded space and truncated."""
    pad = max(2 * d, d + 40)
    a = np.array(annihilation(pad))
    generator = 0.5 * r * (a @ a - a.conj().T @ a.conj().T)
    u = np.ascontiguousarray(expm(generator)[:d, :d])
    u.setflags(write=False)
    return u


@lru_cache(maxsize=64)
def rotation_unitary(d: int, theta: float) -> np.ndarray:
    u = np.diag(np.exp(1j * theta * np.arange(d)))
    u.setflags(write=False)
    return u


def displacement_columns(alphas: ArrayLike, rows: int, cols: int) -> np.ndarray:
    """<k|D(alpha)|n> for k < rows, n < cols, one slab per alpha.

    Uses D|n+1> = (a^dag - alpha*) D|n> / sqrt(n+1); row k of column n+1 only
    needs rows k-1 and k of column n, so the rows kept are exact.
    """
    alpha = np.atleast_1d(np.asarray(alphas, dtype=complex))
    out = np.zeros((alpha.size, rows, cols), dtype=complex)
    col = np.zeros((alpha.size, rows), dtype=complex)
    col[:, 0] = np.exp(-0.5 * np.abs(alpha) ** 2)
    for k in range(1, rows):
        col[:, k] = col[:, k - 1] * alpha / np.sqrt(k)
    out[:, :, 0] = col
    sqrt_k = np.sqrt(np.arange(rows, dtype=float))
    for n in range(cols - 1):
        raised = np.zeros_like(col)
        raised[:, 1:] = sqrt_k[1:] * col[:, :-1]
        col = (raised - np.conj(alpha)[:, None] * col) / np.sqrt(n + 1)
        out[:, :, n + 1] = col
    return out


# Channels


def _sandwich(state: FockState, op: np.ndarray, mode: int) -> np.ndarray:
    """op rho op^dag with op acting on one mode; returns the raw matrix."""
    if state.n_modes == 1:
        return op @ state.data @ op.conj().T
    d = state.cutoff
    r4 = state.data.reshape(d, d, d, d)
    if mode == 0:
        out = np.einsum("ai,ikjl,bj->akbl", op, r4, op.conj(), optimize=True)
    elif mode == 1:
        out = np.einsum("ck,ikjl,dl->icjd", op, r4, op.conj(), optimize=True)
    else:
        raise DimensionMismatchError(f"mode index {mode} out of range")
    return out.reshape(d * d, d * d)


def _check_mode(state: FockState, mode: int) -> None:
    if not 0 <= mode < state.n_modes:
        raise DimensionMismatchError(f"mode index {mode} out of range for {state.n_modes} modes")


def apply_unitary(state: FockState, unitary: np.ndarray, mode: int = 0) -> FockState:
    _check_mode(state, mode)
    return FockState(state.dims, _sandwich(state, unitary, mode))


def apply_kraus(state: FockState, ops: Sequence[np.ndarray], mode: int = 0) -> FockState:
    _check_mode(state, mode)
    total = sum(_sandwich(state, op, mode) for op in ops)
    return FockState(state.dims, total)


@lru_cache(maxsize=128)
def loss_kraus(d: int, eta: float) -> Tuple[np.ndarray, ...]:
    """Kraus operators of the pure-loss channel with transmissivity eta."""
    ops = []
    for k in range(d):
        op = np.zeros((d, d), dtype=complex)
        for n in range(k, d):
            op[n - k, n] = math.sqrt(math.comb(n, k)) * eta ** ((n - k) / 2) * (1 - eta) ** (k / 2)
        op.setflags(write=False)
        ops.append(op)
    return tuple(ops)


def apply_loss(state: FockState, mode_index: int, eta: float) -> FockState:
    """Beam splitter with a vacuum environment, environment traced out."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must be in [0, 1], got {eta}")
    _check_mode(state, mode_index)
    if eta == 1.0:
        return state
    return apply_kraus(state, loss_kraus(state.cutoff, float(eta)), mode_index)


@lru_cache(maxsize=32)
def beamsplitter_unitary(d: int, R: float) -> np.ndarray:
    """Two-mode beam splitter matrix below cutoff d, exact per photon-number block.

    U = Par_2 exp(theta (a1^dag a2 - a1 a2^dag)) with cos(theta) = sqrt(R).
    """
    theta = math.acos(math.sqrt(R))
    u = np.zeros((d * d, d * d), dtype=complex)
    for total in range(2 * d - 1):
        size = total + 1
        gen = np.zeros((size, size))
        for k in range(total):
            # k counts photons in mode 1 within the block
            amp = math.sqrt((k + 1) * (total - k))
            gen[k + 1, k] = amp
            gen[k, k + 1] = -amp
        block = expm(theta * gen)
        parity = np.array([(-1.0) ** (total - k) for k in range(size)])
        block = parity[:, None] * block
        ks = [k for k in range(size) if k < d and total - k < d]
        idx = [k * d + (total - k) for k in ks]
        u[np.ix_(idx, idx)] = block[np.ix_(ks, ks)]
    u.setflags(write=False)
    return u


def apply_beamsplitter(state: FockState, R: float) -> FockState:
    if state.n_modes != 2:
        raise DimensionMismatchError("beam splitter needs a two-mode state")
    if not 0.0 <= R <= 1.0:
        raise ValueError(f"reflectivity must be in [0, 1], got {R}")
    u = beamsplitter_unitary(state.cutoff, float(R))
    return FockState(state.dims, u @ state.data @ u.conj().T)


def displace(
    state: FockState,
    mode_index: int,
    dx: float,
    dp: float,
    threshold: float = CUTOFF_WARNING_THRESHOLD,
) -> FockState:
    """Shift <x> by dx and <p> by dp."""
    if not (math.isfinite(dx) and math.isfinite(dp)):
        raise ValueError("displacement must be finite")
    if dx == 0 and dp == 0:
        return state
    d = state.cutoff
    op = displacement_columns((dx + 1j * dp) / math.sqrt(2), d, d)[0]
    out = apply_unitary(state, op, mode_index)
    warn_if_truncated(out, threshold, f"displacement ({dx:.3f}, {dp:.3f})")
    return out


def rotate(state: FockState, theta: float, mode_index: int = 0) -> FockState:
    """exp(i theta n) rho exp(-i theta n): moves phase-space features at angle 0 to theta."""
    if theta == 0:
        return state
    return apply_unitary(state, rotation_unitary(state.cutoff, float(theta)), mode_index)


def apply_gaussian_noise(
    state: FockState,
    var_x: float,
    var_p: float = 0.0,
    mode_index: int = 0,
    nodes: int = 48,
) -> FockState:
    """Random displacement channel with independent Gaussian kicks in x and p."""
    if var_x < 0 or var_p < 0:
        raise ValueError("noise variances must be nonnegative")
    if var_x == 0 and var_p == 0:
        return state
    t, w = np.polynomial.hermite.hermgauss(nodes)
    w = w / math.sqrt(math.pi)

    def axis(var: float) -> Tuple[np.ndarray, np.ndarray]:
        if var == 0:
            return np.zeros(1), np.ones(1)
        return math.sqrt(2 * var) * t, w

    xs, wx = axis(var_x)
    ps, wp = axis(var_p)
    kicks = (xs[:, None] + 1j * ps[None, :]).ravel() / math.sqrt(2)
    weights = (wx[:, None] * wp[None, :]).ravel()
    keep = weights > 1e-300
    d = state.cutoff
    ops = displacement_columns(kicks[keep], d, d)
    ops = ops * np.sqrt(weights[keep])[:, None, None]
    return apply_kraus(state, list(ops), mode_index)


# Reductions and products


def partial_trace(state: FockState, keep_mode: int) -> FockState:
    if state.n_modes != 2:
        raise DimensionMismatchError("partial trace needs a two-mode state")
    d = state.cutoff
    r4 = state.data.reshape(d, d, d, d)
    if keep_mode == 0:
        out = np.einsum("ikjk->ij", r4)
    elif keep_mode == 1:
        out = np.einsum("kikj->ij", r4)
    else:
        raise DimensionMismatchError(f"mode index {keep_mode} out of range")
    return FockState((d,), out)


def tensor(a: FockState, b: FockState) -> FockState:
    if a.n_modes != 1 or b.n_modes != 1:
        raise DimensionMismatchError("tensor product takes two single-mode states")
    if a.cutoff != b.cutoff:
        raise DimensionMismatchError(f"cutoffs differ: {a.cutoff} vs {b.cutoff}")
    return FockState((a.cutoff, b.cutoff), np.kron(a.data, b.data))


def resize(state: FockState, cutoff: int) -> FockState:
    """Single-mode state truncated or zero-padded to a new cutoff, then renormalized."""
    _single_mode(state)
    if cutoff == state.cutoff:
        return state
    data = np.zeros((cutoff, cutoff), dtype=complex)
    keep = min(cutoff, state.cutoff)
    data[:keep, :keep] = state.data[:keep, :keep]
    return FockState((cutoff,), data).normalized()


# Measures


def _single_mode(state: FockState) -> None:
    if state.n_modes != 1:
        raise DimensionMismatchError("operation needs a single-mode state")


def _psd_root(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho: FockState, sigma: FockState) -> float:
    """Jozsa fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    if rho.dims != sigma.dims:
        raise DimensionMismatchError(f"dims differ: {rho.dims} vs {sigma.dims}")
    for s in (rho, sigma):
        lowest = s.min_eigenvalue()
        if lowest < -PSD_TOL:
            raise StateError(f"fidelity input has negative eigenvalue {lowest:.3e}")
    root = _psd_root(rho.data)
    inner = root @ sigma.data @ root
    ev = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    value = float(np.sum(np.sqrt(np.clip(ev, 0.0, None))) ** 2)
    return min(value, 1.0)


def trace_distance(rho: FockState, sigma: FockState) -> float:
    if rho.dims != sigma.dims:
        raise DimensionMismatchError(f"dims differ: {rho.dims} vs {sigma.dims}")
    diff = rho.data - sigma.data
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def photon_number(state: FockState, mode: int = 0) -> float:
    pops = state.populations(mode)
    return float(np.dot(np.arange(len(pops)), pops))


def moments(state: FockState, mode: Optional[int] = None) -> GaussianState:
    """First and second quadrature moments of one mode as a GaussianState."""
    if state.n_modes == 2:
        state = partial_trace(state, 0 if mode is None else mode)
    rho = state.data
    x, p, xx, pp, xp = _quadrature_moment_ops(state.cutoff)

    def ev(op: np.ndarray) -> float:
        return float(np.real(np.trace(rho @ op)))

    mx, mp = ev(x), ev(p)
    cov = np.array(
        [[ev(xx) - mx * mx, ev(xp) - mx * mp], [ev(xp) - mx * mp, ev(pp) - mp * mp]]
    )
    return GaussianState(np.array([mx, mp]), cov)


def quadrature_variance(state: FockState, phi: float) -> float:
    """Var(x cos(phi) + p sin(phi))."""
    cov = moments(state).cov
    c, s = math.cos(phi), math.sin(phi)
    return float(c * c * cov[0, 0] + s * s * cov[1, 1] + 2 * s * c * cov[0, 1])


def squeeze_db(variance: float) -> float:
    """Quadrature level relative to vacuum, 10 log10(2 Var)."""
    return 10.0 * math.log10(2.0 * variance)


def oscillator_eigenfunctions(x: ArrayLike, d: int) -> np.ndarray:
    """psi_n(x) for n < d at each x (shape len(x) by d), by the three-term recurrence."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    psi = np.zeros((xs.size, d))
    psi[:, 0] = math.pi**-0.25 * np.exp(-0.5 * xs**2)
    if d > 1:
        psi[:, 1] = math.sqrt(2.0) * xs * psi[:, 0]
    for n in range(1, d - 1):
        psi[:, n + 1] = (
            math.sqrt(2.0 / (n + 1)) * xs * psi[:, n] - math.sqrt(n / (n + 1)) * psi[:, n - 1]
        )
    return psi


def quadrature_vectors(x: ArrayLike, phi: float, d: int) -> np.ndarray:
    """Rows <n|x_phi> = e^{i phi n} psi_n(x)."""
    return oscillator_eigenfunctions(x, d) * np.exp(1j * phi * np.arange(d))[None, :]


def quadrature_pdf(state: FockState, phi: float, x: ArrayLike) -> np.ndarray:
    """Density of the x_phi = x cos(phi) + p sin(phi) outcome."""
    _single_mode(state)
    v = quadrature_vectors(x, phi, state.cutoff)
    pdf = np.real(np.sum(v.conj() * (v @ state.data.T), axis=1))
    return np.clip(pdf, 0.0, None)


def quadrature_cdf(
    state: FockState, phi: float, span_sigmas: float = 6.0, points: int = 4001
) -> Tuple[np.ndarray, np.ndarray]:
    """Grid and normalized cumulative distribution of the x_phi outcome."""
    _single_mode(state)
    m = moments(state)
    c, s = math.cos(phi), math.sin(phi)
    center = c * m.mean[0] + s * m.mean[1]
    sigma = math.sqrt(max(m.quadrature_variance(phi), 1e-12))
    xs = np.linspace(center - span_sigmas * sigma, center + span_sigmas * sigma, points)
    cdf = cumulative_trapezoid(quadrature_pdf(state, phi, xs), xs, initial=0.0)
    return xs, cdf / cdf[-1]


def sample_quadrature(
    state: FockState, phi: float, n: int, rng: np.random.Generator, points: int = 4001
) -> np.ndarray:
    """n outcomes of x_phi by inverse-CDF interpolation."""
    xs, cdf = quadrature_cdf(state, phi, points=points)
    return np.interp(rng.random(n), cdf, xs)


def wigner_points(
    state: FockState, xs: ArrayLike, ps: ArrayLike, chunk: int = 128
) -> np.ndarray:
    """W(x, p) = (1/pi) Tr[rho D Pi D^dag] at paired points, via parity-displacement."""
    _single_mode(state)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    alphas = (xs + 1j * ps) / math.sqrt(2)
    d = state.cutoff
    rho = state.data
    out = np.empty(alphas.size)
    for start in range(0, alphas.size, chunk):
        block = alphas[start : start + chunk]
        amax = float(np.max(np.abs(block)))
        cols = d + int(math.ceil((amax + math.sqrt(d) + 4.0) ** 2))
        cols_d = displacement_columns(block, d, cols)
        shifted = np.einsum("jk,pkn->pjn", rho, cols_d, optimize=True)
        diag = np.real(np.sum(cols_d.conj() * shifted, axis=1))
        parity = (-1.0) ** np.arange(cols)
        out[start : start + chunk] = diag @ parity / math.pi
    return out


def wigner(state: FockState, x: float, p: float) -> float:
    return float(wigner_points(state, [x], [p])[0])


def wigner_grid(state: FockState, xs: ArrayLike, ps: ArrayLike) -> np.ndarray:
    """W on the grid xs by ps (first axis x)."""
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    gx, gp = np.meshgrid(xs, ps, indexing="ij")
    return wigner_points(state, gx.ravel(), gp.ravel()).reshape(gx.shape)


def parity_value(state: FockState) -> float:
    """(1/pi) sum_n (-1)^n rho_nn, the Wigner value at the origin."""
    _single_mode(state)
    pops = np.real(np.diag(state.data))
    return float(np.dot((-1.0) ** np.arange(len(pops)), pops) / math.pi)


# JSON container


def to_json(state: FockState) -> Dict[str, Any]:
    flat = state.data.ravel()
    return {
        "dims": list(state.dims),
        "data": [[float(z.real), float(z.imag)] for z in flat],
        "convention": "hbar=1",
    }


def from_json(payload: Dict[str, Any]) -> FockState:
    if payload.get("convention") != "hbar=1":
        raise StateError(f"unsupported convention {payload.get('convention')!r}")
    dims = tuple(payload["dims"])
    size = int(np.prod(dims))
    pairs = np.asarray(payload["data"], dtype=float)
    if pairs.shape != (size * size, 2):
        raise DimensionMismatchError(f"data holds {pairs.shape[0]} entries, expected {size * size}")
    data = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(size, size)
    return FockState(dims, data).validate()


def save_state(state: FockState, path: Path) -> None:
    Path(path).write_text(json.dumps(to_json(state)) + "\n")


def load_state(path: Path) -> FockState:
    return from_json(json.loads(Path(path).read_text()))
