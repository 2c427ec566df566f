"""Covariance-matrix model of the squeezing gate and phase-space cat states.

Conventions match fock.py: hbar = 1, vacuum covariance I/2, quadrature order (x, p).
A Gaussian channel (X, Y) maps mean -> X mean and cov -> X cov X^T + Y; on Wigner
functions it is the linear map X followed by convolution with a Gaussian of covariance Y.
"""

import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence, Tuple

import numpy as np

from loop_squeezer.constants import PSD_TOL, VACUUM_VARIANCE
from loop_squeezer.errors import DegenerateGateError, DimensionMismatchError, StateError

Channel = Tuple[np.ndarray, np.ndarray]

VARIANTS = ("first_step", "loop_step")


def symplectic_form(n_modes: int = 1) -> np.ndarray:
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), omega)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance of one (or two) modes."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float).ravel()
        cov = np.array(self.cov, dtype=float)
        if mean.size not in (2, 4) or cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(
                f"mean of length {mean.size} does not match covariance {cov.shape}"
            )
        if np.max(np.abs(cov - cov.T)) > 1e-9:
            raise StateError("covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    @property
    def var_x(self) -> float:
        return float(self.cov[0, 0])

    @property
    def var_p(self) -> float:
        return float(self.cov[1, 1])

    def quadrature_variance(self, phi: float) -> float:
        """Var(x cos(phi) + p sin(phi)) of the first mode."""
        c, s = math.cos(phi), math.sin(phi)
        v = self.cov
        return float(c * c * v[0, 0] + s * s * v[1, 1] + 2 * s * c * v[0, 1])

    def purity(self) -> float:
        return float(1.0 / (2.0**self.n_modes * math.sqrt(np.linalg.det(self.cov))))

    def validate(self, tol: float = PSD_TOL) -> "GaussianState":
        """Raise StateError unless cov + (i/2) Omega is positive semidefinite."""
        check = self.cov + 0.5j * symplectic_form(self.n_modes)
        lowest = float(np.linalg.eigvalsh(check)[0])
        if lowest < -tol:
            raise StateError(f"covariance violates the uncertainty relation ({lowest:.3e})")
        return self

    @classmethod
    def vacuum(cls) -> "GaussianState":
        return cls(np.zeros(2), VACUUM_VARIANCE * np.eye(2))

    @classmethod
    def squeezed(cls, r: float) -> "GaussianState":
        """S(r)|0>: Var(x) = e^{-2r}/2, Var(p) = e^{2r}/2."""
        return cls(np.zeros(2), np.diag([0.5 * math.exp(-2 * r), 0.5 * math.exp(2 * r)]))

    @classmethod
    def thermal(cls, nbar: float) -> "GaussianState":
        return cls(np.zeros(2), (nbar + 0.5) * np.eye(2))


# Elementary single-mode channels


def loss_channel(eta: float) -> Channel:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must be in [0, 1], got {eta}")
    return math.sqrt(eta) * np.eye(2), 0.5 * (1.0 - eta) * np.eye(2)


def squeeze_matrix(r: float) -> np.ndarray:
    return np.diag([math.exp(-r), math.exp(r)])


def rotation_matrix(theta: float) -> np.ndarray:
    """Phase-space image of exp(i theta n): features at angle 0 move to angle theta."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def apply_channel(state: GaussianState, X: np.ndarray, Y: np.ndarray) -> GaussianState:
    return GaussianState(X @ state.mean, X @ state.cov @ X.T + Y)


def apply_loss_cov(state: GaussianState, eta: float) -> GaussianState:
    return apply_channel(state, *loss_channel(eta))


def squeeze_cov(state: GaussianState, r: float) -> GaussianState:
    return apply_channel(state, squeeze_matrix(r), np.zeros((2, 2)))


def rotate_cov(state: GaussianState, theta: float) -> GaussianState:
    return apply_channel(state, rotation_matrix(theta), np.zeros((2, 2)))


def compose_channels(channels: Iterable[Channel]) -> Channel:
    """Channels applied in order; returns the single equivalent (X, Y)."""
    X = np.eye(2)
    Y = np.zeros((2, 2))
    for Xi, Yi in channels:
        X = Xi @ X
        Y = Xi @ Y @ Xi.T + Yi
    return X, Y


# Ancilla and gate


def ancilla_variances(
    pure_squeezing_db: Optional[float], preparation_loss: float
) -> Tuple[float, float]:
    """(squeezed, antisqueezed) variances of a lossy squeezed vacuum.

    None or -inf dB is an infinitely squeezed ancilla: (loss/2, inf).
    """
    if not 0.0 <= preparation_loss < 1.0:
        raise ValueError(f"preparation loss must be in [0, 1), got {preparation_loss}")
    eta = 1.0 - preparation_loss
    if pure_squeezing_db is None or math.isinf(pure_squeezing_db):
        return 0.5 * preparation_loss, math.inf
    if pure_squeezing_db > 0:
        raise ValueError(f"pure squeezing level must be <= 0 dB, got {pure_squeezing_db}")
    level = 10.0 ** (pure_squeezing_db / 10.0)
    v_sq = eta * VACUUM_VARIANCE * level + 0.5 * preparation_loss
    v_anti = eta * VACUUM_VARIANCE / level + 0.5 * preparation_loss
    return v_sq, v_anti


def ancilla_cov(spec: Any) -> Tuple[float, float]:
    """ancilla_variances for any object with pure_squeezing_db and preparation_loss."""
    return ancilla_variances(spec.pure_squeezing_db, spec.preparation_loss)


def ideal_gain(R: float, variant: str) -> float:
    _check_gate(R, variant)
    T = 1.0 - R
    if variant == "loop_step":
        return math.sqrt(T / R)
    return -math.sqrt(R / T)


def _check_gate(R: float, variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown gate variant {variant!r}")
    if not 0.0 < R < 1.0:
        raise DegenerateGateError(f"reflectivity must lie strictly inside (0, 1), got {R}")


def measurement_frame(phi_deg: float) -> np.ndarray:
    """Orthogonal Q taking lab (x, p) to the frame where x_phi is the frame p.

    In this frame the ancilla is squeezed along frame x.
    """
    phi = math.radians(phi_deg)
    s, c = math.sin(phi), math.cos(phi)
    return np.array([[s, -c], [c, s]])


def frame_gains(R: float, variant: str, gain: float) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal frame matrices acting on the input and the ancilla.

    The kept mode is the loop port. loop_step keeps the input there; first_step keeps
    the ancilla and measures the input.
    """
    sr, st = math.sqrt(R), math.sqrt(1.0 - R)
    if variant == "loop_step":
        a_in = np.array([sr, sr + gain * st])
        a_anc = np.array([st, st - gain * sr])
    else:
        a_in = np.array([st, st - gain * sr])
        a_anc = np.array([sr, sr + gain * st])
    return a_in, a_anc


def step_channel(
    R: float,
    variant: str,
    v_anc_sq: float,
    v_anc_anti: float,
    eta_loop: float,
    phi_deg: float = 90.0,
    gain: Optional[float] = None,
    ancilla_eta: float = 1.0,
) -> Channel:
    """(X, Y) of one squeezing step: beam splitter, homodyne, feedforward, loop loss.

    ancilla_eta is the extra transmissivity the ancilla sees before the beam splitter.
    """
    _check_gate(R, variant)
    if gain is None:
        gain = ideal_gain(R, variant)
    if v_anc_sq < 0 or v_anc_anti < VACUUM_VARIANCE:
        raise ValueError("ancilla variances must satisfy 0 <= V_sq and V_anti >= 1/2")
    v_sq = ancilla_eta * v_anc_sq + 0.5 * (1.0 - ancilla_eta)
    v_anti = ancilla_eta * v_anc_anti + 0.5 * (1.0 - ancilla_eta)
    a_in, a_anc = frame_gains(R, variant, gain)
    noise = [a_anc[0] ** 2 * v_sq, 0.0]
    # an exactly cancelled antisqueezed term stays zero even for an infinite variance
    if abs(a_anc[1]) > 1e-12:
        if not math.isfinite(v_anti):
            raise ValueError(
                f"gain {gain:.4g} leaves {a_anc[1]:.3g} of an infinitely antisqueezed ancilla in the output"
            )
        noise[1] = a_anc[1] ** 2 * v_anti
    Q = measurement_frame(phi_deg)
    X = Q.T @ np.diag(a_in) @ Q
    Y = Q.T @ np.diag(noise) @ Q
    X_loss, Y_loss = loss_channel(eta_loop)
    return X_loss @ X, X_loss @ Y @ X_loss.T + Y_loss


def mis_step_cov(
    state: GaussianState,
    R: float,
    variant: str,
    V_anc_x: float,
    V_anc_antisq: float,
    eta_loop: float,
    phi_deg: float = 90.0,
    gain: Optional[float] = None,
    ancilla_eta: float = 1.0,
) -> GaussianState:
    """Output moments of one measurement-induced squeezing step."""
    if V_anc_x > VACUUM_VARIANCE:
        raise ValueError(f"ancilla squeezed variance {V_anc_x} exceeds vacuum")
    X, Y = step_channel(R, variant, V_anc_x, V_anc_antisq, eta_loop, phi_deg, gain, ancilla_eta)
    return apply_channel(state, X, Y)


def propagate_program_cov(state: GaussianState, program: Any) -> GaussianState:
    """Run every step of a program (anything exposing gaussian_channels())."""
    for X, Y in program.gaussian_channels():
        state = apply_channel(state, X, Y)
    return state


def program_channel(program: Any) -> Channel:
    return compose_channels(program.gaussian_channels())


def equivalent_input_noise(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Channel noise referred back to the input: X^-1 Y X^-T."""
    Xi = np.linalg.inv(X)
    return Xi @ Y @ Xi.T


def gaussian_fidelity(a: GaussianState, b: GaussianState) -> float:
    """Closed-form fidelity of two single-mode Gaussian states."""
    if a.n_modes != 1 or b.n_modes != 1:
        raise DimensionMismatchError("gaussian_fidelity takes single-mode states")
    total = a.cov + b.cov
    delta = float(np.linalg.det(total))
    small = 4.0 * (np.linalg.det(a.cov) - 0.25) * (np.linalg.det(b.cov) - 0.25)
    small = max(float(small), 0.0)
    d = a.mean - b.mean
    shift = math.exp(-0.5 * float(d @ np.linalg.solve(total, d)))
    return shift / (math.sqrt(delta + small) - math.sqrt(small))


def gaussian_density(
    points: np.ndarray, mean: np.ndarray, cov: np.ndarray
) -> np.ndarray:
    """Normalized 2D Gaussian at points of shape (..., 2)."""
    inv = np.linalg.inv(cov)
    diff = points - mean
    quad = np.einsum("...i,ij,...j->...", diff, inv, diff)
    return np.exp(-0.5 * quad) / (2 * math.pi * math.sqrt(np.linalg.det(cov)))


def _points(x: Any, p: Any) -> np.ndarray:
    xs = np.asarray(x, dtype=float)
    ps = np.asarray(p, dtype=float)
    return np.stack(np.broadcast_arrays(xs, ps), axis=-1)


# Phase-space cat states


@dataclass(frozen=True, eq=False)
class PhotonSubtractedGaussian:
    """W(xi) = G_cov(xi) (a + xi^T B xi), zero mean, with a + Tr(B cov) = 1.

    Ideal single-photon subtraction of a zero-mean Gaussian has this form, and so does
    its image under any Gaussian channel.
    """

    cov: np.ndarray
    a: float
    B: np.ndarray

    @classmethod
    def from_gaussian(cls, cov: np.ndarray) -> "PhotonSubtractedGaussian":
        """a rho a^dag for the zero-mean Gaussian rho of covariance cov."""
        cov = np.asarray(cov, dtype=float)
        M = np.eye(2) - 0.5 * np.linalg.inv(cov)
        quad = M.T @ M
        offset = 0.5 * float(np.trace(M))
        norm = float(np.trace(quad @ cov)) + offset
        if norm <= 1e-15:
            raise StateError("photon subtraction from this state has zero probability")
        return cls(cov, offset / norm, quad / norm)

    def apply_channel(self, X: np.ndarray, Y: np.ndarray) -> "PhotonSubtractedGaussian":
        cov_out = X @ self.cov @ X.T + Y
        K = self.cov @ X.T @ np.linalg.inv(cov_out)
        cond = self.cov - K @ X @ self.cov
        a = self.a + float(np.trace(self.B @ cond))
        return PhotonSubtractedGaussian(cov_out, a, K.T @ self.B @ K)

    def wigner(self, x: Any, p: Any) -> np.ndarray:
        pts = _points(x, p)
        poly = self.a + np.einsum("...i,ij,...j->...", pts, self.B, pts)
        return gaussian_density(pts, np.zeros(2), self.cov) * poly

    def negativity(self) -> float:
        return float(self.a / (2 * math.pi * math.sqrt(np.linalg.det(self.cov))))

    def moments(self) -> GaussianState:
        V = self.cov
        return GaussianState(np.zeros(2), V + 2.0 * V @ self.B @ V)


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Signed mixture sum_k w_k G(mean_k, cov_k) with sum_k w_k = 1."""

    weights: np.ndarray
    means: np.ndarray
    covs: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float).ravel()
        means = np.array(self.means, dtype=float).reshape(w.size, 2)
        covs = np.array(self.covs, dtype=float).reshape(w.size, 2, 2)
        if abs(w.sum() - 1.0) > 1e-9:
            raise StateError(f"mixture weights sum to {w.sum():.12f}, expected 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covs", covs)

    @classmethod
    def from_components(
        cls, components: Sequence[Tuple[float, np.ndarray, np.ndarray]]
    ) -> "GaussianMixture":
        weights = [c[0] for c in components]
        means = [c[1] for c in components]
        covs = [c[2] for c in components]
        return cls(np.array(weights), np.array(means), np.array(covs))

    def apply_channel(self, X: np.ndarray, Y: np.ndarray) -> "GaussianMixture":
        means = self.means @ X.T
        covs = np.einsum("ij,kjl,ml->kim", X, self.covs, X) + Y
        return GaussianMixture(self.weights, means, covs)

    def wigner(self, x: Any, p: Any) -> np.ndarray:
        pts = _points(x, p)
        total = np.zeros(pts.shape[:-1])
        for w, m, c in zip(self.weights, self.means, self.covs):
            total = total + w * gaussian_density(pts, m, c)
        return total

    def negativity(self) -> float:
        return float(self.wigner(0.0, 0.0))

    def moments(self) -> GaussianState:
        mean = self.weights @ self.means
        second = np.einsum("k,kij->ij", self.weights, self.covs)
        second = second + np.einsum("k,ki,kj->ij", self.weights, self.means, self.means)
        return GaussianState(mean, second - np.outer(mean, mean))


def vacuum_conditioned(gamma: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    """Project mode B of a zero-mean two-mode Gaussian onto vacuum.

    Returns (probability of no photon in B, marginal covariance of A,
    covariance of A given no photon in B).
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (4, 4):
        raise DimensionMismatchError("vacuum conditioning needs a 4x4 covariance")
    g_aa, g_ab, g_bb = gamma[:2, :2], gamma[:2, 2:], gamma[2:, 2:]
    shifted = g_bb + VACUUM_VARIANCE * np.eye(2)
    p0 = 1.0 / math.sqrt(float(np.linalg.det(shifted)))
    cond = g_aa - g_ab @ np.linalg.solve(shifted, g_ab.T)
    return p0, g_aa, cond


def beamsplitter_symplectic(R: float) -> np.ndarray:
    """Two-mode phase-space matrix of the fock.py beam splitter convention."""
    sr, st = math.sqrt(R), math.sqrt(1.0 - R)
    eye = np.eye(2)
    return np.block([[sr * eye, st * eye], [st * eye, -sr * eye]])


def stack_covariances(*covs: np.ndarray) -> np.ndarray:
    size = 2 * len(covs)
    out = np.zeros((size, size))
    for i, c in enumerate(covs):
        out[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = c
    return out
