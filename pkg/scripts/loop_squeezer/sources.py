"""Light sources: the lossy ancillary squeezed vacuum and the heralded cat state."""

import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from loop_squeezer.constants import (
    CUTOFF_WARNING_THRESHOLD,
    DEFAULT_CAT,
    HERALD_MIN_PROBABILITY,
)
from loop_squeezer.errors import HeraldError, StateError
from loop_squeezer.fock import (
    FockState,
    apply_kraus,
    apply_loss,
    loss_kraus,
    make_squeezed_vacuum,
    rotate,
    warn_if_truncated,
)
from loop_squeezer.gaussian import (
    GaussianMixture,
    PhotonSubtractedGaussian,
    ancilla_variances,
    beamsplitter_symplectic,
    loss_channel,
    stack_covariances,
    vacuum_conditioned,
)

DETECTORS = ("on_off", "projector")
PhaseSpaceCat = Union[GaussianMixture, PhotonSubtractedGaussian]


def db_to_r(level_db: float) -> float:
    """Squeezing parameter of a pure state whose squeezed variance is level_db below vacuum."""
    return -level_db * math.log(10.0) / 20.0


@dataclass(frozen=True)
class AncillaSpec:
    """Squeezed vacuum from a pure source followed by preparation loss.

    pure_squeezing_db None (or -inf) is the infinitely squeezed limit.
    """

    pure_squeezing_db: Optional[float]
    preparation_loss: float = 0.0
    quadrature: str = "x"

    def __post_init__(self) -> None:
        db = self.pure_squeezing_db
        if db is not None and not math.isinf(db) and db > 0:
            raise ValueError(f"pure squeezing level must be <= 0 dB, got {db}")
        if not 0.0 <= self.preparation_loss < 1.0:
            raise ValueError(f"preparation loss must be in [0, 1), got {self.preparation_loss}")
        if self.quadrature not in ("x", "p"):
            raise ValueError(f"quadrature must be 'x' or 'p', got {self.quadrature!r}")

    @property
    def is_ideal(self) -> bool:
        db = self.pure_squeezing_db
        return db is None or math.isinf(db)

    @property
    def r(self) -> float:
        if self.is_ideal:
            return math.inf
        return db_to_r(float(self.pure_squeezing_db))  # type: ignore[arg-type]

    def variances(self) -> Tuple[float, float]:
        """(squeezed, antisqueezed) quadrature variances."""
        return ancilla_variances(self.pure_squeezing_db, self.preparation_loss)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], quadrature: str = "x") -> "AncillaSpec":
        return cls(
            pure_squeezing_db=data.get("pure_squeezing_db"),
            preparation_loss=float(data.get("preparation_loss", 0.0)),
            quadrature=data.get("quadrature", quadrature),
        )


@dataclass(frozen=True)
class CatSpec:
    """Photon subtraction from a squeezed vacuum at a weak tap."""

    source_squeezing_r: float = DEFAULT_CAT["source_squeezing_r"]
    tap_reflectivity: float = DEFAULT_CAT["tap_reflectivity"]
    preparation_loss: float = DEFAULT_CAT["preparation_loss"]
    detector: str = DEFAULT_CAT["detector"]

    def __post_init__(self) -> None:
        if not self.source_squeezing_r > 0:
            raise ValueError(f"source squeezing must be positive, got {self.source_squeezing_r}")
        if not 0.0 < self.tap_reflectivity <= 0.5:
            raise ValueError(f"tap reflectivity must be in (0, 0.5], got {self.tap_reflectivity}")
        if not 0.0 <= self.preparation_loss < 1.0:
            raise ValueError(f"preparation loss must be in [0, 1), got {self.preparation_loss}")
        if self.detector not in DETECTORS:
            raise ValueError(f"detector must be one of {DETECTORS}, got {self.detector!r}")

    def with_loss(self, preparation_loss: float) -> "CatSpec":
        return replace(self, preparation_loss=preparation_loss)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CatSpec":
        merged = dict(DEFAULT_CAT)
        merged.update(data)
        return cls(
            source_squeezing_r=float(merged["source_squeezing_r"]),
            tap_reflectivity=float(merged["tap_reflectivity"]),
            preparation_loss=float(merged["preparation_loss"]),
            detector=str(merged["detector"]),
        )


def make_ancilla(
    spec: AncillaSpec,
    cutoff: int,
    angle: Optional[float] = None,
    threshold: float = CUTOFF_WARNING_THRESHOLD,
) -> FockState:
    """Lossy squeezed vacuum, squeezed along x_angle (default: its own quadrature)."""
    if spec.is_ideal:
        raise StateError("an infinitely squeezed ancilla has no Fock representation")
    state = make_squeezed_vacuum(spec.r, cutoff, threshold)
    state = apply_loss(state, 0, 1.0 - spec.preparation_loss)
    if angle is None:
        angle = 0.0 if spec.quadrature == "x" else math.pi / 2
    return rotate(state, angle)


def make_cat(
    spec: CatSpec, cutoff: int, threshold: float = CUTOFF_WARNING_THRESHOLD
) -> Tuple[FockState, float]:
    """Heralded cat on the signal mode and the herald probability.

    The source squeezed vacuum meets vacuum at a beam splitter with reflectivity
    1 - tap. Finding k photons in the tap arm leaves the signal in A_k rho A_k^dag,
    where A_k are the loss Kraus operators of transmissivity 1 - tap.
    """
    source = make_squeezed_vacuum(spec.source_squeezing_r, cutoff, threshold)
    branches = loss_kraus(cutoff, 1.0 - spec.tap_reflectivity)
    clicks = branches[1:] if spec.detector == "on_off" else branches[1:2]
    heralded = apply_kraus(source, clicks)
    probability = heralded.trace()
    if probability < HERALD_MIN_PROBABILITY:
        raise HeraldError(f"herald probability {probability:.3e} is numerically zero")
    state = apply_loss(heralded.normalized(), 0, 1.0 - spec.preparation_loss)
    warn_if_truncated(state, threshold, "heralded cat")
    return state, probability


def cat_phase_space(spec: CatSpec) -> PhaseSpaceCat:
    """Exact Wigner-function form of make_cat, free of Fock truncation."""
    s = spec.source_squeezing_r
    source = np.diag([0.5 * math.exp(-2 * s), 0.5 * math.exp(2 * s)])
    loss_X, loss_Y = loss_channel(1.0 - spec.preparation_loss)
    if spec.detector == "projector":
        # a single tap photon keeps a squeezed vacuum with tanh(s') = (1 - tap) tanh(s)
        s_kept = math.atanh((1.0 - spec.tap_reflectivity) * math.tanh(s))
        kept = np.diag([0.5 * math.exp(-2 * s_kept), 0.5 * math.exp(2 * s_kept)])
        return PhotonSubtractedGaussian.from_gaussian(kept).apply_channel(loss_X, loss_Y)
    S = beamsplitter_symplectic(1.0 - spec.tap_reflectivity)
    gamma = S @ stack_covariances(source, 0.5 * np.eye(2)) @ S.T
    p_none, marginal, conditioned = vacuum_conditioned(gamma)
    p_click = 1.0 - p_none
    if p_click < HERALD_MIN_PROBABILITY:
        raise HeraldError(f"herald probability {p_click:.3e} is numerically zero")
    mixture = GaussianMixture.from_components(
        [
            (1.0 / p_click, np.zeros(2), marginal),
            (-p_none / p_click, np.zeros(2), conditioned),
        ]
    )
    return mixture.apply_channel(loss_X, loss_Y)
