"""Measurement-induced squeezing gates on Fock-basis states.

One step couples the state to a squeezed ancilla at a beam splitter of reflectivity R,
measures x_phi on the second port, displaces x_phi of the loop port by g*m and sends
the loop port once around the loop (transmissivity loop_eta).

Port assignment: the loop port is mode 0.
  loop_step:  mode 0 = input,   mode 1 = ancilla, ideal g = +sqrt(T/R)
  first_step: mode 0 = ancilla, mode 1 = input,   ideal g = -sqrt(R/T)
The ancilla is squeezed along x_{phi - 90deg}, so phi = 90 gives x-squeezing and
phi = 0 gives p-squeezing.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from loop_squeezer.constants import (
    CUTOFF_WARNING_THRESHOLD,
    LOOP_ETA,
    QUADRATURE_FAIL_TOL,
    QUADRATURE_MAX_NODES,
    QUADRATURE_SPAN_SIGMAS,
    QUADRATURE_START_NODES,
    QUADRATURE_TOL,
    SCENARIO_PRESETS,
)
from loop_squeezer.errors import (
    ConvergenceWarning,
    DegenerateGateError,
    QuadratureConvergenceError,
)
from loop_squeezer.fock import (
    FockState,
    apply_beamsplitter,
    apply_gaussian_noise,
    apply_loss,
    apply_unitary,
    displacement_columns,
    fidelity,
    moments,
    partial_trace,
    quadrature_cdf,
    quadrature_vectors,
    rotate,
    squeeze_unitary,
    tensor,
    warn_if_truncated,
)
from loop_squeezer.gaussian import Channel, frame_gains, ideal_gain, step_channel
from loop_squeezer.sources import AncillaSpec, make_ancilla

METHODS = ("homodyne", "channel")

IDEAL_ANCILLA = AncillaSpec(None, 0.0)


@dataclass(frozen=True)
class LossScenario:
    """Efficiencies of the loop, the ancilla paths and the cat preparation."""

    name: str = "current"
    loop_eta: float = LOOP_ETA
    ancilla_first_pass_loss: float = 0.04
    cat_preparation_loss: float = 0.30
    ancilla_x: AncillaSpec = field(default_factory=lambda: AncillaSpec(-6.8, 0.22, "x"))
    ancilla_p: AncillaSpec = field(default_factory=lambda: AncillaSpec(-7.0, 0.27, "p"))
    readout_eta: float = 1.0

    def __post_init__(self) -> None:
        for key in ("loop_eta", "ancilla_first_pass_loss", "cat_preparation_loss", "readout_eta"):
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{key} must be in [0, 1], got {value}")

    def ancilla_for(self, phi_deg: float) -> AncillaSpec:
        """x-squeezing steps (phi near 90 deg) use ancilla_x, the rest ancilla_p."""
        phi = math.radians(phi_deg)
        return self.ancilla_x if abs(math.sin(phi)) >= abs(math.cos(phi)) else self.ancilla_p

    @classmethod
    def preset(cls, name: str) -> "LossScenario":
        if name not in SCENARIO_PRESETS:
            raise ValueError(f"unknown scenario {name!r}; presets: {sorted(SCENARIO_PRESETS)}")
        return cls.from_dict(dict(SCENARIO_PRESETS[name], name=name))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "LossScenario":
        return cls(
            name=str(data.get("name", "custom")),
            loop_eta=float(data.get("loop_eta", LOOP_ETA)),
            ancilla_first_pass_loss=float(data.get("ancilla_first_pass_loss", 0.04)),
            cat_preparation_loss=float(data.get("cat_preparation_loss", 0.30)),
            ancilla_x=AncillaSpec.from_dict(data.get("ancilla_x", {}), "x"),
            ancilla_p=AncillaSpec.from_dict(data.get("ancilla_p", {}), "p"),
            readout_eta=float(data.get("readout_eta", 1.0)),
        )

    @classmethod
    def from_config(cls, value: Union[str, Mapping[str, Any]]) -> "LossScenario":
        """A preset name, or a dict that may start from a preset via its name."""
        if isinstance(value, str):
            return cls.preset(value)
        base: Dict[str, Any] = {}
        if value.get("name") in SCENARIO_PRESETS:
            base = dict(SCENARIO_PRESETS[value["name"]])
        base.update(value)
        return cls.from_dict(base)


@dataclass(frozen=True)
class GateStep:
    """One squeezing step; gain None resolves to the ideal feedforward gain."""

    R: float
    phi_deg: float = 90.0
    gain: Optional[float] = None
    variant: str = "loop_step"
    ancilla: AncillaSpec = IDEAL_ANCILLA
    loop_eta: float = LOOP_ETA
    ancilla_eta: float = 1.0

    def __post_init__(self) -> None:
        ideal = ideal_gain(self.R, self.variant)
        if self.gain is None:
            object.__setattr__(self, "gain", ideal)
        if not 0.0 <= self.loop_eta <= 1.0 or not 0.0 <= self.ancilla_eta <= 1.0:
            raise ValueError("transmissivities must be in [0, 1]")

    @property
    def T(self) -> float:
        return 1.0 - self.R

    @property
    def has_ideal_gain(self) -> bool:
        return abs(float(self.gain) - ideal_gain(self.R, self.variant)) < 1e-9  # type: ignore[arg-type]

    @property
    def squeezing(self) -> float:
        """Magnitude of r set by the beam splitter."""
        kept = self.R if self.variant == "loop_step" else self.T
        return -0.5 * math.log(kept)

    @property
    def implied_r(self) -> float:
        """Signed r: positive for x-squeezing (phi = 90), negative for p-squeezing (phi = 0)."""
        phi = math.radians(self.phi_deg)
        sign = 1.0 if abs(math.sin(phi)) >= abs(math.cos(phi)) else -1.0
        return sign * self.squeezing

    def gaussian_channel(self) -> Channel:
        v_sq, v_anti = self.ancilla.variances()
        return step_channel(
            self.R,
            self.variant,
            v_sq,
            v_anti,
            self.loop_eta,
            self.phi_deg,
            self.gain,
            self.ancilla_eta,
        )

    @classmethod
    def from_target(
        cls,
        r: float,
        index: int,
        ancilla: AncillaSpec = IDEAL_ANCILLA,
        loop_eta: float = LOOP_ETA,
        ancilla_eta: float = 1.0,
    ) -> "GateStep":
        R, phi_deg, gain, variant = _working_condition(r, index)
        return cls(R, phi_deg, gain, variant, ancilla, loop_eta, ancilla_eta)


def _working_condition(r: float, index: int) -> Tuple[float, float, float, str]:
    if r == 0:
        raise DegenerateGateError("r = 0 is not a squeezing gate")
    kept = math.exp(-2.0 * abs(r))
    phi_deg = 90.0 if r > 0 else 0.0
    if index == 0:
        R, variant = 1.0 - kept, "first_step"
    else:
        R, variant = kept, "loop_step"
    return R, phi_deg, ideal_gain(R, variant), variant


def r_to_working_condition(r_list: Sequence[float]) -> List[Tuple[float, float, float, str]]:
    """(R, phi_deg, g, variant) per step for a program of signed target r values."""
    if not r_list:
        raise DegenerateGateError("empty r list")
    signs = {math.copysign(1.0, r) for r in r_list if r != 0}
    if any(r == 0 for r in r_list):
        raise DegenerateGateError("r = 0 is not a squeezing gate")
    if len(signs) > 1:
        raise DegenerateGateError("a program squeezes one quadrature: r values must share a sign")
    return [_working_condition(r, i) for i, r in enumerate(r_list)]


@dataclass(frozen=True)
class GateProgram:
    """Ordered squeezing steps; the first step uses the first_step port assignment."""

    steps: Tuple[GateStep, ...]
    scenario: LossScenario = field(default_factory=LossScenario)
    label: str = ""
    target_r: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        steps = tuple(self.steps)
        object.__setattr__(self, "steps", steps)
        for i, step in enumerate(steps):
            expected = "first_step" if i == 0 else "loop_step"
            if step.variant != expected:
                raise ValueError(f"step {i + 1} must use the {expected} variant")
        if self.target_r is not None:
            target = tuple(float(r) for r in self.target_r)
            if len(target) != len(steps):
                raise ValueError("target_r needs one value per step")
            object.__setattr__(self, "target_r", target)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def r_values(self) -> Tuple[float, ...]:
        """Signed squeezing per step: the declared targets, else those the steps imply."""
        if self.target_r is not None:
            return self.target_r
        return tuple(step.implied_r for step in self.steps)

    @property
    def total_r(self) -> float:
        return float(sum(self.r_values))

    def gaussian_channels(self) -> List[Channel]:
        return [step.gaussian_channel() for step in self.steps]

    def prefix(self, n: int) -> "GateProgram":
        target = None if self.target_r is None else self.target_r[:n]
        return replace(self, steps=self.steps[:n], target_r=target)

    def with_scenario(self, scenario: LossScenario) -> "GateProgram":
        """Same working conditions with ancillae and losses from another scenario."""
        steps = [_scenario_step(s.R, s.phi_deg, s.gain, s.variant, i, scenario)
                 for i, s in enumerate(self.steps)]
        return replace(self, steps=tuple(steps), scenario=scenario)

    @classmethod
    def from_r_list(
        cls, r_list: Sequence[float], scenario: Optional[LossScenario] = None, label: str = ""
    ) -> "GateProgram":
        scenario = scenario or LossScenario()
        steps = [
            _scenario_step(R, phi, g, variant, i, scenario)
            for i, (R, phi, g, variant) in enumerate(r_to_working_condition(r_list))
        ]
        return cls(tuple(steps), scenario, label, tuple(r_list))

    @classmethod
    def from_explicit_steps(
        cls,
        steps: Sequence[Mapping[str, Any]],
        scenario: Optional[LossScenario] = None,
        label: str = "",
        target_r: Optional[Sequence[float]] = None,
    ) -> "GateProgram":
        scenario = scenario or LossScenario()
        built = []
        for i, raw in enumerate(steps):
            variant = raw.get("variant", "first_step" if i == 0 else "loop_step")
            gain = raw.get("g")
            built.append(
                _scenario_step(
                    float(raw["R"]),
                    float(raw.get("phi_deg", 90.0)),
                    None if gain is None else float(gain),
                    variant,
                    i,
                    scenario,
                )
            )
        target = None if target_r is None else tuple(target_r)
        return cls(tuple(built), scenario, label, target)


def _scenario_step(
    R: float,
    phi_deg: float,
    gain: Optional[float],
    variant: str,
    index: int,
    scenario: LossScenario,
) -> GateStep:
    ancilla_eta = 1.0 - scenario.ancilla_first_pass_loss if index == 0 else 1.0
    return GateStep(
        R,
        phi_deg,
        gain,
        variant,
        scenario.ancilla_for(phi_deg),
        scenario.loop_eta,
        ancilla_eta,
    )


# Execution


def _arrange(state: FockState, step: GateStep) -> FockState:
    """Two-mode state after the beam splitter, loop port first."""
    if state.n_modes != 1:
        raise ValueError("gate input must be a single-mode state")
    d = state.cutoff
    ancilla = make_ancilla(step.ancilla, d, angle=math.radians(step.phi_deg - 90.0))
    ancilla = apply_loss(ancilla, 0, step.ancilla_eta)
    pair = tensor(state, ancilla) if step.variant == "loop_step" else tensor(ancilla, state)
    return apply_beamsplitter(pair, step.R)


def _conditional_blocks(pair: FockState, outcomes: np.ndarray, phi: float) -> np.ndarray:
    """Unnormalized loop-port states <m|rho|m> for each outcome m of x_phi on mode 1."""
    d = pair.cutoff
    v = quadrature_vectors(outcomes, phi, d)
    r4 = pair.data.reshape(d, d, d, d)
    return np.einsum("jk,akbl,jl->jab", v.conj(), r4, v, optimize=True)


def _feedforward(blocks: np.ndarray, outcomes: np.ndarray, step: GateStep) -> np.ndarray:
    """D(g m) block D(g m)^dag along x_phi, for each outcome."""
    d = blocks.shape[1]
    phi = math.radians(step.phi_deg)
    alphas = float(step.gain) * outcomes * np.exp(1j * phi) / math.sqrt(2)  # type: ignore[arg-type]
    ops = displacement_columns(alphas, d, d)
    return np.matmul(np.matmul(ops, blocks), np.conj(np.transpose(ops, (0, 2, 1))))


def _measured_window(pair: FockState, phi: float, span: float) -> Tuple[float, float]:
    measured = moments(pair, mode=1)
    center = math.cos(phi) * measured.mean[0] + math.sin(phi) * measured.mean[1]
    sigma = math.sqrt(measured.quadrature_variance(phi))
    return center - span * sigma, center + span * sigma


def _integrate(pair: FockState, step: GateStep, nodes: int, window: Tuple[float, float]) -> np.ndarray:
    lo, hi = window
    t, w = np.polynomial.legendre.leggauss(nodes)
    outcomes = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w
    phi = math.radians(step.phi_deg)
    shifted = _feedforward(_conditional_blocks(pair, outcomes, phi), outcomes, step)
    return np.einsum("j,jab->ab", weights, shifted)


def _trace_norm(diff: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def _homodyne_step(
    state: FockState,
    step: GateStep,
    tol: float,
    max_nodes: int,
    fail_tol: float = QUADRATURE_FAIL_TOL,
) -> FockState:
    pair = _arrange(state, step)
    window = _measured_window(pair, math.radians(step.phi_deg), QUADRATURE_SPAN_SIGMAS)
    nodes = QUADRATURE_START_NODES
    current = _integrate(pair, step, nodes, window)
    change = math.inf
    while nodes < max_nodes:
        nodes *= 2
        refined = _integrate(pair, step, nodes, window)
        change = _trace_norm(refined - current)
        current = refined
        if change < tol:
            break
    if change >= tol:
        if change > fail_tol:
            raise QuadratureConvergenceError(
                f"outcome integration changed by {change:.2e} at {nodes} nodes"
            )
        warnings.warn(
            ConvergenceWarning(f"outcome integration settled only to {change:.2e}"),
            stacklevel=3,
        )
    return FockState(state.dims, current).normalized()


def _channel_step(state: FockState, step: GateStep) -> FockState:
    """Single-mode equivalent: squeeze along x_theta, ancilla noise on x_theta, loss."""
    if state.n_modes != 1:
        raise ValueError("gate input must be a single-mode state")
    if not step.has_ideal_gain:
        raise ValueError("the channel method needs the ideal feedforward gain")
    theta = math.radians(step.phi_deg - 90.0)
    v_sq, _ = step.ancilla.variances()
    v_sq = step.ancilla_eta * v_sq + 0.5 * (1.0 - step.ancilla_eta)
    a_in, a_anc = frame_gains(step.R, step.variant, float(step.gain))  # type: ignore[arg-type]
    out = rotate(state, -theta)
    out = apply_unitary(out, squeeze_unitary(out.cutoff, -math.log(a_in[0])))
    out = apply_gaussian_noise(out, a_anc[0] ** 2 * v_sq)
    out = rotate(out, theta)
    return out.normalized()


def run_step_deterministic(
    state: FockState,
    step: GateStep,
    method: str = "homodyne",
    tol: float = QUADRATURE_TOL,
    max_nodes: int = QUADRATURE_MAX_NODES,
    threshold: float = CUTOFF_WARNING_THRESHOLD,
) -> FockState:
    """Measurement-averaged output of one step, loop loss included.

    method "homodyne" integrates the measured outcome over the explicit two-mode state;
    "channel" applies the equivalent single-mode channel (ideal gain only), which also
    accepts an infinitely squeezed ancilla.
    """
    if method == "homodyne":
        out = _homodyne_step(state, step, tol, max_nodes)
    elif method == "channel":
        out = _channel_step(state, step)
    else:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    out = apply_loss(out, 0, step.loop_eta)
    warn_if_truncated(out, threshold, "gate output")
    return out


def _trajectory_outcomes(
    pair: FockState, phi: float, n_traj: int, seed: int
) -> np.ndarray:
    xs, cdf = quadrature_cdf(partial_trace(pair, 1), phi)
    draws = np.array([np.random.default_rng([seed, k]).random() for k in range(n_traj)])
    return np.interp(draws, cdf, xs)


def run_step_montecarlo(
    state: FockState,
    step: GateStep,
    n_traj: int,
    seed: int,
    workers: int = 1,
    chunk: int = 256,
) -> FockState:
    """Average of n_traj sampled measurement records, each fed forward.

    Trajectory k draws its outcome from default_rng([seed, k]); chunks are summed in
    index order, so the result does not depend on workers.
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    pair = _arrange(state, step)
    phi = math.radians(step.phi_deg)
    outcomes = _trajectory_outcomes(pair, phi, n_traj, seed)

    def run_chunk(start: int) -> np.ndarray:
        m = outcomes[start : start + chunk]
        blocks = _conditional_blocks(pair, m, phi)
        norms = np.real(np.einsum("jaa->j", blocks))
        blocks = blocks / norms[:, None, None]
        return _feedforward(blocks, m, step).sum(axis=0)

    starts = list(range(0, n_traj, chunk))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            partial = list(executor.map(run_chunk, starts))
    else:
        partial = [run_chunk(s) for s in starts]
    total = partial[0]
    for block in partial[1:]:
        total = total + block
    out = FockState(state.dims, total / n_traj).normalized()
    return apply_loss(out, 0, step.loop_eta)


@dataclass(frozen=True, eq=False)
class ProgramResult:
    """Input, per-step outputs and the final output of a program run."""

    program: GateProgram
    input: FockState
    intermediates: Tuple[FockState, ...]

    @property
    def output(self) -> FockState:
        return self.intermediates[-1] if self.intermediates else self.input


def run_program(
    state: FockState,
    program: GateProgram,
    method: str = "homodyne",
    trajectories: int = 0,
    seed: int = 0,
    workers: int = 1,
    tol: float = QUADRATURE_TOL,
    max_nodes: int = QUADRATURE_MAX_NODES,
    threshold: float = CUTOFF_WARNING_THRESHOLD,
) -> ProgramResult:
    """Steps in sequence, each fed the previous output; trajectories > 0 samples records."""
    outputs: List[FockState] = []
    current = state
    for i, step in enumerate(program.steps):
        if trajectories > 0:
            current = run_step_montecarlo(current, step, trajectories, seed + i, workers)
        else:
            current = run_step_deterministic(current, step, method, tol, max_nodes, threshold)
        outputs.append(current)
    return ProgramResult(program, state, tuple(outputs))


def ideal_squeeze(
    state: FockState,
    r: float,
    quadrature: Optional[str] = None,
    threshold: float = CUTOFF_WARNING_THRESHOLD,
) -> FockState:
    """Exact S(r); r > 0 squeezes x, r < 0 squeezes p."""
    if quadrature is not None:
        if quadrature not in ("x", "p"):
            raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
        if r != 0 and (r > 0) != (quadrature == "x"):
            raise ValueError(f"r = {r} does not squeeze the {quadrature} quadrature")
    if r == 0:
        return state
    out = apply_unitary(state, squeeze_unitary(state.cutoff, float(r)))
    warn_if_truncated(out, threshold, f"ideal squeeze r={r:.4f}")
    return out


def realistic_model_predict(
    state: FockState,
    program: GateProgram,
    scenario: Optional[LossScenario] = None,
    method: str = "homodyne",
    **options: Any,
) -> ProgramResult:
    """Finite ancillae and losses of the scenario (default: the program's own).

    options go to run_program (trajectories, seed, workers, tolerances).
    """
    if scenario is not None:
        program = program.with_scenario(scenario)
    result = run_program(state, program, method, **options)
    if program.scenario.readout_eta < 1.0:
        final = apply_loss(result.output, 0, program.scenario.readout_eta)
        result = replace(result, intermediates=result.intermediates[:-1] + (final,))
    return result


def ideal_model_predict(state: FockState, program: GateProgram) -> FockState:
    """Exact squeezing by the program's total r."""
    return ideal_squeeze(state, program.total_r)


def fidelity_chain(result: ProgramResult) -> List[float]:
    """Fidelity of the output after each step with the ideal squeeze of the steps so far."""
    values = []
    total = 0.0
    for r, out in zip(result.program.r_values, result.intermediates):
        total += r
        values.append(fidelity(out, ideal_squeeze(result.input, total)))
    return values
