"""Control timeline of the loop processor and its timing budget.

Time bin 0 throws the first ancilla into the loop through a transparent VBS, bin 1
brings the input, bins 2..n bring the remaining ancillae and bin n+1 opens the VBS
again so the output leaves for characterization. One VBS, one switch and one
homodyne detector serve any number of steps.
"""

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from loop_squeezer.constants import (
    COMPONENT_RESPONSE_NS,
    HARDWARE_COMPONENTS,
    OSCILLATION_NS,
    PULSE_LENGTH_NS,
    RISE_FALL_NS,
    ROUND_TRIP_NS,
)
from loop_squeezer.errors import ScheduleError
from loop_squeezer.fs import write_csv
from loop_squeezer.gates import GateProgram, LossScenario

SWITCH_STATES = ("to_loop", "to_dump")
PULSES = ("ancilla", "cat", "vacuum", "none")
INPUT_PULSES = ("cat", "vacuum")

CSV_HEADERS = [
    "bin",
    "time_ns",
    "vbs_reflectivity",
    "switch",
    "pulse",
    "hd_basis_deg",
    "feedforward_gain",
    "settle_ns",
]


@dataclass(frozen=True)
class ScheduleEntry:
    bin: int
    time_ns: float
    vbs_reflectivity: float
    switch: str
    pulse: str
    hd_basis_deg: Optional[float] = None
    feedforward_gain: Optional[float] = None
    # rise/fall plus ringing after a VBS change; zero when the setting is held
    settle_ns: float = 0.0

    def row(self) -> Tuple[Any, ...]:
        return tuple("" if v is None else v for v in asdict(self).values())


@dataclass(frozen=True)
class ControlSchedule:
    entries: Tuple[ScheduleEntry, ...]
    tau_ns: float = ROUND_TRIP_NS
    label: str = ""
    hardware: Tuple[str, ...] = HARDWARE_COMPONENTS

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) < 3:
            raise ScheduleError("a schedule needs the load, at least one step and the release bin")
        if entries[0].vbs_reflectivity != 0.0 or entries[-1].vbs_reflectivity != 0.0:
            raise ScheduleError("the VBS must be transparent in the first and last bins")
        for i, entry in enumerate(entries):
            if entry.bin != i or abs(entry.time_ns - i * self.tau_ns) > 1e-6:
                raise ScheduleError(f"bin {i} is off the {self.tau_ns} ns grid")
            if entry.switch not in SWITCH_STATES or entry.pulse not in PULSES:
                raise ScheduleError(f"bin {i}: unknown switch state or pulse")

    @property
    def n_bins(self) -> int:
        return len(self.entries)

    @property
    def n_steps(self) -> int:
        return len(self.entries) - 2

    @property
    def vbs_sequence(self) -> List[float]:
        return [e.vbs_reflectivity for e in self.entries]

    def to_json(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "tau_ns": self.tau_ns,
            "hardware": list(self.hardware),
            "entries": [asdict(e) for e in self.entries],
        }

    @classmethod
    def from_json(cls, payload: Dict[str, Any]) -> "ControlSchedule":
        entries = tuple(ScheduleEntry(**e) for e in payload["entries"])
        return cls(
            entries,
            float(payload.get("tau_ns", ROUND_TRIP_NS)),
            payload.get("label", ""),
            tuple(payload.get("hardware", HARDWARE_COMPONENTS)),
        )

    def to_csv(self, path: Path) -> None:
        write_csv(path, CSV_HEADERS, [e.row() for e in self.entries])


def compile_schedule(
    program: GateProgram,
    tau_ns: float = ROUND_TRIP_NS,
    characterization_deg: Optional[float] = None,
    input_kind: str = "cat",
) -> ControlSchedule:
    """Serialize a program into per-bin VBS, switch and homodyne settings.

    Bin 1 is labelled with input_kind. The release bin measures the output along
    characterization_deg, by default the quadrature the program squeezes.
    """
    if len(program) == 0:
        raise ScheduleError("cannot compile an empty program")
    if tau_ns <= 0:
        raise ScheduleError(f"round-trip time must be positive, got {tau_ns}")
    if input_kind not in INPUT_PULSES:
        raise ScheduleError(f"input must be one of {', '.join(INPUT_PULSES)}, got {input_kind!r}")
    if characterization_deg is None:
        characterization_deg = program.steps[-1].phi_deg
    settings: List[Tuple[float, str, str, Optional[float], Optional[float]]] = [
        (0.0, "to_loop", "ancilla", None, None)
    ]
    for i, step in enumerate(program.steps, start=1):
        pulse = input_kind if i == 1 else "ancilla"
        settings.append((step.R, "to_loop", pulse, step.phi_deg, float(step.gain)))  # type: ignore[arg-type]
    settings.append((0.0, "to_dump", "none", characterization_deg, None))

    entries = []
    previous = 0.0
    for b, (R, switch, pulse, basis, gain) in enumerate(settings):
        settle = RISE_FALL_NS + OSCILLATION_NS if b > 0 and R != previous else 0.0
        entries.append(ScheduleEntry(b, b * tau_ns, R, switch, pulse, basis, gain, settle))
        previous = R
    return ControlSchedule(tuple(entries), tau_ns, program.label)


def program_from_schedule(schedule: ControlSchedule, scenario: Optional[LossScenario] = None) -> GateProgram:
    """Program whose steps are the measured bins of the schedule."""
    steps = []
    for i, entry in enumerate(schedule.entries[1:-1]):
        steps.append(
            {
                "R": entry.vbs_reflectivity,
                "phi_deg": entry.hd_basis_deg,
                "g": entry.feedforward_gain,
                "variant": "first_step" if i == 0 else "loop_step",
            }
        )
    return GateProgram.from_explicit_steps(steps, scenario, schedule.label)


@dataclass(frozen=True)
class TimingBudget:
    pulse_length_ns: float = PULSE_LENGTH_NS
    component_response_ns: float = COMPONENT_RESPONSE_NS
    tau_ns: float = ROUND_TRIP_NS

    def __post_init__(self) -> None:
        for key, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"{key} must be positive, got {value}")

    @property
    def clock_mhz(self) -> float:
        return 1e3 / self.tau_ns

    @classmethod
    def from_components(
        cls,
        pulse_length_ns: float = PULSE_LENGTH_NS,
        rise_fall_ns: float = RISE_FALL_NS,
        oscillation_ns: float = OSCILLATION_NS,
        jitter_ns: float = 0.0,
        tau_ns: float = ROUND_TRIP_NS,
    ) -> "TimingBudget":
        return cls(pulse_length_ns, rise_fall_ns + oscillation_ns + jitter_ns, tau_ns)


@dataclass(frozen=True)
class TimingReport:
    feasible: bool
    clock_mhz: float
    max_clock_mhz: float
    required_ns: float
    deficit_ns: float

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)

    def describe(self) -> str:
        if self.feasible:
            return f"feasible at {self.clock_mhz:.4g} MHz (up to {self.max_clock_mhz:.4g} MHz)"
        return f"infeasible: round trip is {self.deficit_ns:.4g} ns shorter than pulse plus response"


def check_timing(budget: TimingBudget) -> TimingReport:
    """A bin must hold one pulse plus the settling of the dynamical components."""
    required = budget.pulse_length_ns + budget.component_response_ns
    return TimingReport(
        feasible=budget.tau_ns >= required,
        clock_mhz=budget.clock_mhz,
        max_clock_mhz=1e3 / required,
        required_ns=required,
        deficit_ns=max(0.0, required - budget.tau_ns),
    )
