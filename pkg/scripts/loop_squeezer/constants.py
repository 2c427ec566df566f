"""Constants for loop-squeezer."""

VERSION = "0.4.0"

# Quadrature convention: hbar = 1, vacuum variance 1/2
HBAR = 1.0
VACUUM_VARIANCE = 0.5

# Fock truncation
DEFAULT_CUTOFF = 25
DEFAULT_CUTOFF_MULTI_STEP = 30
CUTOFF_WARNING_THRESHOLD = 1e-4

# State validity tolerances
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9

# Measurement-outcome integration
QUADRATURE_START_NODES = 32
QUADRATURE_MAX_NODES = 512
QUADRATURE_TOL = 1e-6
QUADRATURE_FAIL_TOL = 1e-4
QUADRATURE_SPAN_SIGMAS = 6.0

# Loop processor
LOOP_ETA = 0.96
FIRST_PASS_LOSS = 0.04
ROUND_TRIP_NS = 60.8
PULSE_LENGTH_NS = 20.0
RISE_FALL_NS = 10.0
OSCILLATION_NS = 20.0
COMPONENT_RESPONSE_NS = 30.0
HARDWARE_COMPONENTS = ("VBS", "switch", "HD")

# Heralded cat source
HERALD_MIN_PROBABILITY = 1e-12
DEFAULT_CAT = {
    "source_squeezing_r": 0.4,
    "tap_reflectivity": 0.35,
    "preparation_loss": 0.30,
    "detector": "on_off",
}
# Source assumed by the iteration-count projections: weak tap, ideal subtraction
SCALABILITY_CAT = {
    "source_squeezing_r": 0.3,
    "tap_reflectivity": 0.05,
    "preparation_loss": 0.13,
    "detector": "projector",
}

# Temporal mode (cavity half widths in MHz, multiplied by 2*pi for rad/s)
GAMMA1_MHZ = 29.8
GAMMA2_MHZ = 95.6
MODE_DT_NS = 0.5
MODE_WINDOW_NS = 400.0
MODE_GAMMA_BOUNDS_MHZ = (5.0, 300.0)

# Tomography
TOMOGRAPHY_PHASES_DEG = [90.0 - 15.0 * k for k in range(12)]
SAMPLES_PER_PHASE = 3000
FIVE_FOLD_SUBSETS = 5
MLE_CUTOFF = 20
MLE_BINS = 120
MLE_SPAN_SIGMAS = 6.0
MLE_MAX_ITERS = 2000
MLE_TOL = 1e-9
MLE_DILUTION = 0.5

# Report serialization
METRIC_DIGITS = 4
FLOAT_DIGITS = 6
METRIC_KEYS = {
    "fidelity",
    "fidelity_ideal_theory",
    "fidelity_chain",
    "negativity",
    "negativity_in",
    "w00",
    "w00_mean",
    "w00_se",
    "fidelity_mean",
    "fidelity_se",
}

THREADS_ENV = "LOOP_SQUEEZER_THREADS"

# Ancilla levels and losses quoted for the current system
ANCILLA_X = {"pure_squeezing_db": -6.8, "preparation_loss": 0.22}
ANCILLA_P = {"pure_squeezing_db": -7.0, "preparation_loss": 0.27}

# Named loss scenarios. pure_squeezing_db None means an infinitely squeezed ancilla.
SCENARIO_PRESETS = {
    "current": {
        "loop_eta": 0.96,
        "ancilla_first_pass_loss": 0.04,
        "cat_preparation_loss": 0.30,
        "ancilla_x": ANCILLA_X,
        "ancilla_p": ANCILLA_P,
    },
    "improved_half": {
        "loop_eta": 0.98,
        "ancilla_first_pass_loss": 0.02,
        "cat_preparation_loss": 0.30,
        "ancilla_x": {"pure_squeezing_db": -7.0, "preparation_loss": 0.0},
        "ancilla_p": {"pure_squeezing_db": -7.0, "preparation_loss": 0.0},
    },
    "quarter_loss": {
        "loop_eta": 0.99,
        "ancilla_first_pass_loss": 0.01,
        "cat_preparation_loss": 0.30,
        "ancilla_x": {"pure_squeezing_db": -15.0, "preparation_loss": 0.0},
        "ancilla_p": {"pure_squeezing_db": -15.0, "preparation_loss": 0.0},
    },
    "best_recorded": {
        "loop_eta": 0.99,
        "ancilla_first_pass_loss": 0.01,
        "cat_preparation_loss": 0.13,
        "ancilla_x": {"pure_squeezing_db": -15.0, "preparation_loss": 0.0},
        "ancilla_p": {"pure_squeezing_db": -15.0, "preparation_loss": 0.0},
    },
    "ideal": {
        "loop_eta": 1.0,
        "ancilla_first_pass_loss": 0.0,
        "cat_preparation_loss": 0.30,
        "ancilla_x": {"pure_squeezing_db": None, "preparation_loss": 0.0},
        "ancilla_p": {"pure_squeezing_db": None, "preparation_loss": 0.0},
    },
}

# Published working conditions (two-decimal R and g)
TABLE_I_PROGRAMS = [
    {"label": "x r=0.26", "target_r": [0.26], "steps": [{"R": 0.40, "phi_deg": 90.0, "g": -0.82}]},
    {"label": "x r=0.46", "target_r": [0.46], "steps": [{"R": 0.60, "phi_deg": 90.0, "g": -1.22}]},
    {"label": "p r=-0.26", "target_r": [-0.26], "steps": [{"R": 0.40, "phi_deg": 0.0, "g": -0.82}]},
    {"label": "p r=-0.46", "target_r": [-0.46], "steps": [{"R": 0.60, "phi_deg": 0.0, "g": -1.22}]},
]

TABLE_II_X_STEPS = [
    {"R": 0.48, "phi_deg": 90.0, "g": -0.96},
    {"R": 0.75, "phi_deg": 90.0, "g": 0.58},
    {"R": 0.48, "phi_deg": 90.0, "g": 1.04},
]
TABLE_II_P_STEPS = [dict(step, phi_deg=0.0) for step in TABLE_II_X_STEPS]
TABLE_II_R = [0.33, 0.14, 0.37]

# Default experiment configuration
DEFAULT_CONFIG = {
    "name": "experiment",
    "experiment": "programs",
    "engine": "fock",
    "fock_method": "homodyne",
    "cutoff": DEFAULT_CUTOFF,
    "input": {"kind": "vacuum", "cat": dict(DEFAULT_CAT)},
    "scenario": "current",
    "programs": [],
    "tomography": {
        "enabled": False,
        "phases_deg": list(TOMOGRAPHY_PHASES_DEG),
        "samples_per_phase": SAMPLES_PER_PHASE,
        "seed": 20240517,
        "subsets": FIVE_FOLD_SUBSETS,
        "cutoff": MLE_CUTOFF,
        "max_iters": MLE_MAX_ITERS,
        "tol": MLE_TOL,
        "bins": MLE_BINS,
        "diluted": True,
    },
    "wigner_grid": {"extent": 4.0, "points": 81},
    "outputs": {
        "wigner_csv": True,
        "dataset_csv": True,
        "schedule_csv": True,
        "states_json": False,
    },
    "negativity_curves": {
        "scenarios": ["current", "ideal", "improved_half", "quarter_loss"],
        "max_steps": 6,
        "r": [0.33, 0.14, 0.37],
    },
    "scalability": {
        "r_values": [0.1, 0.2, 0.3, 0.4],
        "scenario": "best_recorded",
        "max_steps": 60,
        "cat": dict(SCALABILITY_CAT),
    },
    "timing": {
        "tau_ns": ROUND_TRIP_NS,
        "pulse_length_ns": PULSE_LENGTH_NS,
        "component_response_ns": COMPONENT_RESPONSE_NS,
    },
    "temporal": {
        "gamma1_mhz": GAMMA1_MHZ,
        "gamma2_mhz": GAMMA2_MHZ,
        "t0_ns": 300.0,
        "variance": 1.2,
        "windows": 20000,
        "duration_ns": MODE_WINDOW_NS,
        "dt_ns": MODE_DT_NS,
        "seed": 7,
        "initial_guess": {"gamma1_mhz": 25.0, "gamma2_mhz": 85.0, "t0_ns": 302.0},
    },
    "runtime": {"parallel": True, "parallel_workers": 4},
    "numerics": {
        "cutoff_warning_threshold": CUTOFF_WARNING_THRESHOLD,
        "quadrature_tol": QUADRATURE_TOL,
        "quadrature_max_nodes": QUADRATURE_MAX_NODES,
        "monte_carlo_trajectories": 0,
    },
}
