"""Wave-interference bus arbitration on a simulated transmission line.

Priority tokens are broadcast as orthogonal carriers on a shared 1-D line;
nodes claim the bus by destructively cancelling their token in place, and
every party reconstructs the full competitor set from what survives in each
direction.  The package layers as:

- ``signals``: carriers, synthesis, I/Q demodulation, detection
- ``line``: bidirectional delay-line medium with terminations
- ``protocol``: token sets, capture waves, arbitration rounds
- ``stats``: priority permutations, scheduling policies, fairness metrics
- ``harness``: oracle, equivalence sweeps, latency models, settle measurement
- ``config``/``cli``: scenario files and the ``wavebus`` command
"""

from .config import RoundsSpec, ScenarioConfig, bundled_config_names, load_config
from .errors import ConfigurationError, UsageError, WavebusError
from .harness import (
    SERIAL_DAISY,
    WAVE_PARALLEL,
    LatencyModel,
    Scenario,
    SweepReport,
    all_subsets,
    arbitration_latency,
    default_scenario,
    equivalence_sweep,
    measure_settle,
    oracle_winner,
    random_scenario,
    reference_scenario,
    selftest_checks,
)
from .line import BACKWARD, FORWARD, LineGeometry, LineState, build_line
from .protocol import (
    IDEAL,
    MODES,
    TRANSIENT,
    NodeConfig,
    NodeVerdict,
    RoundOutcome,
    RoundPlan,
    RoundTrace,
    TokenSet,
    cancellation_waveform,
    expected_backward_phase,
    infer_competitors_home,
    infer_competitors_node,
    minimum_warmup,
    plan_for,
    run_round,
    run_serial_round,
)
from .signals import (
    DEFAULT_DETECTION_THRESHOLD,
    Carrier,
    DemodResult,
    Waveform,
    circular_difference,
    cosine_wave,
    demodulate_iq,
    detect_token,
    sliding_demodulate_iq,
    superpose,
    synthesize,
    validate_carrier_set,
)
from .stats import (
    POLICIES,
    ArbitrationHistory,
    ArbitrationRecord,
    FairnessReport,
    identity_permutation,
    invert_permutation,
    jain_index,
)

__version__ = "0.1.0"

__all__ = [
    "ArbitrationHistory",
    "ArbitrationRecord",
    "BACKWARD",
    "Carrier",
    "ConfigurationError",
    "DEFAULT_DETECTION_THRESHOLD",
    "DemodResult",
    "FORWARD",
    "FairnessReport",
    "IDEAL",
    "LatencyModel",
    "LineGeometry",
    "LineState",
    "MODES",
    "NodeConfig",
    "NodeVerdict",
    "POLICIES",
    "RoundOutcome",
    "RoundPlan",
    "RoundTrace",
    "RoundsSpec",
    "SERIAL_DAISY",
    "Scenario",
    "ScenarioConfig",
    "SweepReport",
    "TRANSIENT",
    "TokenSet",
    "UsageError",
    "WAVE_PARALLEL",
    "Waveform",
    "WavebusError",
    "all_subsets",
    "arbitration_latency",
    "build_line",
    "bundled_config_names",
    "cancellation_waveform",
    "circular_difference",
    "cosine_wave",
    "default_scenario",
    "demodulate_iq",
    "detect_token",
    "equivalence_sweep",
    "expected_backward_phase",
    "identity_permutation",
    "infer_competitors_home",
    "infer_competitors_node",
    "invert_permutation",
    "jain_index",
    "load_config",
    "measure_settle",
    "minimum_warmup",
    "oracle_winner",
    "plan_for",
    "random_scenario",
    "reference_scenario",
    "run_round",
    "run_serial_round",
    "selftest_checks",
    "sliding_demodulate_iq",
    "superpose",
    "synthesize",
    "validate_carrier_set",
]
