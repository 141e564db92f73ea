"""Reference oracle, wave-vs-oracle equivalence sweeps, and latency models.

The oracle is deliberately boring: the winner of a round is the competing
node holding the minimum priority rank, full stop.  Every sweep here runs the
wave simulation and demands it reproduce that answer (plus the full
competitor picture) without being told it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import chain, combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, UsageError
from .line import LineGeometry
from .protocol import (
    IDEAL,
    MODES,
    TRANSIENT,
    NodeConfig,
    RoundPlan,
    TokenSet,
    plan_for,
    run_round,
)
from .signals import Waveform, sliding_demodulate_iq

WAVE_PARALLEL = "wave_parallel"
SERIAL_DAISY = "serial_daisy"


def oracle_winner(
    competing: Iterable[int], priority: Sequence[int] | None = None
) -> int | None:
    """Minimum-rank competing node id; None when nobody competes.

    ``priority`` maps node id -> rank as a 1-based tuple; identity when
    omitted.
    """
    competing = set(competing)
    if not competing:
        return None
    if priority is None:
        return min(competing)
    return min(competing, key=lambda node_id: priority[node_id - 1])


@dataclass(frozen=True)
class LatencyModel:
    """Closed-form arbitration latency for one scheme.

    ``end_to_end_delay`` is the one-way propagation time across the whole
    line and ``window`` the decision window length, both in seconds;
    ``hop_delay`` is the per-node decision time of the serial daisy chain.
    """

    scheme: str
    end_to_end_delay: float
    window: float
    node_count: int
    hop_delay: float = 0.0

    def __post_init__(self) -> None:
        if self.scheme not in (WAVE_PARALLEL, SERIAL_DAISY):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if self.end_to_end_delay <= 0.0 or self.window <= 0.0:
            raise ConfigurationError("end_to_end_delay and window must be positive")
        if self.node_count < 1:
            raise ConfigurationError(f"node_count must be >= 1, got {self.node_count}")
        if self.scheme == SERIAL_DAISY and self.hop_delay <= 0.0:
            raise ConfigurationError("serial_daisy needs a positive hop_delay")


def arbitration_latency(model: LatencyModel) -> float:
    """Seconds from request to a settled decision everywhere.

    The wave scheme resolves all contenders in one shot: a round trip plus
    one decision window, independent of how many nodes compete.  The serial
    chain pays one hop decision per node plus the same round trip.
    """
    if model.scheme == WAVE_PARALLEL:
        return 2.0 * model.end_to_end_delay + model.window
    return model.node_count * model.hop_delay + 2.0 * model.end_to_end_delay


# ---------------------------------------------------------------------------
# Scenario builders


@dataclass(frozen=True)
class Scenario:
    """One complete wave-arbitration setup (geometry + tokens + timing)."""

    geometry: LineGeometry
    tokens: TokenSet
    plan: RoundPlan
    label: str = ""

    @property
    def k(self) -> int:
        return len(self.tokens.carriers)

    def nodes(self, competing: Iterable[int]) -> tuple[NodeConfig, ...]:
        competing = set(competing)
        return tuple(
            NodeConfig(index=i, tap_position=p, competing=(i in competing))
            for i, p in self.geometry.taps
        )


def _spread_taps(k: int, total_delay: int) -> tuple[int, ...]:
    taps = tuple(round((i + 1) * total_delay / (k + 1)) for i in range(k))
    if len(set(taps)) != k or taps[0] < 1:
        raise ConfigurationError(
            f"cannot spread {k} distinct taps over a line of {total_delay} ticks"
        )
    return taps


def default_scenario(
    k: int = 3,
    mode: str = IDEAL,
    *,
    cycle_counts: Sequence[int] | None = None,
    window_seconds: float = 2e-9,
    window_ticks: int | None = None,
    total_delay: int | None = None,
    tap_positions: Sequence[int] | None = None,
    left_reflection: float = 0.0,
    right_reflection: float = -0.1,
    amplitude: float = 1.0,
    detection_latency: int = 8,
    label: str = "",
) -> Scenario:
    """Evenly tapped line with integer-cycle carriers, sized for k nodes.

    Carrier i completes ``cycle_counts[i]`` cycles per window (defaults to
    2..k+1); the sample rate is window_ticks / window_seconds, and the default
    window_ticks keeps the rate at or above 8x the top carrier.
    """
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    counts = tuple(cycle_counts) if cycle_counts is not None else tuple(range(2, k + 2))
    if len(counts) != k:
        raise ConfigurationError(f"need {k} cycle counts, got {len(counts)}")
    n_window = window_ticks if window_ticks is not None else max(64, 8 * max(counts))
    fs = n_window / window_seconds
    delay = total_delay if total_delay is not None else 8 * (k + 1)
    taps = tuple(tap_positions) if tap_positions is not None else _spread_taps(k, delay)
    geometry = LineGeometry(
        total_delay=delay,
        taps=tuple((i + 1, p) for i, p in enumerate(taps)),
        left_reflection=left_reflection,
        right_reflection=right_reflection,
    )
    tokens = TokenSet.from_frequencies([c / window_seconds for c in counts], amplitude)
    plan = plan_for(geometry, fs, n_window, mode, detection_latency=detection_latency)
    return Scenario(geometry=geometry, tokens=tokens, plan=plan, label=label or f"default-k{k}")


def reference_scenario(mode: str = IDEAL) -> Scenario:
    """The 3-node flagship setup used across the test and demo surface.

    32-tick line tapped at 8/16/24, 2 ns window at 32 GS/s, and the canonical
    token assignment t1: 1 GHz, t2: 2 GHz, t3: 1.5 GHz (rank order is not
    frequency order on purpose).  The far end is slightly mismatched
    (gamma = -0.1) like an imperfectly terminated physical line.
    """
    return default_scenario(
        k=3,
        mode=mode,
        cycle_counts=(2, 4, 3),
        window_ticks=64,
        total_delay=32,
        tap_positions=(8, 16, 24),
        right_reflection=-0.1,
        label=f"reference-{mode}",
    )


def random_scenario(rng: np.random.Generator, k: int, mode: str = IDEAL) -> Scenario:
    """Randomized valid geometry/carrier family for equivalence sweeps.

    Terminations stay in |gamma| <= 0.2: the protocol's detection margins
    tolerate bounded reflection clutter, and a heavily mismatched line is a
    different design problem than the one modeled here.
    """
    if k < 1 or k > 12:
        raise UsageError(f"k must be in 1..12, got {k}")
    window_seconds = 2e-9
    counts = tuple(int(c) for c in rng.choice(np.arange(1, 13), size=k, replace=False))
    n_window = 8 * max(counts)
    total_delay = int(rng.integers(max(k + 1, 8), 49))
    taps = tuple(int(p) for p in np.sort(rng.choice(np.arange(1, total_delay + 1), size=k, replace=False)))
    geometry = LineGeometry(
        total_delay=total_delay,
        taps=tuple((i + 1, p) for i, p in enumerate(taps)),
        left_reflection=float(rng.uniform(-0.2, 0.2)),
        right_reflection=float(rng.uniform(-0.2, 0.2)),
    )
    tokens = TokenSet.from_frequencies(
        [c / window_seconds for c in counts], float(rng.uniform(0.5, 2.0))
    )
    plan = plan_for(
        geometry,
        n_window / window_seconds,
        n_window,
        mode,
        detection_latency=int(rng.integers(0, 17)),
    )
    return Scenario(geometry=geometry, tokens=tokens, plan=plan, label=f"random-k{k}")


# ---------------------------------------------------------------------------
# Equivalence sweeps


@dataclass
class SweepReport:
    trials: int = 0
    checks: int = 0
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        state = "ok" if self.ok else f"{len(self.mismatches)} mismatches"
        return f"{self.trials} trials, {self.checks} checks: {state}"


def _check_round(scenario: Scenario, competing: frozenset[int], mode: str, report: SweepReport,
                 phase_offset: float) -> None:
    nodes = scenario.nodes(competing)
    outcome = run_round(
        scenario.geometry,
        scenario.tokens,
        nodes,
        scenario.plan,
        cancellation_phase_offset=phase_offset,
    )
    report.trials += 1
    truth = frozenset(competing)
    oracle = oracle_winner(truth)
    expect_won = frozenset({oracle}) if oracle is not None else frozenset()
    where = f"{scenario.label} mode={mode} competing={sorted(truth)}"

    def check(ok: bool, msg: str) -> None:
        report.checks += 1
        if not ok:
            report.mismatches.append(f"{where}: {msg}")

    check(outcome.won_indices == expect_won,
          f"won set {sorted(outcome.won_indices)} != oracle {sorted(expect_won)}")
    check(outcome.winner == oracle, f"winner {outcome.winner} != oracle {oracle}")
    check(outcome.home_inferred == truth,
          f"home inferred {sorted(outcome.home_inferred)} != truth {sorted(truth)}")
    for v in outcome.verdicts:
        check(v.inferred_competitors == truth,
              f"node {v.index} inferred {sorted(v.inferred_competitors)} != truth {sorted(truth)}")


def all_subsets(k: int) -> list[frozenset[int]]:
    ids = range(1, k + 1)
    return [frozenset(s) for s in chain.from_iterable(combinations(ids, n) for n in range(k + 1))]


def equivalence_sweep(
    k: int = 3,
    *,
    modes: Sequence[str] = MODES,
    trials: int | None = None,
    seed: int = 0,
    corrupt_cancellation: bool = False,
    scenario: Scenario | None = None,
) -> SweepReport:
    """Compare the wave protocol against the rank oracle.

    With ``trials=None`` (k <= 4 only) every competing subset of the given or
    default scenario is run exhaustively in each mode.  With ``trials=N``
    each trial draws a fresh random geometry at a random size in 1..k, a
    random competing subset, and runs every mode.  ``corrupt_cancellation``
    flips the capture wave to constructive phase, which must make the sweep
    fail (negative control).
    """
    for m in modes:
        if m not in MODES:
            raise UsageError(f"unknown mode {m!r}")
    offset = 0.0 if corrupt_cancellation else math.pi
    report = SweepReport()
    if trials is None:
        if k > 4:
            raise UsageError("exhaustive sweeps are limited to k <= 4; pass trials=N instead")
        for mode in modes:
            scn = scenario
            if scn is None:
                scn = reference_scenario(mode) if k == 3 else default_scenario(k, mode)
            elif scn.plan.mode != mode:
                scn = Scenario(scn.geometry, scn.tokens,
                               plan_for(scn.geometry, scn.plan.sample_rate, scn.plan.window_ticks,
                                        mode, detection_latency=scn.plan.detection_latency),
                               scn.label)
            for subset in all_subsets(k):
                _check_round(scn, subset, mode, report, offset)
        return report

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        kk = int(rng.integers(1, k + 1))
        subset = frozenset(i for i in range(1, kk + 1) if rng.random() < 0.5)
        for mode in modes:
            scn = random_scenario(rng, kk, mode)
            _check_round(scn, subset, mode, report, offset)
    return report


# ---------------------------------------------------------------------------
# Settle measurement


def measure_settle(
    geometry: LineGeometry,
    tokens: TokenSet,
    nodes: Sequence[NodeConfig],
    plan: RoundPlan,
) -> float:
    """Seconds until the earliest decision window with oracle-consistent verdicts.

    Runs the round once, then slides the decision window from tick 0 forward
    and returns (start + window) / sample_rate for the first start at which
    the won set, the home-inferred set, and every node's inferred set all
    match the oracle truth.
    """
    _, trace = run_round(geometry, tokens, nodes, plan, return_trace=True)
    fs = plan.sample_rate
    window = plan.window_ticks
    amp = tokens.token_amplitude
    thr = plan.detection_threshold
    k = len(tokens.carriers)
    nodes = tuple(sorted(nodes, key=lambda nd: nd.index))
    truth = frozenset(nd.index for nd in nodes if nd.competing)
    oracle = oracle_winner(truth)
    expect_won = {oracle} if oracle is not None else set()

    det_f = {}
    det_b = {}
    for col, tap_id in enumerate(trace.tap_ids):
        for ci, c in enumerate(tokens.carriers):
            af, _ = sliding_demodulate_iq(Waveform(fs, trace.forward[:, col]), c.frequency, window)
            ab, _ = sliding_demodulate_iq(Waveform(fs, trace.backward[:, col]), c.frequency, window)
            det_f[tap_id, ci] = af >= thr * amp
            det_b[tap_id, ci] = ab >= thr * amp

    for start in range(plan.decision_start + 1):
        won = set()
        consistent = True
        for nd in nodes:
            flags = [det_f[nd.index, ci][start] for ci in range(k)]
            if nd.competing and all(flags[: nd.index]):
                won.add(nd.index)
            inferred = {
                j
                for j in range(1, k + 1)
                if (j < nd.index and not flags[j - 1])
                or (j > nd.index and det_b[nd.index, j - 1][start])
            }
            if nd.competing:
                inferred.add(nd.index)
            if inferred != truth:
                consistent = False
                break
        if not consistent or won != expect_won:
            continue
        home = {i for i in range(1, k + 1) if det_b[0, i - 1][start]}
        if home == truth:
            return (start + window) / fs
    raise ConfigurationError(
        "no decision window start up to the planned one was oracle-consistent"
    )


# ---------------------------------------------------------------------------
# Self-test checks (shared by the CLI selftest subcommand)


def selftest_checks() -> list[tuple[str, Callable[[], None]]]:
    """Named property checks over signals, line, and the equivalence sweep."""
    from . import selfcheck

    return selfcheck.all_checks()
