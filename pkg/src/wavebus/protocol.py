"""Token broadcast, destructive capture, and competitor inference.

Arbitration works by wave interference on the shared line:

* The home node (position 0) launches all token carriers simultaneously into
  the forward direction at tick 0 with launch phase 0.  Token ``t_i`` rides
  carrier ``i`` and reaches a tap at position ``p`` after exactly ``p`` ticks,
  with phase lag ``theta = 2*pi*f_i*p/sample_rate``.
* A competing node of priority rank ``i`` captures token ``t_i`` by emitting,
  into both travel directions, the exact negative of that token as it appears
  at its own tap (same amplitude, phase shifted by pi).  Downstream the
  emission and the token superpose to zero, so lower-priority nodes never see
  ``t_i``; the backward half of the emission travels toward home and announces
  the capture with phase ``2*theta_i + pi``.
* Node ``i`` wins the round iff it is competing and observes every token
  ``t_1 .. t_i`` on its incoming forward wave during the decision window.  Its
  own token counts: observation happens before the same tick's injections, so
  a destructive read still sees the token it is removing.
* Competitor inference is direction-split: a missing forward token ``t_j``
  (j < i) reveals an upstream competitor; backward energy at carrier ``j``
  (j > i) reveals a downstream one.

Two fidelity modes share the same wave dynamics.  In ``ideal`` mode each
capturing node starts its emission on the very tick its token first reaches
the tap, so downstream taps never carry a cancelled token at all.  In
``transient`` mode a node has no prior timing knowledge: it correlates a
sliding window (one full window of history is required before the detector is
live) and starts emitting ``detection_latency`` ticks after its own token
first crosses the detection threshold, which reproduces the brief overshoot
and quench seen on a real line.

Rank order must match tap order (rank 1 nearest home); re-prioritizing
between rounds is done by re-assigning nodes to ranks, never by moving
carriers (see the statistics module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, UsageError
from .line import BACKWARD, FORWARD, LineGeometry, build_line
from .signals import (
    TWO_PI,
    Carrier,
    DemodResult,
    Waveform,
    circular_difference,
    cosine_wave,
    demodulate_iq,
    detect_token,
    validate_carrier_set,
)

IDEAL = "ideal"
TRANSIENT = "transient"
MODES = (IDEAL, TRANSIENT)


@dataclass(frozen=True)
class NodeConfig:
    """One arbitrating node: priority rank, tap position, cancel capability."""

    index: int
    tap_position: int
    competing: bool = False
    carrier_index: int = 0  # defaults to index: node i may cancel token t_i

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ConfigurationError(f"node index must be >= 1, got {self.index}")
        if self.tap_position < 0:
            raise ConfigurationError(f"tap position must be >= 0, got {self.tap_position}")
        if self.carrier_index == 0:
            object.__setattr__(self, "carrier_index", self.index)
        if self.carrier_index < 1:
            raise ConfigurationError(f"carrier index must be >= 1, got {self.carrier_index}")


@dataclass(frozen=True)
class TokenSet:
    """The k arbitration tokens: carrier i (1-based) carries token t_i.

    All tokens share one amplitude and launch with phase 0; every other phase
    in the scheme is derived from propagation delay.
    """

    carriers: tuple[Carrier, ...]
    token_amplitude: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "carriers", tuple(self.carriers))
        if not self.carriers:
            raise ConfigurationError("token set needs at least one carrier")
        if not self.token_amplitude > 0.0:
            raise ConfigurationError(f"token amplitude must be positive, got {self.token_amplitude}")
        for i, c in enumerate(self.carriers, start=1):
            if c.amplitude != self.token_amplitude:
                raise ConfigurationError(
                    f"carrier {i} amplitude {c.amplitude} differs from token amplitude "
                    f"{self.token_amplitude}"
                )
            if c.phase != 0.0:
                raise ConfigurationError(
                    f"carrier {i} launch phase must be 0, got {c.phase}"
                )

    @classmethod
    def from_frequencies(cls, frequencies: Sequence[float], amplitude: float = 1.0) -> "TokenSet":
        return cls(
            carriers=tuple(Carrier(f, 0.0, amplitude) for f in frequencies),
            token_amplitude=amplitude,
        )


@dataclass(frozen=True)
class RoundPlan:
    """Timing discipline for one arbitration round (all times in ticks)."""

    mode: str
    sample_rate: float
    warmup_ticks: int
    decision_start: int
    window_ticks: int
    detection_latency: int = 0
    detection_threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.sample_rate > 0.0:
            raise ConfigurationError(f"sample rate must be positive, got {self.sample_rate}")
        if self.window_ticks < 1:
            raise ConfigurationError(f"window_ticks must be >= 1, got {self.window_ticks}")
        if self.warmup_ticks < 0 or self.detection_latency < 0:
            raise ConfigurationError("warmup_ticks and detection_latency must be >= 0")
        if self.decision_start < self.warmup_ticks:
            raise ConfigurationError(
                f"decision window start {self.decision_start} precedes warmup end "
                f"{self.warmup_ticks}"
            )
        if not 0.0 < self.detection_threshold < 1.0:
            raise ConfigurationError(
                f"detection threshold must lie in (0, 1), got {self.detection_threshold}"
            )

    @property
    def total_ticks(self) -> int:
        return self.decision_start + self.window_ticks


def minimum_warmup(geometry: LineGeometry, plan_mode: str, detection_latency: int, window_ticks: int) -> int:
    """Smallest warmup that guarantees a settled decision window.

    Ideal mode needs one full round trip (2 * total delay).  Transient mode
    additionally waits out the detector (one window) and the reaction latency,
    which bounds the latest possible cancellation onset.
    """
    base = 2 * geometry.total_delay
    if plan_mode == TRANSIENT:
        base += detection_latency + window_ticks
    return base


def plan_for(
    geometry: LineGeometry,
    sample_rate: float,
    window_ticks: int,
    mode: str,
    *,
    detection_latency: int = 8,
    detection_threshold: float = 0.5,
    warmup_ticks: int | None = None,
    decision_start: int | None = None,
) -> RoundPlan:
    """Build a RoundPlan with the tightest valid timing unless overridden."""
    if mode not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}, got {mode!r}")
    need = minimum_warmup(geometry, mode, detection_latency, window_ticks)
    warmup = need if warmup_ticks is None else warmup_ticks
    if warmup < need:
        raise ConfigurationError(
            f"warmup of {warmup} ticks is below the required minimum of {need} "
            f"for this geometry in {mode} mode"
        )
    start = warmup if decision_start is None else decision_start
    return RoundPlan(
        mode=mode,
        sample_rate=sample_rate,
        warmup_ticks=warmup,
        decision_start=start,
        window_ticks=window_ticks,
        detection_latency=detection_latency,
        detection_threshold=detection_threshold,
    )


@dataclass(frozen=True)
class NodeVerdict:
    """What one node concluded from its decision-window demodulations."""

    index: int
    competing: bool
    won: bool
    tokens_detected: tuple[bool, ...]
    inferred_competitors: frozenset[int]


@dataclass(frozen=True)
class RoundOutcome:
    """Result of one arbitration round."""

    winner: int | None
    verdicts: tuple[NodeVerdict, ...]
    home_inferred: frozenset[int]
    home_phase_consistent: Mapping[int, bool]
    truth_competing: frozenset[int]
    mode: str

    @property
    def won_indices(self) -> frozenset[int]:
        return frozenset(v.index for v in self.verdicts if v.won)

    def to_record(self) -> dict:
        """JSON-ready summary (priority-rank space)."""
        return {
            "mode": self.mode,
            "winner_rank": self.winner,
            "truth_competing_ranks": sorted(self.truth_competing),
            "home_inferred_ranks": sorted(self.home_inferred),
            "home_phase_consistent": {str(i): bool(v) for i, v in sorted(self.home_phase_consistent.items())},
            "verdicts": [
                {
                    "rank": v.index,
                    "competing": v.competing,
                    "won": v.won,
                    "tokens_detected": list(v.tokens_detected),
                    "inferred_competitor_ranks": sorted(v.inferred_competitors),
                }
                for v in self.verdicts
            ],
        }


@dataclass(frozen=True)
class RoundTrace:
    """Per-tick pre-injection observations at every tap, plus emission onsets."""

    sample_rate: float
    tap_ids: tuple[int, ...]
    tap_positions: tuple[int, ...]
    forward: np.ndarray  # shape (ticks, taps)
    backward: np.ndarray
    onsets: Mapping[int, int | None]

    def column(self, tap_id: int) -> int:
        return self.tap_ids.index(tap_id)


def _emission_wave(
    carrier: Carrier,
    tap_position: int,
    num_ticks: int,
    sample_rate: float,
    phase_offset: float,
) -> np.ndarray:
    """Per-tick emission that a node at ``tap_position`` plays against ``carrier``.

    The nominal offset pi makes the emission the exact negative of the token
    as it crosses the tap; it is computed by negating the very same samples
    the token is made of, so a lone token cancels bit-exactly.  Any other
    offset (a fault-injection handle for negative controls) falls back to the
    general phase-shifted form.
    """
    ticks = np.arange(num_ticks) - tap_position
    if phase_offset == math.pi:
        return -cosine_wave(carrier.frequency, carrier.phase, carrier.amplitude, ticks, sample_rate)
    return cosine_wave(
        carrier.frequency, carrier.phase + phase_offset, carrier.amplitude, ticks, sample_rate
    )


def cancellation_waveform(
    node: NodeConfig,
    token_index: int,
    carrier: Carrier,
    sample_rate: float,
    num_ticks: int,
    phase_offset: float = math.pi,
) -> np.ndarray:
    """Injection schedule (one value per tick, fed to both directions) for a capture.

    Valid from the token's arrival tick onward; entry ``t`` assumes the token
    was launched from home at tick 0.  Raises UsageError when the node is not
    entitled to cancel ``token_index``.
    """
    if token_index != node.carrier_index:
        raise UsageError(
            f"node {node.index} may cancel token {node.carrier_index}, not token {token_index}"
        )
    if num_ticks < 1:
        raise UsageError("num_ticks must be >= 1")
    return _emission_wave(carrier, node.tap_position, num_ticks, sample_rate, phase_offset)


def expected_backward_phase(carrier: Carrier, tap_position: int, sample_rate: float) -> float:
    """Phase the home node should demodulate on the backward wave of a capture.

    The emission picks up the tap's one-way lag twice (out and back):
    ``2*theta + pi`` with ``theta = 2*pi*f*p/sample_rate``, minus the launch
    phase under the lag sign convention.
    """
    theta = TWO_PI * carrier.frequency * tap_position / sample_rate
    return (2.0 * theta + math.pi - carrier.phase) % TWO_PI


def infer_competitors_node(
    node: NodeConfig,
    forward_demods: Sequence[DemodResult],
    backward_demods: Sequence[DemodResult],
    token_amplitude: float,
    threshold: float = 0.5,
) -> frozenset[int]:
    """Competitor set as seen from one node's own tap.

    Upstream competitors (j < i) betray themselves by a *missing* forward
    token t_j; downstream ones (j > i) by carrier j energy on the backward
    wave.  The node itself is a member iff it competes.
    """
    inferred: set[int] = set()
    for j in range(1, len(forward_demods) + 1):
        if j < node.index:
            if not detect_token(forward_demods[j - 1], token_amplitude, threshold):
                inferred.add(j)
        elif j > node.index:
            if detect_token(backward_demods[j - 1], token_amplitude, threshold):
                inferred.add(j)
    if node.competing:
        inferred.add(node.index)
    return frozenset(inferred)


def infer_competitors_home(
    backward_demods: Sequence[DemodResult],
    tokens: TokenSet,
    geometry: LineGeometry,
    sample_rate: float,
    threshold: float = 0.5,
    phase_tolerance: float = 0.1,
) -> tuple[frozenset[int], dict[int, bool]]:
    """Home-side competitor set from backward-wave energy, with phase checks.

    Membership is decided by amplitude alone.  For each member the measured
    phase is compared against the propagation-derived expectation; a mismatch
    is reported as a consistency flag, never as a membership change.
    """
    positions = geometry.positions()
    members: set[int] = set()
    flags: dict[int, bool] = {}
    for i, (d, c) in enumerate(zip(backward_demods, tokens.carriers), start=1):
        if detect_token(d, tokens.token_amplitude, threshold):
            members.add(i)
            expected = expected_backward_phase(c, positions[i], sample_rate)
            flags[i] = circular_difference(d.phase, expected) <= phase_tolerance
    return frozenset(members), flags


def _serial_home_inference(
    demod: DemodResult,
    carrier: Carrier,
    geometry: LineGeometry,
    sample_rate: float,
    token_amplitude: float,
    threshold: float,
    phase_tolerance: float = 0.1,
) -> tuple[frozenset[int], dict[int, bool]]:
    """Single-token capture identification by backward phase.

    With one shared carrier, home only learns *that* someone captured plus a
    phase fingerprint ``2*theta_p + pi``.  Distinct taps can alias onto the
    same fingerprint (the lag wraps mod 2*pi), so this returns the full
    candidate set.
    """
    if not detect_token(demod, token_amplitude, threshold):
        return frozenset(), {}
    members = set()
    for node_id, pos in geometry.taps:
        expected = expected_backward_phase(carrier, pos, sample_rate)
        if circular_difference(demod.phase, expected) <= phase_tolerance:
            members.add(node_id)
    return frozenset(members), {i: True for i in sorted(members)}


def _validate_round(
    geometry: LineGeometry,
    tokens: TokenSet,
    nodes: Sequence[NodeConfig],
    plan: RoundPlan,
    serial: bool,
) -> tuple[NodeConfig, ...]:
    nodes = tuple(sorted(nodes, key=lambda nd: nd.index))
    k = len(nodes)
    if k == 0:
        raise ConfigurationError("a round needs at least one node")
    if [nd.index for nd in nodes] != list(range(1, k + 1)):
        raise ConfigurationError(
            f"node indices must be exactly 1..{k}, got {[nd.index for nd in nodes]}"
        )
    tap_map = dict(geometry.taps)
    if set(tap_map) != {nd.index for nd in nodes}:
        raise ConfigurationError(
            f"geometry taps {sorted(tap_map)} do not match node indices 1..{k}"
        )
    for nd in nodes:
        if tap_map[nd.index] != nd.tap_position:
            raise ConfigurationError(
                f"node {nd.index} tap {nd.tap_position} disagrees with geometry "
                f"tap {tap_map[nd.index]}"
            )
    if serial:
        if len(tokens.carriers) != 1:
            raise ConfigurationError("serial rounds use exactly one token carrier")
    else:
        if len(tokens.carriers) != k:
            raise ConfigurationError(
                f"{k} nodes need {k} token carriers, got {len(tokens.carriers)}"
            )
        if sorted(nd.carrier_index for nd in nodes) != list(range(1, k + 1)):
            raise ConfigurationError("exactly one node must own each carrier index")
    fs = plan.sample_rate
    validate_carrier_set(tokens.carriers, plan.window_ticks / fs, fs)
    need = minimum_warmup(geometry, plan.mode, plan.detection_latency, plan.window_ticks)
    if plan.warmup_ticks < need:
        raise ConfigurationError(
            f"warmup of {plan.warmup_ticks} ticks is below the required minimum of "
            f"{need} for this geometry in {plan.mode} mode"
        )
    return nodes


def _simulate(
    geometry: LineGeometry,
    tokens: TokenSet,
    nodes: Sequence[NodeConfig],
    plan: RoundPlan,
    *,
    serial: bool,
    phase_offset: float,
    want_trace: bool,
) -> tuple[RoundOutcome, RoundTrace | None]:
    nodes = _validate_round(geometry, tokens, nodes, plan, serial)
    fs = plan.sample_rate
    window = plan.window_ticks
    n_ticks = plan.total_ticks
    carriers = tokens.carriers
    k = len(carriers)
    amp = tokens.token_amplitude
    thr = plan.detection_threshold

    ticks = np.arange(n_ticks)
    launch = [cosine_wave(c.frequency, c.phase, c.amplitude, ticks, fs) for c in carriers]
    home_tx = np.sum(launch, axis=0)

    competing = tuple(nd for nd in nodes if nd.competing)
    emission: dict[int, np.ndarray] = {}
    for nd in competing:
        c = carriers[0] if serial else carriers[nd.carrier_index - 1]
        emission[nd.index] = _emission_wave(c, nd.tap_position, n_ticks, fs, phase_offset)

    tap_ids = (0,) + tuple(nd.index for nd in nodes)
    tap_pos = np.array((0,) + tuple(nd.tap_position for nd in nodes))
    col_of = {i: j for j, i in enumerate(tap_ids)}
    fwd_rec = np.empty((n_ticks, len(tap_ids)))
    bwd_rec = np.empty((n_ticks, len(tap_ids)))

    onsets: dict[int, int | None] = {nd.index: None for nd in nodes}
    if plan.mode == IDEAL:
        if serial:
            if competing:
                captor = min(competing, key=lambda nd: nd.tap_position)
                onsets[captor.index] = captor.tap_position
        else:
            for nd in competing:
                onsets[nd.index] = nd.tap_position
    else:
        # Sliding-window detectors, one per competing node on its own carrier
        # (the single shared carrier in serial rounds).  Running sums over the
        # trailing window keep the per-tick cost constant.
        cref = [np.cos((TWO_PI * c.frequency) * (ticks / fs)) for c in carriers]
        sref = [np.sin((TWO_PI * c.frequency) * (ticks / fs)) for c in carriers]
        run_iq = {nd.index: [0.0, 0.0] for nd in competing}
        watched = {nd.index: (0 if serial else nd.carrier_index - 1) for nd in competing}
        detected_hist = {nd.index: np.zeros(n_ticks, dtype=bool) for nd in competing}

    latency = plan.detection_latency
    transient = plan.mode == TRANSIENT
    state = build_line(geometry)

    for t in range(n_ticks):
        fwd_rec[t] = state.forward[tap_pos]
        bwd_rec[t] = state.backward[tap_pos]

        if transient:
            for nd in competing:
                i = nd.index
                ci = watched[i]
                col = col_of[i]
                acc = run_iq[i]
                x = fwd_rec[t, col]
                acc[0] += x * cref[ci][t]
                acc[1] += x * sref[ci][t]
                if t >= window:
                    x_old = fwd_rec[t - window, col]
                    acc[0] -= x_old * cref[ci][t - window]
                    acc[1] -= x_old * sref[ci][t - window]
                if t >= window - 1:
                    level = (2.0 / window) * math.hypot(acc[0], acc[1])
                    hit = level >= thr * amp
                    detected_hist[i][t] = hit
                    if hit and onsets[i] is None and not serial:
                        onsets[i] = t + latency

        state.inject(0, home_tx[t], 0.0)
        for nd in competing:
            i = nd.index
            if transient and serial:
                # Serial capture is level-triggered: a node emits only while
                # its (latency-delayed) detector still sees the token.  A
                # downstream node that fired on the pre-quench overshoot goes
                # quiet again once the upstream capture reaches it.
                tau = t - latency
                active = tau >= 0 and detected_hist[i][tau]
                if active and onsets[i] is None:
                    onsets[i] = t
            else:
                active = onsets[i] is not None and t >= onsets[i]
            if active:
                v = emission[i][t]
                state.inject(nd.tap_position, v, v)
        state.step()

    start_s = plan.decision_start / fs
    dur_s = window / fs
    n_taps = len(tap_ids)
    fwd_d = [
        [demodulate_iq(Waveform(fs, fwd_rec[:, j]), c.frequency, start_s, dur_s) for c in carriers]
        for j in range(n_taps)
    ]
    bwd_d = [
        [demodulate_iq(Waveform(fs, bwd_rec[:, j]), c.frequency, start_s, dur_s) for c in carriers]
        for j in range(n_taps)
    ]

    verdicts = []
    for nd in nodes:
        col = col_of[nd.index]
        flags = tuple(detect_token(fwd_d[col][ci], amp, thr) for ci in range(k))
        if serial:
            won = nd.competing and flags[0]
            inferred: frozenset[int] = frozenset()
        else:
            won = nd.competing and all(flags[: nd.index])
            inferred = infer_competitors_node(nd, fwd_d[col], bwd_d[col], amp, thr)
        verdicts.append(
            NodeVerdict(
                index=nd.index,
                competing=nd.competing,
                won=won,
                tokens_detected=flags,
                inferred_competitors=inferred,
            )
        )

    if serial:
        home_set, phase_flags = _serial_home_inference(
            bwd_d[0][0], carriers[0], geometry, fs, amp, thr
        )
    else:
        home_set, phase_flags = infer_competitors_home(bwd_d[0], tokens, geometry, fs, thr)

    won_set = {v.index for v in verdicts if v.won}
    winner = next(iter(won_set)) if len(won_set) == 1 else None
    outcome = RoundOutcome(
        winner=winner,
        verdicts=tuple(verdicts),
        home_inferred=home_set,
        home_phase_consistent=phase_flags,
        truth_competing=frozenset(nd.index for nd in competing),
        mode=plan.mode,
    )
    trace = None
    if want_trace:
        trace = RoundTrace(
            sample_rate=fs,
            tap_ids=tap_ids,
            tap_positions=tuple(int(p) for p in tap_pos),
            forward=fwd_rec,
            backward=bwd_rec,
            onsets=dict(onsets),
        )
    return outcome, trace


def run_round(
    geometry: LineGeometry,
    tokens: TokenSet,
    nodes: Sequence[NodeConfig],
    plan: RoundPlan,
    *,
    cancellation_phase_offset: float = math.pi,
    return_trace: bool = False,
) -> RoundOutcome | tuple[RoundOutcome, RoundTrace]:
    """Simulate one parallel multi-carrier arbitration round.

    ``cancellation_phase_offset`` is a fault-injection handle: the nominal pi
    cancels, anything else corrupts the capture wave (0 doubles the token
    downstream), which negative-control tests use to prove the interference
    is load-bearing.
    """
    outcome, trace = _simulate(
        geometry,
        tokens,
        nodes,
        plan,
        serial=False,
        phase_offset=cancellation_phase_offset,
        want_trace=return_trace,
    )
    return (outcome, trace) if return_trace else outcome


def run_serial_round(
    geometry: LineGeometry,
    token: Carrier,
    nodes: Sequence[NodeConfig],
    plan: RoundPlan,
    *,
    cancellation_phase_offset: float = math.pi,
    return_trace: bool = False,
) -> RoundOutcome | tuple[RoundOutcome, RoundTrace]:
    """Simulate one single-token daisy-chain round (latency baseline).

    The nearest competing node captures the token; everyone downstream loses.
    In transient mode a downstream competitor may emit briefly on the
    pre-quench overshoot before going quiet, so give multi-competitor rounds
    extra warmup headroom beyond the minimum when planning them.
    """
    tokens = TokenSet(carriers=(token,), token_amplitude=token.amplitude)
    outcome, trace = _simulate(
        geometry,
        tokens,
        nodes,
        plan,
        serial=True,
        phase_offset=cancellation_phase_offset,
        want_trace=return_trace,
    )
    return (outcome, trace) if return_trace else outcome
