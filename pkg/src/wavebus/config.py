"""Scenario configuration files.

A config file is a JSON document (conventionally with a ``.cfg`` extension)
describing one arbitration scenario plus the round schedule to drive through
it.  ``load_config`` accepts either a filesystem path or the bare name of a
config bundled with the package (see ``wavebus/configs/``).

Schema::

    {
      "sample_rate": 32e9,            // samples per second
      "window_seconds": 2e-9,         // decision window length
      "mode": "ideal",                // "ideal" | "transient"
      "token_amplitude": 1.0,
      "carrier_frequencies": [1e9, 2e9, 1.5e9],   // rank 1, 2, ... k
      "line": {
        "total_delay": 32,            // ticks end to end
        "tap_positions": [8, 16, 24], // one per node, ascending
        "left_reflection": 0.0,
        "right_reflection": -0.1
      },
      "detection_latency": 8,         // transient mode confirmation ticks
      "detection_threshold": 0.5,     // fraction of token amplitude
      "warmup_ticks": null,           // optional override
      "decision_start": null,         // optional override
      "rounds": [[1, 2, 3]],          // explicit competitor id lists, or
                                      // {"probability": p, "count": n, "seed": s}
      "policy": "static",             // "static" | "rotate" | "longest_wait_first"
      "serial_hop_delay": null        // seconds; used by latency comparisons
    }

Node ids are 1..k in tap order.  ``carrier_frequencies[r-1]`` is the token
frequency for priority rank r; the scheduling policy decides which node holds
which rank in a given round.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .harness import Scenario
from .line import LineGeometry
from .protocol import MODES, RoundPlan, TokenSet, plan_for
from .signals import _grid_ticks, validate_carrier_set
from .stats import POLICIES

_TOP_LEVEL_KEYS = {
    "sample_rate", "window_seconds", "mode", "token_amplitude",
    "carrier_frequencies", "line", "detection_latency", "detection_threshold",
    "warmup_ticks", "decision_start", "rounds", "policy", "serial_hop_delay",
}
_LINE_KEYS = {"total_delay", "tap_positions", "left_reflection", "right_reflection"}


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigurationError(f"config is missing required field '{where}{key}'")
    return obj[key]


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"config field '{where}' must be a number, got {value!r}")
    return float(value)


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"config field '{where}' must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class RoundsSpec:
    """Round schedule: an explicit list of competitor sets, or a Bernoulli draw.

    In the Bernoulli form every node enters each round independently with the
    given probability; ``seed`` makes the draw reproducible and can be
    overridden at resolve time (the CLI's ``--seed`` flag does this).
    """

    explicit: tuple[tuple[int, ...], ...] | None = None
    probability: float | None = None
    count: int | None = None
    seed: int = 0

    @classmethod
    def from_json(cls, obj, where: str = "rounds") -> "RoundsSpec":
        if isinstance(obj, list):
            rounds = []
            for i, entry in enumerate(obj):
                if not isinstance(entry, list):
                    raise ConfigurationError(
                        f"config field '{where}[{i}]' must be a list of node ids")
                ids = tuple(sorted(_as_int(v, f"{where}[{i}]") for v in entry))
                if len(set(ids)) != len(ids):
                    raise ConfigurationError(f"config field '{where}[{i}]' repeats a node id")
                rounds.append(ids)
            if not rounds:
                raise ConfigurationError(f"config field '{where}' must list at least one round")
            return cls(explicit=tuple(rounds))
        if isinstance(obj, dict):
            unknown = set(obj) - {"probability", "count", "seed"}
            if unknown:
                raise ConfigurationError(
                    f"config field '{where}' has unknown keys: {sorted(unknown)}")
            probability = _as_number(_require(obj, "probability", where + "."), where + ".probability")
            if not 0.0 <= probability <= 1.0:
                raise ConfigurationError(
                    f"config field '{where}.probability' must lie in [0, 1]")
            count = _as_int(_require(obj, "count", where + "."), where + ".count")
            if count <= 0:
                raise ConfigurationError(f"config field '{where}.count' must be positive")
            seed = _as_int(obj.get("seed", 0), where + ".seed")
            return cls(probability=probability, count=count, seed=seed)
        raise ConfigurationError(
            f"config field '{where}' must be a list of rounds or a Bernoulli spec")

    @property
    def num_rounds(self) -> int:
        return len(self.explicit) if self.explicit is not None else int(self.count)

    def resolve(self, num_nodes: int, seed_override: int | None = None) -> list[tuple[int, ...]]:
        """Materialize the schedule as per-round tuples of competing node ids."""
        if self.explicit is not None:
            for ids in self.explicit:
                bad = [i for i in ids if not 1 <= i <= num_nodes]
                if bad:
                    raise ConfigurationError(
                        f"round lists node id {bad[0]} but the line has {num_nodes} nodes")
            return [tuple(ids) for ids in self.explicit]
        seed = self.seed if seed_override is None else seed_override
        rng = np.random.default_rng(seed)
        draws = rng.random((self.count, num_nodes))
        return [
            tuple(i + 1 for i in range(num_nodes) if draws[r, i] < self.probability)
            for r in range(self.count)
        ]


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario description, ready to build simulator objects from."""

    sample_rate: float
    window_seconds: float
    mode: str
    token_amplitude: float
    carrier_frequencies: tuple[float, ...]
    total_delay: int
    tap_positions: tuple[int, ...]
    left_reflection: float
    right_reflection: float
    detection_latency: int
    detection_threshold: float
    warmup_ticks: int | None
    decision_start: int | None
    rounds: RoundsSpec
    policy: str
    serial_hop_delay: float | None
    label: str = ""

    @property
    def num_nodes(self) -> int:
        return len(self.tap_positions)

    @property
    def window_ticks(self) -> int:
        return _grid_ticks(self.window_seconds, self.sample_rate, "window_seconds")

    def geometry(self) -> LineGeometry:
        taps = tuple((i + 1, p) for i, p in enumerate(self.tap_positions))
        return LineGeometry(
            total_delay=self.total_delay,
            taps=taps,
            left_reflection=self.left_reflection,
            right_reflection=self.right_reflection,
        )

    def tokens(self) -> TokenSet:
        tokens = TokenSet.from_frequencies(self.carrier_frequencies, self.token_amplitude)
        validate_carrier_set(tokens.carriers, self.window_seconds, self.sample_rate)
        return tokens

    def plan(self) -> RoundPlan:
        return plan_for(
            self.geometry(),
            self.sample_rate,
            self.window_ticks,
            self.mode,
            detection_latency=self.detection_latency,
            detection_threshold=self.detection_threshold,
            warmup_ticks=self.warmup_ticks,
            decision_start=self.decision_start,
        )

    def scenario(self) -> Scenario:
        return Scenario(self.geometry(), self.tokens(), self.plan(), label=self.label)

    def with_mode(self, mode: str) -> "ScenarioConfig":
        if mode not in MODES:
            raise ConfigurationError(f"unknown mode {mode!r}; expected one of {sorted(MODES)}")
        return dataclasses.replace(self, mode=mode)


def bundled_config_names() -> list[str]:
    """Names of the configs shipped inside the package."""
    root = resources.files(__package__).joinpath("configs")
    return sorted(entry.name for entry in root.iterdir() if entry.name.endswith(".cfg"))


def _read_config_text(path: str) -> tuple[str, str]:
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8"), p.stem
    # Bare names fall through to the bundled config directory.
    if p.name == path:
        candidate = resources.files(__package__).joinpath("configs").joinpath(path)
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8"), Path(path).stem
    raise ConfigurationError(
        f"config file not found: {path!r} (bundled configs: {', '.join(bundled_config_names())})")


def load_config(path: str) -> ScenarioConfig:
    """Parse and validate a scenario config from ``path``.

    ``path`` may also name a bundled config (for example
    ``paper_fig4_ideal.cfg``).  All cross-field constraints are checked here,
    so a returned config is guaranteed to build a runnable scenario.
    """
    text, label = _read_config_text(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"config file {path!r} must contain a JSON object")

    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigurationError(f"config has unknown fields: {sorted(unknown)}")

    line = _require(raw, "line", "")
    if not isinstance(line, dict):
        raise ConfigurationError("config field 'line' must be an object")
    unknown = set(line) - _LINE_KEYS
    if unknown:
        raise ConfigurationError(f"config field 'line' has unknown keys: {sorted(unknown)}")

    freqs = _require(raw, "carrier_frequencies", "")
    if not isinstance(freqs, list) or not freqs:
        raise ConfigurationError("config field 'carrier_frequencies' must be a non-empty list")
    carrier_frequencies = tuple(
        _as_number(f, f"carrier_frequencies[{i}]") for i, f in enumerate(freqs))

    taps = _require(line, "tap_positions", "line.")
    if not isinstance(taps, list) or not taps:
        raise ConfigurationError("config field 'line.tap_positions' must be a non-empty list")
    tap_positions = tuple(_as_int(p, f"line.tap_positions[{i}]") for i, p in enumerate(taps))
    if len(tap_positions) != len(carrier_frequencies):
        raise ConfigurationError(
            f"{len(tap_positions)} tap positions but {len(carrier_frequencies)} carrier "
            "frequencies; one carrier per node is required")

    mode = raw.get("mode", "ideal")
    if mode not in MODES:
        raise ConfigurationError(
            f"config field 'mode' must be one of {sorted(MODES)}, got {mode!r}")

    policy = raw.get("policy", "static")
    if policy not in POLICIES:
        raise ConfigurationError(
            f"config field 'policy' must be one of {sorted(POLICIES)}, got {policy!r}")

    warmup_ticks = raw.get("warmup_ticks")
    if warmup_ticks is not None:
        warmup_ticks = _as_int(warmup_ticks, "warmup_ticks")
    decision_start = raw.get("decision_start")
    if decision_start is not None:
        decision_start = _as_int(decision_start, "decision_start")
    serial_hop_delay = raw.get("serial_hop_delay")
    if serial_hop_delay is not None:
        serial_hop_delay = _as_number(serial_hop_delay, "serial_hop_delay")
        if serial_hop_delay <= 0:
            raise ConfigurationError("config field 'serial_hop_delay' must be positive")

    cfg = ScenarioConfig(
        sample_rate=_as_number(_require(raw, "sample_rate", ""), "sample_rate"),
        window_seconds=_as_number(_require(raw, "window_seconds", ""), "window_seconds"),
        mode=mode,
        token_amplitude=_as_number(raw.get("token_amplitude", 1.0), "token_amplitude"),
        carrier_frequencies=carrier_frequencies,
        total_delay=_as_int(_require(line, "total_delay", "line."), "line.total_delay"),
        tap_positions=tap_positions,
        left_reflection=_as_number(line.get("left_reflection", 0.0), "line.left_reflection"),
        right_reflection=_as_number(line.get("right_reflection", 0.0), "line.right_reflection"),
        detection_latency=_as_int(raw.get("detection_latency", 8), "detection_latency"),
        detection_threshold=_as_number(raw.get("detection_threshold", 0.5), "detection_threshold"),
        warmup_ticks=warmup_ticks,
        decision_start=decision_start,
        rounds=RoundsSpec.from_json(raw.get("rounds", [list(range(1, len(tap_positions) + 1))])),
        policy=policy,
        serial_hop_delay=serial_hop_delay,
        label=label,
    )
    cfg.rounds.resolve(cfg.num_nodes)  # id-range check
    cfg.scenario()  # full cross-field validation (grid, carriers, geometry, plan)
    return cfg
