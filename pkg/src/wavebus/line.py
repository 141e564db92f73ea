"""One-dimensional transmission line as two counter-propagating delay lines.

The line spans integer positions ``0 .. total_delay``; one simulation tick
moves the forward wave one position to the right and the backward wave one
position to the left, so one tick equals one sample period and a tap at
position ``p`` sits ``p`` ticks of propagation away from the home end.

Terminations are reflection coefficients: a sample leaving the right end
re-enters the backward wave scaled by ``right_reflection``; a sample leaving
the left end re-enters the forward wave scaled by ``left_reflection``.  A
reflected sample therefore dwells one tick at the end cell while reversing
direction.

Taps are lossless: injection adds into the buffers, observation just reads
them.  Per-tick ordering discipline is the caller's job: observe every tap
first, then inject, then step.  Observations thus see the state before the
same tick's injections, so a node never reads its own same-tick emission.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, UsageError

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class LineGeometry:
    """Static description of one line: length, taps, terminations.

    ``taps`` lists ``(node_id, position)`` pairs for the arbitrating nodes.
    The home node is implicit: it always taps position 0 with id 0.  Node ids
    must be positive and ordered so that tap positions strictly increase with
    node id (nearest node first).
    """

    total_delay: int
    taps: tuple[tuple[int, int], ...]
    left_reflection: float = 0.0
    right_reflection: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.total_delay, int) or self.total_delay < 1:
            raise ConfigurationError(f"total_delay must be a positive int, got {self.total_delay}")
        taps = tuple((int(i), int(p)) for i, p in self.taps)
        object.__setattr__(self, "taps", taps)
        ids = [i for i, _ in taps]
        positions = [p for _, p in taps]
        if any(i <= 0 for i in ids):
            raise ConfigurationError(f"node ids must be positive (0 is the home node), got {ids}")
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"duplicate node ids in taps: {ids}")
        if ids != sorted(ids):
            raise ConfigurationError(f"taps must be listed in node-id order, got {ids}")
        for p in positions:
            if not 0 <= p <= self.total_delay:
                raise ConfigurationError(
                    f"tap position {p} outside line of total delay {self.total_delay}"
                )
        if any(b <= a for a, b in zip(positions, positions[1:])):
            raise ConfigurationError(
                f"tap positions must strictly increase with node id, got {positions}"
            )
        for name in ("left_reflection", "right_reflection"):
            g = getattr(self, name)
            if abs(g) > 1.0:
                raise ConfigurationError(f"{name} must satisfy |gamma| <= 1, got {g}")

    def positions(self) -> dict[int, int]:
        """Tap positions by node id, home node included."""
        out = {0: 0}
        out.update({i: p for i, p in self.taps})
        return out

    def node_ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.taps)


class LineState:
    """Mutable wave state of one line: forward and backward sample buffers."""

    __slots__ = ("geometry", "forward", "backward", "tick", "_spare_f", "_spare_b", "_tap_set")

    def __init__(self, geometry: LineGeometry) -> None:
        n = geometry.total_delay + 1
        self.geometry = geometry
        self.forward = np.zeros(n)
        self.backward = np.zeros(n)
        self.tick = 0
        self._spare_f = np.zeros(n)
        self._spare_b = np.zeros(n)
        self._tap_set = {0} | {p for _, p in geometry.taps}

    def _check_tap(self, position: int) -> None:
        if position not in self._tap_set:
            raise UsageError(f"position {position} is not a tap on this line")

    def inject(self, position: int, forward_value: float, backward_value: float) -> None:
        """Superpose one sample onto each travel direction at a tap."""
        self._check_tap(position)
        self.forward[position] += forward_value
        self.backward[position] += backward_value

    def step(self) -> None:
        """Advance one tick: shift both waves and apply termination reflections."""
        f, b = self.forward, self.backward
        nf, nb = self._spare_f, self._spare_b
        nf[1:] = f[:-1]
        nf[0] = self.geometry.left_reflection * b[0]
        nb[:-1] = b[1:]
        nb[-1] = self.geometry.right_reflection * f[-1]
        self.forward, self.backward = nf, nb
        self._spare_f, self._spare_b = f, b
        self.tick += 1

    def observe_total(self, position: int) -> float:
        """Sum of both travel directions at a tap (what a plain probe sees)."""
        self._check_tap(position)
        return float(self.forward[position] + self.backward[position])

    def observe_directional(self, position: int, direction: str) -> float:
        """One travel direction at a tap (ideal directional coupler)."""
        self._check_tap(position)
        if direction == FORWARD:
            return float(self.forward[position])
        if direction == BACKWARD:
            return float(self.backward[position])
        raise UsageError(f"direction must be '{FORWARD}' or '{BACKWARD}', got {direction!r}")


def build_line(geometry: LineGeometry) -> LineState:
    """Fresh quiescent line state for a geometry."""
    return LineState(geometry)
