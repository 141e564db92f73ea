"""Carrier synthesis, superposition, and windowed I/Q correlation demodulation.

Conventions used throughout the package:

* A modulated carrier is the real voltage signal
  ``envelope(t) * amplitude * cos(2*pi*frequency*t + phase)``.
* Sampling is uniform.  Sample ``n`` of a waveform synthesized with start time
  ``t0`` is taken at ``t = t0 + n / sample_rate``; all start times, durations,
  and window edges must land on that grid.
* Demodulation at frequency ``f`` over a window of ``N`` samples starting at
  absolute time ``t0`` forms

      I = (2/N) * sum_n w[n] * cos(2*pi*f*t_n)
      Q = (2/N) * sum_n w[n] * sin(2*pi*f*t_n)      with t_n = t0 + n/fs

  and reports ``amplitude = hypot(I, Q)`` and ``phase = atan2(Q, I)``.  Under
  this sign convention the reported phase is the *lag* of the wave relative to
  ``cos(2*pi*f*t)``: an input ``A*cos(2*pi*f*(t - tau))`` demodulates to
  amplitude ``A`` and phase ``+2*pi*f*tau`` (mod 2*pi), and equivalently an
  input ``A*cos(2*pi*f*t + theta)`` yields phase ``-theta`` (mod 2*pi).  Every
  phase comparison in the package uses this one convention.
* Exact carrier separation requires each frequency to complete a positive
  integer number of cycles over the demodulation window, all cycle counts to
  be pairwise distinct, and the sample rate to stay clear of ``2*f`` aliasing;
  see :func:`validate_carrier_set`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, UsageError

TWO_PI = 2.0 * math.pi

# Default detection threshold: a carrier counts as present when its demodulated
# amplitude reaches half of the nominal token amplitude.
DEFAULT_DETECTION_THRESHOLD = 0.5

# Tolerance, in samples, for deciding whether a time lands on the sample grid,
# and, in cycles, for deciding whether a frequency completes an integer number
# of cycles over a window.  Generous against float noise at GHz * ns scales,
# far below any physically distinct configuration.
_GRID_TOL = 1e-6


def _grid_ticks(seconds: float, sample_rate: float, what: str) -> int:
    """Convert a time to an integer number of samples, or fail loudly."""
    exact = seconds * sample_rate
    ticks = round(exact)
    if abs(exact - ticks) > _GRID_TOL:
        raise ConfigurationError(
            f"{what} = {seconds} s is not aligned to the sample grid "
            f"({exact} samples at {sample_rate} S/s)"
        )
    return ticks


def _integer_cycles(frequency: float, duration: float, what: str) -> int:
    cycles = frequency * duration
    count = round(cycles)
    if count < 1 or abs(cycles - count) > _GRID_TOL * max(1.0, abs(cycles)):
        raise ConfigurationError(
            f"{what}: {frequency} Hz completes {cycles} cycles over a "
            f"{duration} s window; a positive integer cycle count is required"
        )
    return count


def _check_reference_valid(frequency: float, sample_rate: float) -> None:
    # If 2f is a multiple of the sample rate, the cos(2wt) term of the
    # correlation no longer averages out and the I/Q estimate is biased.
    ratio = 2.0 * frequency / sample_rate
    if abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1:
        raise ConfigurationError(
            f"2 * {frequency} Hz is a multiple of the sample rate "
            f"{sample_rate} S/s; I/Q correlation is degenerate there"
        )


def cosine_wave(
    frequency: float,
    phase: float,
    amplitude: float,
    tick_indices: np.ndarray,
    sample_rate: float,
) -> np.ndarray:
    """Evaluate A*cos(2*pi*f*t + phase) at t = tick_indices / sample_rate.

    Every carrier evaluation in the package funnels through this one
    expression so that equal tick indices always produce bit-identical
    samples (the destructive-read algebra relies on that).
    """
    return amplitude * np.cos((TWO_PI * frequency) * (tick_indices / sample_rate) + phase)


@dataclass(frozen=True)
class Carrier:
    """A pure tone: frequency in Hz, phase in radians, amplitude in volts."""

    frequency: float
    phase: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not self.frequency > 0.0:
            raise ConfigurationError(f"carrier frequency must be positive, got {self.frequency}")
        if self.amplitude < 0.0:
            raise ConfigurationError(f"carrier amplitude must be >= 0, got {self.amplitude}")
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)


@dataclass(frozen=True)
class Waveform:
    """A uniformly sampled real signal."""

    sample_rate: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        if not self.sample_rate > 0.0:
            raise ConfigurationError(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class DemodResult:
    """I/Q correlation output at one carrier over one window."""

    in_phase: float
    quadrature: float
    amplitude: float
    phase: float

    @classmethod
    def from_iq(cls, in_phase: float, quadrature: float) -> "DemodResult":
        return cls(
            in_phase=in_phase,
            quadrature=quadrature,
            amplitude=math.hypot(in_phase, quadrature),
            phase=math.atan2(quadrature, in_phase),
        )


def synthesize(
    carrier: Carrier,
    envelope: float | Sequence[float],
    start_time: float,
    duration: float,
    sample_rate: float,
) -> Waveform:
    """Sample an amplitude-keyed carrier on the global time grid.

    ``envelope`` is either a constant level or a per-segment schedule (OOK
    bits): a sequence of K levels splits the duration into K equal segments,
    each of which must cover a whole number of samples.
    """
    if sample_rate < 8.0 * carrier.frequency:
        raise ConfigurationError(
            f"sample rate {sample_rate} S/s is below 8x carrier frequency {carrier.frequency} Hz"
        )
    n0 = _grid_ticks(start_time, sample_rate, "start_time")
    n = _grid_ticks(duration, sample_rate, "duration")
    if n < 1:
        raise ConfigurationError(f"duration {duration} s covers no samples at {sample_rate} S/s")

    if np.isscalar(envelope):
        levels = np.full(n, float(envelope))
    else:
        levels = np.asarray(envelope, dtype=np.float64)
        if levels.ndim != 1 or len(levels) < 1:
            raise ConfigurationError("envelope schedule must be a non-empty 1-D sequence")
        if n % len(levels) != 0:
            raise ConfigurationError(
                f"envelope schedule of {len(levels)} segments does not divide "
                f"{n} samples evenly"
            )
        levels = np.repeat(levels, n // len(levels))
    if np.any(levels < 0.0):
        raise ConfigurationError("envelope levels must be >= 0")

    ticks = n0 + np.arange(n)
    samples = levels * cosine_wave(
        carrier.frequency, carrier.phase, carrier.amplitude, ticks, sample_rate
    )
    return Waveform(sample_rate=sample_rate, samples=samples)


def superpose(a: Waveform, b: Waveform) -> Waveform:
    """Sample-wise sum of two waveforms on the same grid."""
    if a.sample_rate != b.sample_rate:
        raise UsageError(
            f"cannot superpose waveforms at different rates: {a.sample_rate} vs {b.sample_rate}"
        )
    if len(a) != len(b):
        raise UsageError(f"cannot superpose waveforms of different lengths: {len(a)} vs {len(b)}")
    return Waveform(sample_rate=a.sample_rate, samples=a.samples + b.samples)


def demodulate_iq(
    w: Waveform,
    frequency: float,
    window_start: float,
    window_duration: float,
) -> DemodResult:
    """Correlate one window of ``w`` against quadrature references at ``frequency``.

    ``window_start`` is absolute time measured from the waveform's first
    sample, so phase stays referenced to the global t = 0 origin no matter
    where the window sits.
    """
    fs = w.sample_rate
    n0 = _grid_ticks(window_start, fs, "window_start")
    n = _grid_ticks(window_duration, fs, "window_duration")
    if n < 1:
        raise ConfigurationError("window_duration covers no samples")
    if n0 < 0 or n0 + n > len(w):
        raise UsageError(
            f"demod window [{n0}, {n0 + n}) lies outside the waveform of {len(w)} samples"
        )
    _integer_cycles(frequency, window_duration, "demod window")
    _check_reference_valid(frequency, fs)

    ticks = n0 + np.arange(n)
    args = (TWO_PI * frequency) * (ticks / fs)
    segment = w.samples[n0 : n0 + n]
    i_val = (2.0 / n) * float(np.dot(segment, np.cos(args)))
    q_val = (2.0 / n) * float(np.dot(segment, np.sin(args)))
    return DemodResult.from_iq(i_val, q_val)


def sliding_demodulate_iq(
    w: Waveform, frequency: float, window_ticks: int
) -> tuple[np.ndarray, np.ndarray]:
    """Demodulate every length-``window_ticks`` window of ``w`` at once.

    Returns ``(amplitude, phase)`` arrays indexed by window start sample;
    entry ``s`` matches :func:`demodulate_iq` with the window starting at
    sample ``s``.  Computed with cumulative sums so a full trace costs one
    pass instead of one correlation per tick.
    """
    fs = w.sample_rate
    if window_ticks < 1:
        raise ConfigurationError("window_ticks must be >= 1")
    if window_ticks > len(w):
        raise UsageError(f"window of {window_ticks} samples exceeds waveform of {len(w)}")
    _integer_cycles(frequency, window_ticks / fs, "demod window")
    _check_reference_valid(frequency, fs)

    ticks = np.arange(len(w))
    args = (TWO_PI * frequency) * (ticks / fs)
    ci = np.concatenate(([0.0], np.cumsum(w.samples * np.cos(args))))
    cq = np.concatenate(([0.0], np.cumsum(w.samples * np.sin(args))))
    n = window_ticks
    i_vals = (2.0 / n) * (ci[n:] - ci[:-n])
    q_vals = (2.0 / n) * (cq[n:] - cq[:-n])
    return np.hypot(i_vals, q_vals), np.arctan2(q_vals, i_vals)


def detect_token(
    d: DemodResult,
    expected_amplitude: float,
    threshold_fraction: float = DEFAULT_DETECTION_THRESHOLD,
) -> bool:
    """True iff the demodulated amplitude reaches the detection threshold."""
    if not 0.0 < threshold_fraction < 1.0:
        raise UsageError(f"threshold_fraction must lie in (0, 1), got {threshold_fraction}")
    if not expected_amplitude > 0.0:
        raise UsageError(f"expected_amplitude must be positive, got {expected_amplitude}")
    return d.amplitude >= threshold_fraction * expected_amplitude


def validate_carrier_set(
    carriers: Sequence[Carrier], window_duration: float, sample_rate: float
) -> tuple[int, ...]:
    """Check that a carrier family separates exactly under windowed I/Q demod.

    Returns the per-carrier integer cycle counts over the window.  Raises
    ConfigurationError when any carrier has a non-integer cycle count, two
    carriers share a count, the sample rate is below 8x the highest carrier,
    or a reference is degenerate.
    """
    if not carriers:
        raise ConfigurationError("carrier set is empty")
    counts = []
    for idx, c in enumerate(carriers):
        counts.append(_integer_cycles(c.frequency, window_duration, f"carrier[{idx}]"))
        _check_reference_valid(c.frequency, sample_rate)
    if len(set(counts)) != len(counts):
        raise ConfigurationError(
            f"cycle counts over the window must be pairwise distinct, got {counts}"
        )
    fmax = max(c.frequency for c in carriers)
    if sample_rate < 8.0 * fmax:
        raise ConfigurationError(
            f"sample rate {sample_rate} S/s is below 8x the highest carrier ({fmax} Hz)"
        )
    return tuple(counts)


def circular_difference(a: float, b: float) -> float:
    """Smallest absolute angular distance between two phases, in [0, pi]."""
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)
