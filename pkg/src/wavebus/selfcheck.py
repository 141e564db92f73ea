"""Built-in property checks behind the ``wavebus selftest`` subcommand.

Each check is a plain callable that raises AssertionError (or any package
error) on failure.  They intentionally re-derive their expected values inline
so a broken build cannot vouch for itself.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .line import LineGeometry, build_line
from .signals import (
    Carrier,
    Waveform,
    circular_difference,
    demodulate_iq,
    superpose,
    synthesize,
)

_REF_RATE = 32e9
_REF_WINDOW = 2e-9


def check_signal_round_trip() -> None:
    rng = np.random.default_rng(11)
    for _ in range(100):
        cycles = int(rng.integers(1, 13))
        freq = cycles / _REF_WINDOW
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        amp = float(rng.uniform(0.1, 2.0))
        fs = 8 * 12 / _REF_WINDOW
        w = synthesize(Carrier(freq, theta, amp), 1.0, 0.0, _REF_WINDOW, fs)
        d = demodulate_iq(w, freq, 0.0, _REF_WINDOW)
        assert abs(d.amplitude - amp) <= 1e-9 * amp, f"amplitude {d.amplitude} != {amp}"
        assert circular_difference(-d.phase, theta) <= 1e-9, f"phase {-d.phase} != {theta}"


def check_signal_orthogonality() -> None:
    fs = _REF_RATE
    for f_in in (1e9, 1.5e9, 2e9):
        w = synthesize(Carrier(f_in, 0.8, 1.0), 1.0, 0.0, _REF_WINDOW, fs)
        for f_ref in (1e9, 1.5e9, 2e9):
            if f_ref == f_in:
                continue
            d = demodulate_iq(w, f_ref, 0.0, _REF_WINDOW)
            assert d.amplitude < 1e-9, f"cross-talk {d.amplitude} at {f_ref} from {f_in}"


def check_signal_cancellation() -> None:
    fs = _REF_RATE
    for theta in (0.0, 0.7, 2.5):
        a = synthesize(Carrier(1e9, theta, 1.0), 1.0, 0.0, _REF_WINDOW, fs)
        b = synthesize(Carrier(1e9, theta + math.pi, 1.0), 1.0, 0.0, _REF_WINDOW, fs)
        total = superpose(a, b)
        assert np.max(np.abs(total.samples)) < 1e-12, "opposite phases failed to cancel"


def check_signal_linearity() -> None:
    fs = _REF_RATE
    a = synthesize(Carrier(1e9, 0.3, 0.7), 1.0, 0.0, _REF_WINDOW, fs)
    b = synthesize(Carrier(2e9, 1.1, 0.4), 1.0, 0.0, _REF_WINDOW, fs)
    total = superpose(a, b)
    for w, f, expect in ((total, 1e9, 0.7), (total, 2e9, 0.4)):
        d = demodulate_iq(w, f, 0.0, _REF_WINDOW)
        assert abs(d.amplitude - expect) <= 1e-9, f"{d.amplitude} != {expect} at {f}"


def check_line_pure_delay() -> None:
    geom = LineGeometry(total_delay=32, taps=((1, 12),))
    state = build_line(geom)
    state.inject(0, 1.0, 0.0)
    for _ in range(12):
        state.step()
    assert state.observe_directional(12, "forward") == 1.0, "impulse did not arrive intact"


def check_line_reflection() -> None:
    geom = LineGeometry(total_delay=16, taps=((1, 8),), right_reflection=-0.2)
    state = build_line(geom)
    state.inject(0, 1.0, 0.0)
    for _ in range(16 + 1 + 8):
        state.step()
    got = state.observe_directional(8, "backward")
    assert abs(got - (-0.2)) < 1e-15, f"reflected impulse {got} != -0.2"


def check_line_linearity() -> None:
    rng = np.random.default_rng(5)
    geom = LineGeometry(total_delay=16, taps=((1, 5), (2, 11)),
                        left_reflection=0.15, right_reflection=-0.2)
    sched_x = rng.normal(size=(40, 2))
    sched_y = rng.normal(size=(40, 2))

    def run(sched):
        state = build_line(geom)
        out = []
        for t in range(60):
            out.append([state.observe_total(5), state.observe_total(11)])
            if t < len(sched):
                state.inject(5, sched[t][0], sched[t][1])
            state.step()
        return np.array(out)

    lhs = run(sched_x) + run(sched_y)
    rhs = run(sched_x + sched_y)
    assert np.max(np.abs(lhs - rhs)) < 1e-12, "line superposition violated"


def check_equivalence_k3() -> None:
    from .harness import equivalence_sweep

    report = equivalence_sweep(3)
    assert report.ok, "; ".join(report.mismatches[:3])


def check_equivalence_k4() -> None:
    from .harness import equivalence_sweep

    report = equivalence_sweep(4)
    assert report.ok, "; ".join(report.mismatches[:3])


def all_checks() -> list[tuple[str, Callable[[], None]]]:
    return [
        ("signal round trip", check_signal_round_trip),
        ("signal orthogonality", check_signal_orthogonality),
        ("signal cancellation", check_signal_cancellation),
        ("signal linearity", check_signal_linearity),
        ("line pure delay", check_line_pure_delay),
        ("line reflection", check_line_reflection),
        ("line linearity", check_line_linearity),
        ("wave vs oracle, k=3 exhaustive", check_equivalence_k3),
        ("wave vs oracle, k=4 exhaustive", check_equivalence_k4),
    ]
