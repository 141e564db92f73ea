"""Oracle, scenario builders, equivalence sweeps, latency and settle measures."""

import numpy as np
import pytest

from wavebus import (
    SERIAL_DAISY,
    WAVE_PARALLEL,
    ConfigurationError,
    LatencyModel,
    UsageError,
    all_subsets,
    arbitration_latency,
    default_scenario,
    equivalence_sweep,
    measure_settle,
    minimum_warmup,
    oracle_winner,
    random_scenario,
    reference_scenario,
    selftest_checks,
    validate_carrier_set,
)

# ---------------------------------------------------------------------------
# oracle


def test_oracle_winner():
    assert oracle_winner(set()) is None
    assert oracle_winner({2, 3}) == 2
    assert oracle_winner({1, 2}, priority=(3, 1, 2)) == 2  # node 2 holds rank 1
    assert oracle_winner({1}, priority=(3, 1, 2)) == 1


def test_all_subsets():
    subsets = all_subsets(3)
    assert len(subsets) == 8
    assert len(set(subsets)) == 8
    assert frozenset() in subsets and frozenset({1, 2, 3}) in subsets


# ---------------------------------------------------------------------------
# latency models


def test_latency_closed_forms():
    D, T, h = 1e-9, 2e-9, 2e-9
    for k in range(2, 9):
        assert arbitration_latency(LatencyModel(WAVE_PARALLEL, D, T, k)) == 2 * D + T
    serial = [arbitration_latency(LatencyModel(SERIAL_DAISY, D, T, k, hop_delay=h))
              for k in range(2, 9)]
    assert serial == [k * h + 2 * D for k in range(2, 9)]
    assert all(b > a for a, b in zip(serial, serial[1:]))


def test_latency_model_validation():
    with pytest.raises(ConfigurationError, match="unknown scheme"):
        LatencyModel("token_ring", 1e-9, 2e-9, 3)
    with pytest.raises(ConfigurationError, match="hop_delay"):
        LatencyModel(SERIAL_DAISY, 1e-9, 2e-9, 3)
    with pytest.raises(ConfigurationError, match="positive"):
        LatencyModel(WAVE_PARALLEL, 0.0, 2e-9, 3)


# ---------------------------------------------------------------------------
# scenario builders


def test_reference_scenario_frozen_shape():
    scn = reference_scenario("ideal")
    assert scn.geometry.total_delay == 32
    assert scn.geometry.taps == ((1, 8), (2, 16), (3, 24))
    assert scn.geometry.right_reflection == -0.1
    assert [c.frequency for c in scn.tokens.carriers] == pytest.approx([1e9, 2e9, 1.5e9])
    assert scn.plan.sample_rate == pytest.approx(32e9)
    assert scn.plan.window_ticks == 64
    fs = scn.plan.sample_rate
    assert validate_carrier_set(scn.tokens.carriers, 64 / fs, fs) == (2, 4, 3)


def test_default_scenario_sizes_with_k():
    for k in range(1, 9):
        scn = default_scenario(k)
        assert scn.k == k
        taps = [p for _, p in scn.geometry.taps]
        assert len(set(taps)) == k and taps == sorted(taps)
    with pytest.raises(ConfigurationError, match="k must be >= 1"):
        default_scenario(0)
    with pytest.raises(ConfigurationError, match="cycle counts"):
        default_scenario(3, cycle_counts=(2, 3))


def test_nodes_builder_marks_competitors():
    scn = reference_scenario("ideal")
    nodes = scn.nodes({2})
    assert [n.index for n in nodes] == [1, 2, 3]
    assert [n.competing for n in nodes] == [False, True, False]


def test_random_scenario_family_is_valid():
    rng = np.random.default_rng(17)
    for _ in range(40):
        k = int(rng.integers(1, 9))
        scn = random_scenario(rng, k)  # construction itself validates carriers/plan
        assert scn.k == k
        assert abs(scn.geometry.left_reflection) <= 0.2
        assert abs(scn.geometry.right_reflection) <= 0.2
        taps = [p for _, p in scn.geometry.taps]
        assert taps == sorted(taps) and taps[0] >= 1
        assert scn.plan.warmup_ticks == minimum_warmup(
            scn.geometry, scn.plan.mode, scn.plan.detection_latency, scn.plan.window_ticks)
    with pytest.raises(UsageError, match="k must be in"):
        random_scenario(rng, 13)


# ---------------------------------------------------------------------------
# equivalence sweeps


def test_exhaustive_sweep_is_clean():
    report = equivalence_sweep(2)
    assert report.ok
    assert report.trials == 8  # 4 subsets x 2 modes
    assert "ok" in report.summary()


def test_sweep_with_supplied_scenario_replans_modes():
    report = equivalence_sweep(3, scenario=reference_scenario("ideal"))
    assert report.ok and report.trials == 16  # 8 subsets x 2 modes


def test_randomized_sweep_is_clean():
    report = equivalence_sweep(6, trials=15, seed=23)
    assert report.ok and report.trials == 30


def test_corrupt_cancellation_fails_the_sweep():
    report = equivalence_sweep(3, modes=("ideal",), corrupt_cancellation=True)
    assert not report.ok
    assert "mismatches" in report.summary()


def test_sweep_guards():
    with pytest.raises(UsageError, match="k <= 4"):
        equivalence_sweep(5)
    with pytest.raises(UsageError, match="unknown mode"):
        equivalence_sweep(3, modes=("exact",))


# ---------------------------------------------------------------------------
# settle measurement


def test_measure_settle_within_bounds():
    scn = reference_scenario("ideal")
    fs = scn.plan.sample_rate
    settle = measure_settle(scn.geometry, scn.tokens, scn.nodes({1, 2, 3}), scn.plan)
    bound = (2 * scn.geometry.total_delay + scn.plan.window_ticks) / fs  # 2D + T
    assert scn.plan.window_ticks / fs <= settle <= bound
    assert (settle * fs) == pytest.approx(round(settle * fs))  # tick-quantized

    scn_t = reference_scenario("transient")
    settle_t = measure_settle(scn_t.geometry, scn_t.tokens, scn_t.nodes({1, 2, 3}), scn_t.plan)
    extra = (scn_t.plan.detection_latency + scn_t.plan.window_ticks) / fs
    assert settle_t <= bound + extra


def test_selftest_checks_are_named_callables():
    checks = selftest_checks()
    names = [n for n, _ in checks]
    assert len(names) == len(set(names)) >= 8
    assert all(callable(fn) for _, fn in checks)
