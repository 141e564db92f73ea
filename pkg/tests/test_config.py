"""Scenario config files: bundled lookup, schema validation, round schedules.

Every rejection path must name the offending field so a bad config is
self-diagnosing.
"""

import json

import pytest

from wavebus import ConfigurationError, RoundsSpec, bundled_config_names, load_config

GOOD = {
    "sample_rate": 32e9,
    "window_seconds": 2e-9,
    "mode": "ideal",
    "carrier_frequencies": [1e9, 2e9, 1.5e9],
    "line": {"total_delay": 32, "tap_positions": [8, 16, 24]},
    "rounds": [[1, 2, 3]],
}


def write_cfg(tmp_path, overrides=None, **replace):
    doc = {**GOOD, **(overrides or {})}
    for key, value in replace.items():
        doc[key] = value
    path = tmp_path / "case.cfg"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# loading


def test_bundled_configs_exist_and_load():
    names = bundled_config_names()
    assert names == ["paper_fig4_ideal.cfg", "paper_fig7_transient.cfg", "policy_demo.cfg"]
    for name in names:
        cfg = load_config(name)
        cfg.scenario()  # must build


def test_bundled_transient_fields():
    cfg = load_config("paper_fig7_transient.cfg")
    assert cfg.mode == "transient"
    assert cfg.right_reflection == -0.1
    assert cfg.detection_latency == 8
    assert cfg.tap_positions == (8, 16, 24)
    assert cfg.carrier_frequencies == (1e9, 2e9, 1.5e9)
    assert cfg.rounds.explicit == ((1, 2, 3),)
    assert cfg.policy == "static"
    assert cfg.label == "paper_fig7_transient"


def test_load_from_filesystem_path(tmp_path):
    cfg = load_config(write_cfg(tmp_path))
    assert cfg.num_nodes == 3
    assert cfg.window_ticks == 64
    assert cfg.label == "case"
    scn = cfg.scenario()
    assert scn.k == 3 and scn.plan.mode == "ideal"


def test_missing_file_lists_bundled_names():
    with pytest.raises(ConfigurationError, match="paper_fig4_ideal.cfg"):
        load_config("nope.cfg")


def test_invalid_json_and_shape(tmp_path):
    p = tmp_path / "broken.cfg"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="not valid JSON"):
        load_config(str(p))
    p.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="JSON object"):
        load_config(str(p))


# ---------------------------------------------------------------------------
# field validation (each diagnostic names the field)


@pytest.mark.parametrize(
    "mutate, message",
    [
        (dict(bogus=1), "unknown fields"),
        (dict(line={"total_delay": 32, "tap_positions": [8, 16, 24], "z": 1}), "unknown keys"),
        (dict(carrier_frequencies=[1.3e9, 2e9, 1.5e9]), "integer cycle"),
        (dict(carrier_frequencies=[1e9, 1e9, 2e9]), "pairwise distinct"),
        (dict(carrier_frequencies=[1e9, 2e9]), "one carrier per node"),
        (dict(rounds=[]), "at least one round"),
        (dict(rounds=[[1, 5]]), "node id 5"),
        (dict(rounds=[[2, 2]]), "repeats"),
        (dict(rounds={"probability": 1.5, "count": 4}), r"\[0, 1\]"),
        (dict(rounds={"probability": 0.5, "count": 0}), "count.*positive"),
        (dict(rounds={"probability": 0.5, "count": 3, "x": 1}), "unknown keys"),
        (dict(rounds="daily"), "rounds"),
        (dict(mode="exact"), "mode"),
        (dict(policy="round_robin"), "policy"),
        (dict(serial_hop_delay=-1e-9), "serial_hop_delay"),
        (dict(detection_latency=2.5), "integer"),
        (dict(sample_rate="fast"), "number"),
        (dict(window_seconds=3.1e-9), "integer cycle"),
        (dict(sample_rate=31.75e9), "aligned to the sample grid"),
        (dict(decision_start=10), "precedes warmup"),
        (dict(line={"total_delay": 32, "tap_positions": [24, 16, 8]}), "strictly increase"),
        (dict(line={"total_delay": True, "tap_positions": [8, 16, 24]}), "integer"),
    ],
)
def test_rejections_name_the_field(tmp_path, mutate, message):
    with pytest.raises(ConfigurationError, match=message):
        load_config(write_cfg(tmp_path, overrides=mutate))


def test_missing_required_field(tmp_path):
    doc = {k: v for k, v in GOOD.items() if k != "sample_rate"}
    p = tmp_path / "case.cfg"
    p.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ConfigurationError, match="missing required field 'sample_rate'"):
        load_config(str(p))


# ---------------------------------------------------------------------------
# round schedules


def test_rounds_resolve_explicit():
    spec = RoundsSpec.from_json([[1, 3], [], [2]])
    assert spec.num_rounds == 3
    assert spec.resolve(3) == [(1, 3), (), (2,)]
    with pytest.raises(ConfigurationError, match="node id 9"):
        spec_over = RoundsSpec.from_json([[9]])
        spec_over.resolve(3)


def test_rounds_resolve_bernoulli_is_seed_deterministic():
    spec = RoundsSpec.from_json({"probability": 0.7, "count": 12, "seed": 7})
    a = spec.resolve(3)
    b = spec.resolve(3)
    assert a == b and len(a) == 12
    assert all(all(1 <= i <= 3 for i in ids) for ids in a)
    assert spec.resolve(3, seed_override=8) != a
    assert spec.resolve(3, seed_override=7) == a


def test_rounds_probability_extremes():
    always = RoundsSpec.from_json({"probability": 1.0, "count": 4})
    assert always.resolve(3) == [(1, 2, 3)] * 4
    never = RoundsSpec.from_json({"probability": 0.0, "count": 4})
    assert never.resolve(3) == [()] * 4


# ---------------------------------------------------------------------------
# mode override


def test_with_mode(tmp_path):
    cfg = load_config(write_cfg(tmp_path))
    flipped = cfg.with_mode("transient")
    assert flipped.mode == "transient" and cfg.mode == "ideal"
    assert flipped.label == cfg.label
    assert flipped.plan().mode == "transient"
    with pytest.raises(ConfigurationError, match="mode"):
        cfg.with_mode("exact")
