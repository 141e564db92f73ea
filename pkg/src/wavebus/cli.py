"""Command-line front end.

Three subcommands:

``wavebus run --config CFG [--out DIR] [--seed N] [--mode ideal|transient]``
    Execute every round of a scenario config, writing ``rounds.jsonl`` (one
    structured record per round), ``traces/node<id>_t<rank>.csv`` time series
    for the first round, and ``report.json`` with fairness and latency
    figures.  Exits 0 only if every round's winner matched the rank oracle.

``wavebus selftest``
    Run the built-in property checks (signal identities, line physics,
    exhaustive wave-vs-oracle sweeps at k=3 and k=4).

``wavebus compare [--config CFG] [--out DIR] [--mode ideal|transient]``
    Print and write a latency table, wave arbitration vs a serial daisy
    chain, for k = 2..8 nodes at fixed line length and window.

Exit codes: 0 success, 1 validation/usage error, 2 property or equivalence
failure (including oracle mismatches in ``run``).

Trace files carry both raw RF columns and demodulated columns so each can be
plotted directly.  The demod columns are a trailing sliding window over the
direction the owning tap actually monitors — the backward wave at the home
tap (node 0), the forward wave at node taps — and are ``nan`` until one full
window of samples exists.  Every demod value is recomputable from the RF
columns of the same file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ScenarioConfig, load_config
from .errors import UsageError, WavebusError
from .harness import (
    SERIAL_DAISY,
    WAVE_PARALLEL,
    LatencyModel,
    Scenario,
    arbitration_latency,
    default_scenario,
    measure_settle,
    selftest_checks,
)
from .protocol import MODES, RoundTrace, TokenSet, run_round
from .signals import Waveform, sliding_demodulate_iq
from .stats import ArbitrationHistory, invert_permutation

_COMPARE_TICKS = 72  # window and line length for the k-sweep; fits carriers up to 9 cycles


def _write_traces(out_dir: Path, trace: RoundTrace, tokens: TokenSet, window: int) -> list[Path]:
    """One CSV per (tap, token): RF observations plus trailing-window demod."""
    traces_dir = out_dir / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)
    fs = trace.sample_rate
    n_ticks = trace.forward.shape[0]
    written = []
    for col, tap_id in enumerate(trace.tap_ids):
        fwd = trace.forward[:, col]
        bwd = trace.backward[:, col]
        monitored = bwd if tap_id == 0 else fwd
        for ci, carrier in enumerate(tokens.carriers):
            amp, phase = sliding_demodulate_iq(Waveform(fs, monitored), carrier.frequency, window)
            path = traces_dir / f"node{tap_id}_t{ci + 1}.csv"
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write("tick,time_s,rf_total,rf_forward,rf_backward,"
                        "demod_amplitude,demod_phase\n")
                for t in range(n_ticks):
                    s = t - window + 1  # sliding result is indexed by window start
                    a = repr(float(amp[s])) if s >= 0 else "nan"
                    p = repr(float(phase[s])) if s >= 0 else "nan"
                    fw, bw = float(fwd[t]), float(bwd[t])
                    f.write(f"{t},{t / fs!r},{fw + bw!r},{fw!r},{bw!r},{a},{p}\n")
            written.append(path)
    return written


def _latency_figures(cfg: ScenarioConfig) -> dict:
    delay = cfg.total_delay / cfg.sample_rate
    window = cfg.window_seconds
    hop = cfg.serial_hop_delay if cfg.serial_hop_delay is not None else window
    wave = arbitration_latency(
        LatencyModel(WAVE_PARALLEL, delay, window, cfg.num_nodes))
    serial = arbitration_latency(
        LatencyModel(SERIAL_DAISY, delay, window, cfg.num_nodes, hop_delay=hop))
    return {
        "end_to_end_delay_s": delay,
        "window_s": window,
        "hop_delay_s": hop,
        "wave_parallel_s": wave,
        "serial_daisy_s": serial,
    }


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.mode:
        cfg = cfg.with_mode(args.mode)
    scenario = cfg.scenario()
    rounds = cfg.rounds.resolve(cfg.num_nodes, seed_override=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    history = ArbitrationHistory(cfg.num_nodes)
    mismatches = 0
    home_errors = 0
    winner_sequence: list[int | None] = []

    with open(out_dir / "rounds.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for rnd, competing_ids in enumerate(rounds, start=1):
            perm = history.permutation  # node id -> rank this round
            competing_ranks = frozenset(perm[i - 1] for i in competing_ids)
            nodes = scenario.nodes(competing_ranks)
            if rnd == 1:
                outcome, trace = run_round(
                    scenario.geometry, scenario.tokens, nodes, scenario.plan,
                    return_trace=True)
                _write_traces(out_dir, trace, scenario.tokens, scenario.plan.window_ticks)
            else:
                outcome = run_round(scenario.geometry, scenario.tokens, nodes, scenario.plan)

            oracle_rank = min(competing_ranks, default=None)
            match = outcome.winner == oracle_rank
            mismatches += 0 if match else 1
            home_errors += 0 if outcome.home_inferred == competing_ranks else 1
            inv = invert_permutation(perm)
            winner_id = inv[outcome.winner - 1] if outcome.winner is not None else None
            winner_sequence.append(winner_id)

            record = outcome.to_record()
            record["round"] = rnd
            record["permutation"] = list(perm)
            record["competing_nodes"] = sorted(competing_ids)
            record["winner_node"] = winner_id
            record["oracle_winner_rank"] = oracle_rank
            record["oracle_match"] = match
            history.record_round(outcome)
            record["waits"] = list(history.waits)
            f.write(json.dumps(record, sort_keys=True) + "\n")

            who = ", ".join(f"node {i}" for i in sorted(competing_ids)) or "nobody"
            won = f"node {winner_id}" if winner_id is not None else "no winner"
            print(f"round {rnd}: {who} competing -> {won}"
                  f"{' [ORACLE MISMATCH]' if not match else ''}")
            if rnd < len(rounds):
                history.reassign_priorities(cfg.policy)

    fairness = history.fairness_report()
    report = {
        "config": cfg.label,
        "mode": cfg.mode,
        "policy": cfg.policy,
        "seed": args.seed if args.seed is not None else cfg.rounds.seed,
        "rounds": len(rounds),
        "oracle_mismatches": mismatches,
        "home_inference_errors": home_errors,
        "winner_sequence": winner_sequence,
        "fairness": {
            "win_counts": list(fairness.win_counts),
            "win_share": list(fairness.win_share),
            "max_wait": fairness.max_wait,
            "jain_index": fairness.jain,
        },
        "latency": _latency_figures(cfg),
    }
    with open(out_dir / "report.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")

    print(f"{len(rounds)} round(s), {mismatches} oracle mismatch(es); "
          f"outputs in {out_dir}")
    return 0 if mismatches == 0 else 2


def cmd_selftest(args: argparse.Namespace) -> int:
    failures = 0
    for name, check in selftest_checks():
        try:
            check()
        except Exception as exc:  # report every failing check, then exit nonzero
            failures += 1
            print(f"FAIL  {name}: {exc}")
        else:
            print(f"ok    {name}")
    if failures:
        print(f"{failures} check(s) failed")
        return 2
    print("all checks passed")
    return 0


def _compare_scenario(k: int, mode: str, window_seconds: float) -> Scenario:
    # Same physical length and window for every k, so only the node count varies.
    return default_scenario(
        k, mode,
        window_seconds=window_seconds,
        window_ticks=_COMPARE_TICKS,
        total_delay=_COMPARE_TICKS,
        label=f"compare-k{k}",
    )


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.mode:
        cfg = cfg.with_mode(args.mode)
    window = cfg.window_seconds
    hop = cfg.serial_hop_delay if cfg.serial_hop_delay is not None else window

    rows = []
    for k in range(2, 9):
        scn = _compare_scenario(k, cfg.mode, window)
        delay = scn.geometry.total_delay / scn.plan.sample_rate
        measured = measure_settle(
            scn.geometry, scn.tokens, scn.nodes(range(1, k + 1)), scn.plan)
        wave = arbitration_latency(LatencyModel(WAVE_PARALLEL, delay, window, k))
        serial = arbitration_latency(
            LatencyModel(SERIAL_DAISY, delay, window, k, hop_delay=hop))
        rows.append((k, measured, wave, serial))

    print(f"arbitration latency, all nodes competing ({cfg.mode} mode)")
    print(f"{'k':>2}  {'wave measured':>14}  {'wave model 2D+T':>16}  {'serial k*h+2D':>14}")
    for k, measured, wave, serial in rows:
        print(f"{k:>2}  {measured:>14.4e}  {wave:>16.4e}  {serial:>14.4e}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "latency_compare.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("k,wave_measured_s,wave_model_s,serial_model_s\n")
        for k, measured, wave, serial in rows:
            f.write(f"{k},{measured!r},{wave!r},{serial!r}\n")
    print(f"wrote {path}")
    return 0


class _Parser(argparse.ArgumentParser):
    # Argparse's default error path exits with status 2; route flag mistakes
    # through the package's validation-error exit code instead.
    def error(self, message: str) -> "None":
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavebus", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="execute a scenario config and write outputs")
    run.add_argument("--config", required=True, help="config path or bundled config name")
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--seed", type=int, default=None,
                     help="override the round-schedule seed from the config")
    run.add_argument("--mode", choices=MODES, default=None,
                     help="override the fidelity mode from the config")
    run.set_defaults(func=cmd_run)

    selftest = sub.add_parser("selftest", help="run the built-in property checks")
    selftest.set_defaults(func=cmd_selftest)

    compare = sub.add_parser("compare", help="wave vs serial latency table for k=2..8")
    compare.add_argument("--config", default="paper_fig4_ideal.cfg",
                         help="config supplying window/hop-delay (default: bundled ideal)")
    compare.add_argument("--out", default="out", help="output directory (default: out)")
    compare.add_argument("--mode", choices=MODES, default=None,
                         help="override the fidelity mode from the config")
    compare.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_help()
            return 1
        return args.func(args)
    except WavebusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
