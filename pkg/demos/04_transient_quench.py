"""Transient mode: watch a token get detected, captured, and quenched live.

Ideal mode lets every node start its capture exactly when its token arrives.
Transient mode makes nodes earn it: a sliding demodulation window has to fill
before a token is detectable, then a detection latency passes before the
capture wave starts.  This script plots (in ASCII) the token-1 amplitude that
node 2 sees tick by tick: up when the token arrives, down when node 1's
capture finally propagates past.
"""

from wavebus import TRANSIENT, Waveform, reference_scenario, run_round, sliding_demodulate_iq

scn = reference_scenario(TRANSIENT)
plan, tokens = scn.plan, scn.tokens
window = plan.window_ticks
amp = tokens.token_amplitude

outcome, trace = run_round(
    scn.geometry, tokens, scn.nodes({1, 2, 3}), plan, return_trace=True)
print(f"winner rank: {outcome.winner}")
print(f"capture onsets (tick each node's emission started): "
      f"{ {i: t for i, t in sorted(trace.onsets.items())} }")
print(f"window {window} ticks, detection latency {plan.detection_latency} ticks\n")

f1 = tokens.carriers[0].frequency
col = trace.column(2)
series, _ = sliding_demodulate_iq(Waveform(plan.sample_rate, trace.forward[:, col]), f1, window)

print("token-1 amplitude at node 2's tap (sliding window, one row per 4 ticks):")
print("tick  amplitude")
for s in range(0, len(series), 4):
    tick = s + window - 1      # tick at which this window completes
    bar = "#" * int(round(40 * series[s] / (1.1 * amp)))
    marker = ""
    if s == 0:
        marker = "  <- first full window"
    print(f"{tick:5d}  {series[s]:6.3f} {bar}{marker}")

quench = next(s for s in range(len(series)) if max(series[s:]) < 0.05 * amp)
print(f"\nfirst window fully under 0.05 x amplitude completes at tick {quench + window - 1}")
print(f"(capture started at node 1 on tick {trace.onsets[1]}, "
      f"plus {scn.geometry.taps[1][1] - scn.geometry.taps[0][1]} ticks of travel, "
      f"plus one window to flush the demodulator)")
