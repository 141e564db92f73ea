"""Priority policies over many rounds: static vs rotate vs longest-wait-first.

Whoever holds rank 1 wins every contested round, so the interesting question
is how ranks move between rounds.  This script replays the same random
12-round competition schedule under all three bundled policies and compares
win counts, the longest dry spell, and the Jain fairness index.
"""

from wavebus import (
    IDEAL,
    ArbitrationHistory,
    RoundsSpec,
    invert_permutation,
    reference_scenario,
    run_round,
)

scn = reference_scenario(IDEAL)
schedule = RoundsSpec.from_json({"probability": 0.7, "count": 12, "seed": 7}).resolve(3)
print("schedule (node ids competing each round):")
print("  " + "  ".join(f"r{i + 1}:{sorted(ids) if ids else '-'}"
                       for i, ids in enumerate(schedule)))
print()

for policy in ("static", "rotate", "longest_wait_first"):
    history = ArbitrationHistory(3)
    winners = []
    for rnd, node_ids in enumerate(schedule):
        perm = history.permutation  # node id -> rank held this round
        ranks = frozenset(perm[i - 1] for i in node_ids)
        outcome = run_round(scn.geometry, scn.tokens, scn.nodes(ranks), scn.plan)
        inv = invert_permutation(perm)
        winners.append(inv[outcome.winner - 1] if outcome.winner else None)
        history.record_round(outcome)
        if rnd < len(schedule) - 1:
            history.reassign_priorities(policy)
    report = history.fairness_report()
    seq = " ".join(str(w) if w else "-" for w in winners)
    print(f"{policy:>18}: winners {seq}")
    print(f"{'':>18}  wins per node {list(report.win_counts)}, "
          f"longest wait {report.max_wait}, jain {report.jain:.3f}")

print("\nstatic lets the node holding rank 1 monopolize the bus whenever it shows")
print("up (11 of 12 wins).  rotation and longest-wait-first both cap the dry")
print("spell at 2 rounds; with node 1 competing in 10 of 12 rounds an even split")
print("is out of reach, and both land at the same Jain score on this schedule.")
