"""Round accounting, priority re-assignment policies, and fairness metrics.

The protocol layer works in priority-rank space (rank 1 sits nearest home and
always beats rank 2, and so on).  Persistent node identity lives here: a
permutation maps node ids to the ranks they hold for the next round, and
re-prioritizing a node means handing it a different rank.  Carriers never
move; carrier i is forever bound to rank i.

Permutations are 1-based tuples: ``perm[node_id - 1]`` is the rank node_id
holds.  ``(3, 1, 2)`` means node 1 holds rank 3, node 2 rank 1, node 3 rank 2.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError, UsageError
from .protocol import RoundOutcome


def identity_permutation(k: int) -> tuple[int, ...]:
    return tuple(range(1, k + 1))


def invert_permutation(perm: tuple[int, ...]) -> tuple[int, ...]:
    """rank -> node id (index rank-1 holds the id owning that rank)."""
    inv = [0] * len(perm)
    for node_id, rank in enumerate(perm, start=1):
        inv[rank - 1] = node_id
    return tuple(inv)


def _check_permutation(perm: tuple[int, ...], k: int) -> None:
    if sorted(perm) != list(range(1, k + 1)):
        raise ConfigurationError(f"not a permutation of 1..{k}: {perm}")


def jain_index(counts) -> float:
    """Jain fairness of a non-negative allocation vector; 1.0 means equal."""
    total = float(sum(counts))
    if total == 0.0:
        return 1.0
    return total * total / (len(counts) * float(sum(c * c for c in counts)))


@dataclass(frozen=True)
class ArbitrationRecord:
    """One settled round: who competed, who won, counters, permutation in force."""

    round_number: int
    truth_competing: frozenset[int]  # node ids
    winner: int | None  # node id
    waits: tuple[int, ...]  # per node id, after this round's update
    permutation: tuple[int, ...]  # node id -> rank, as run


@dataclass(frozen=True)
class FairnessReport:
    rounds: int
    win_counts: tuple[int, ...]
    win_share: tuple[float, ...]
    max_wait: int
    jain: float


class ArbitrationHistory:
    """Single-owner accumulator of round results for one node population.

    Wait counters track consecutive losses while competing; a win or a
    round sat out resets the counter to zero.
    """

    def __init__(self, num_nodes: int) -> None:
        if num_nodes < 1:
            raise ConfigurationError(f"need at least one node, got {num_nodes}")
        self.num_nodes = num_nodes
        self.records: list[ArbitrationRecord] = []
        self.waits = [0] * num_nodes
        self.win_counts = [0] * num_nodes
        self.permutation = identity_permutation(num_nodes)

    def record_round(self, outcome: RoundOutcome) -> "ArbitrationHistory":
        """Fold one rank-space outcome into id-space counters."""
        inv = invert_permutation(self.permutation)
        try:
            truth_ids = {inv[r - 1] for r in outcome.truth_competing}
            winner_id = inv[outcome.winner - 1] if outcome.winner is not None else None
        except IndexError:
            raise UsageError(
                f"outcome ranks {sorted(outcome.truth_competing)} do not fit a "
                f"{self.num_nodes}-node history"
            ) from None
        for node_id in range(1, self.num_nodes + 1):
            if node_id == winner_id:
                self.waits[node_id - 1] = 0
                self.win_counts[node_id - 1] += 1
            elif node_id in truth_ids:
                self.waits[node_id - 1] += 1
            else:
                self.waits[node_id - 1] = 0
        self.records.append(
            ArbitrationRecord(
                round_number=len(self.records) + 1,
                truth_competing=frozenset(truth_ids),
                winner=winner_id,
                waits=tuple(self.waits),
                permutation=self.permutation,
            )
        )
        return self

    def reassign_priorities(self, policy: str) -> tuple[int, ...]:
        """Compute and install the node->rank permutation for the next round."""
        try:
            fn = POLICIES[policy]
        except KeyError:
            raise ConfigurationError(
                f"unknown policy {policy!r}; known: {sorted(POLICIES)}"
            ) from None
        if policy != "static" and not self.records:
            raise UsageError(f"policy {policy!r} needs at least one recorded round")
        perm = fn(self)
        _check_permutation(perm, self.num_nodes)
        self.permutation = perm
        return perm

    def fairness_report(self) -> FairnessReport:
        if not self.records:
            raise UsageError("fairness report needs at least one recorded round")
        rounds = len(self.records)
        max_wait = max((max(r.waits) for r in self.records), default=0)
        return FairnessReport(
            rounds=rounds,
            win_counts=tuple(self.win_counts),
            win_share=tuple(w / rounds for w in self.win_counts),
            max_wait=max_wait,
            jain=jain_index(self.win_counts),
        )


def _policy_static(history: ArbitrationHistory) -> tuple[int, ...]:
    return identity_permutation(history.num_nodes)


def _policy_rotate(history: ArbitrationHistory) -> tuple[int, ...]:
    # Everyone moves up one rank; the current top wraps to the bottom.
    k = history.num_nodes
    return tuple(k if r == 1 else r - 1 for r in history.permutation)


def _policy_longest_wait_first(history: ArbitrationHistory) -> tuple[int, ...]:
    # Rank by descending wait; ties keep current rank order (stable sort).
    k = history.num_nodes
    order = sorted(
        range(1, k + 1),
        key=lambda node_id: (-history.waits[node_id - 1], history.permutation[node_id - 1]),
    )
    perm = [0] * k
    for rank, node_id in enumerate(order, start=1):
        perm[node_id - 1] = rank
    return tuple(perm)


POLICIES = {
    "static": _policy_static,
    "rotate": _policy_rotate,
    "longest_wait_first": _policy_longest_wait_first,
}
