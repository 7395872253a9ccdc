"""Negotiation environment: item pool, proposal scoring and allocation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .lexicon import Concept, Intent, MAX_QTY

NO_WINNER = -1


@dataclass(frozen=True)
class EnvConfig:
    n_agents: int = 4
    n_items: int = 5
    quantities: tuple[int, ...] = (4, 3, 2, 3, 2)
    rounds_per_episode: int = 3
    episodes: int = 100
    change_interval: int = 25
    goal_value_range: tuple[int, int] = (1, 6)
    shift_value_range: tuple[int, int] = (7, 10)
    request_weight: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "quantities", tuple(int(q) for q in self.quantities))
        object.__setattr__(self, "goal_value_range", tuple(self.goal_value_range))
        object.__setattr__(self, "shift_value_range", tuple(self.shift_value_range))
        for name in ("n_agents", "n_items", "rounds_per_episode", "episodes", "change_interval"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if len(self.quantities) != self.n_items:
            raise ValueError("quantities must have n_items entries")
        if min(self.quantities) < 1:
            raise ValueError("quantities must all be >= 1")
        if self.request_weight < 0:
            raise ValueError("request_weight must be >= 0")
        for name in ("goal_value_range", "shift_value_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty")


@dataclass
class PoolState:
    remaining: list[int]
    round: int = 1


class ChangeKind(enum.Enum):
    VALUE_SHIFT = "VALUE_SHIFT"
    SCARCITY = "SCARCITY"
    ABUNDANCE = "ABUNDANCE"


CHANGE_KINDS = (ChangeKind.VALUE_SHIFT, ChangeKind.SCARCITY, ChangeKind.ABUNDANCE)


@dataclass(frozen=True)
class ChangeEvent:
    kind: ChangeKind
    item: int
    new_value: Optional[int] = None


@dataclass
class Proposal:
    proposer: int
    lines: list[Concept] = field(default_factory=list)

    def __post_init__(self):
        if not self.lines:
            raise ValueError("proposal needs at least one line")
        for line in self.lines:
            if not 1 <= line.qty <= MAX_QTY:
                raise ValueError(f"qty out of range in {line}")


def reset_episode(config: EnvConfig, rng=None) -> PoolState:
    return PoolState(list(config.quantities), 1)


def sample_change(episode: int, rng: np.random.Generator, config: EnvConfig = EnvConfig()) -> Optional[ChangeEvent]:
    if episode < 1:
        raise ValueError("episodes are 1-based")
    if episode % config.change_interval:
        return None
    kind = CHANGE_KINDS[int(rng.integers(3))]
    item = int(rng.integers(config.n_items))
    if kind is ChangeKind.VALUE_SHIFT:
        lo, hi = config.shift_value_range
        return ChangeEvent(kind, item, int(rng.integers(lo, hi + 1)))
    return ChangeEvent(kind, item)


def apply_change(config: EnvConfig, event: ChangeEvent) -> EnvConfig:
    q = list(config.quantities)
    if event.kind is ChangeKind.SCARCITY:
        q[event.item] = math.ceil(q[event.item] / 2)
    elif event.kind is ChangeKind.ABUNDANCE:
        q[event.item] = 2 * q[event.item]
    else:
        return config
    return replace(config, quantities=tuple(q))


def utility(goals: Sequence[int], allocation: Sequence[int]) -> int:
    if len(goals) != len(allocation):
        raise ValueError("goal and allocation lengths differ")
    return sum(g * x for g, x in zip(goals, allocation))


def score_lines(lines, scorer_goals: Sequence[int], remaining: Sequence[int], request_weight: float = 0.5) -> float:
    """Score decoded lines from one peer's point of view.

    OFFERs add the scorer's value of the offered units, DEMANDs subtract the
    value of what would leave the pool, REQUESTs subtract ``request_weight``
    of that.  Lines the scorer could not decode (``None``) contribute nothing.
    """
    total = 0.0
    for line in lines:
        if line is None:
            continue
        w = scorer_goals[line.item]
        if line.intent is Intent.OFFER:
            total += w * line.qty
        elif line.intent is Intent.DEMAND:
            total -= w * min(line.qty, remaining[line.item])
        else:
            total -= request_weight * w * min(line.qty, remaining[line.item])
    return total


def _execute(proposal: Proposal, pool: PoolState, n_agents: int, blocked=frozenset()):
    allocs = [[0] * len(pool.remaining) for _ in range(n_agents)]
    for line in proposal.lines:
        if line.intent is Intent.OFFER or line.item in blocked:
            continue
        take = min(line.qty, pool.remaining[line.item])
        allocs[proposal.proposer][line.item] += take
        pool.remaining[line.item] -= take
    return allocs


def evaluate_and_allocate(
    proposals: Sequence[Proposal],
    pool: PoolState,
    goals: Sequence[Sequence[int]],
    comm_enabled: bool,
    rng: np.random.Generator,
    views: Optional[Mapping[tuple[int, int], list]] = None,
    request_weight: float = 0.5,
):
    """Pick one winning proposal for the round and execute it on ``pool``.

    With communication, every agent scores each other agent's proposal
    through its decoded view (``views[(scorer, proposer)]``, defaulting to
    the true lines) and the highest total wins; ties go to the lowest
    proposer index.  Without communication a proposal is drawn uniformly,
    and any item another agent also claimed this round is left in the pool:
    nobody could negotiate who gets it.

    ``pool.remaining`` is decremented in place.  Returns per-agent
    allocation vectors and the winner (``NO_WINNER`` for no proposals).
    """
    n_agents = len(goals)
    if not proposals:
        return [[0] * len(pool.remaining) for _ in range(n_agents)], NO_WINNER

    if comm_enabled:
        best, best_score = None, -math.inf
        for p in sorted(proposals, key=lambda p: p.proposer):
            scores = []
            for scorer in range(n_agents):
                if scorer == p.proposer:
                    continue
                lines = views.get((scorer, p.proposer), p.lines) if views else p.lines
                scores.append(score_lines(lines, goals[scorer], pool.remaining, request_weight))
            score = sum(scores)
            if score > best_score + 1e-12:
                best, best_score = p, score
        return _execute(best, pool, n_agents), best.proposer

    chosen = proposals[int(rng.integers(len(proposals)))]
    claimed = {}
    for p in proposals:
        for line in p.lines:
            if line.intent is not Intent.OFFER:
                claimed.setdefault(line.item, set()).add(p.proposer)
    blocked = frozenset(
        item for item, who in claimed.items() if who - {chosen.proposer}
    )
    return _execute(chosen, pool, n_agents, blocked), chosen.proposer
