"""Per-agent learning: goals, tabular Q-learning, action selection, proposals."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .env import ChangeEvent, ChangeKind, EnvConfig, PoolState, Proposal
from .lexicon import Concept, Intent, MAX_QTY


class Action(enum.IntEnum):
    # IntEnum order doubles as the argmax tie-break order
    AGGRESSIVE = 0
    COOPERATIVE = 1
    BALANCED = 2


ACTIONS = tuple(Action)


class Source(enum.Enum):
    TRUSTED_PEER = "TRUSTED_PEER"
    EXPLOIT = "EXPLOIT"
    EXPLORE = "EXPLORE"


class Level(enum.IntEnum):
    LOW = 0
    MED = 1
    HIGH = 2


@dataclass(frozen=True)
class LearningParams:
    alpha: float = 0.143
    gamma: float = 0.9
    epsilon_start: float = 0.3
    epsilon_end: float = 0.05
    epsilon_decay_episodes: int = 60
    q_max: float = 30.0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must be in [0, 1)")
        if not 0 <= self.epsilon_end <= self.epsilon_start <= 1:
            raise ValueError("need 0 <= epsilon_end <= epsilon_start <= 1")

    def epsilon(self, episode: int) -> float:
        """Linear decay from ``epsilon_start`` at episode 1 to ``epsilon_end``."""
        if self.epsilon_decay_episodes <= 0:
            return self.epsilon_end
        frac = min(1.0, max(0, episode - 1) / self.epsilon_decay_episodes)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)


@dataclass(frozen=True)
class AdaptationParams:
    lambda_env: float = 0.7
    lambda_peer: float = 0.8
    peer_threshold: float = 1.5

    def __post_init__(self):
        if not (0 < self.lambda_env <= 1 and 0 < self.lambda_peer <= 1):
            raise ValueError("lambdas must be in (0, 1]")
        if self.peer_threshold <= 1:
            raise ValueError("peer_threshold must exceed 1")


class StateKey(NamedTuple):
    levels: tuple[Level, ...]
    round: int


def state_key(pool: PoolState, quantities: Sequence[int]) -> StateKey:
    levels = []
    for rem, q in zip(pool.remaining, quantities):
        # integer compare avoids float edges at exactly 1/3 and 2/3
        if 3 * rem < q:
            levels.append(Level.LOW)
        elif 3 * rem < 2 * q:
            levels.append(Level.MED)
        else:
            levels.append(Level.HIGH)
    return StateKey(tuple(levels), pool.round)


@dataclass
class QTable:
    q_max: float = 30.0
    table: dict = field(default_factory=dict)

    def get(self, state: StateKey, action: Action) -> float:
        return self.table.get((state, action), self.q_max)

    def values(self, state: StateKey) -> list[float]:
        return [self.table.get((state, a), self.q_max) for a in ACTIONS]

    def best_action(self, state: StateKey) -> Action:
        vals = self.values(state)
        return ACTIONS[vals.index(max(vals))]

    def max_value(self, state: Optional[StateKey]) -> float:
        if state is None:
            return 0.0
        return max(self.values(state))


def sample_goals(config: EnvConfig, rng: np.random.Generator) -> list[int]:
    lo, hi = config.goal_value_range
    return [int(v) for v in rng.integers(lo, hi + 1, size=config.n_items)]


def select_action(
    q: QTable,
    state: StateKey,
    trust_row: dict[int, float],
    observed,
    episode: int,
    rng: np.random.Generator,
    params: LearningParams = LearningParams(),
    trust_gate: float = 0.7,
) -> tuple[Action, Source]:
    """Three-tier choice: trusted peer's strategy, greedy Q, or exploration.

    ``trust_row`` maps peer index to trust; ``observed`` is the agent's
    :class:`~tslec.social.StrategyStore` (anything with ``lookup``).
    """
    eps = params.epsilon(episode)
    if trust_row:
        peer = max(trust_row, key=lambda j: (trust_row[j], -j))
        if trust_row[peer] > trust_gate and rng.random() > eps:
            entry = observed.lookup(peer, state) if observed is not None else None
            if entry is not None:
                return entry.action, Source.TRUSTED_PEER
    if rng.random() < 1.0 - eps:
        return q.best_action(state), Source.EXPLOIT
    return ACTIONS[int(rng.integers(len(ACTIONS)))], Source.EXPLORE


def _ranked_items(goals: Sequence[int], remaining: Sequence[int]) -> list[int]:
    avail = [j for j, r in enumerate(remaining) if r > 0]
    return sorted(avail, key=lambda j: (-goals[j], j))


def generate_proposal(
    action: Action, goals: Sequence[int], pool: PoolState, rng=None, proposer: int = 0
) -> Proposal:
    """Turn a negotiation style into concrete proposal lines.

    Concession size grows with the round: OFFER and REQUEST lines carry
    ``min(round, remaining)`` units, so a first-round cooperative move asks
    for a single unit and a last-round one concedes up to three.
    """
    rem = pool.remaining
    top_first = _ranked_items(goals, rem)
    if not top_first:
        return Proposal(proposer, [Concept(Intent.DEMAND, 0, 1)])
    top = top_first[0]
    bottom = min(top_first, key=lambda j: (goals[j], j))
    step = max(1, min(MAX_QTY, pool.round))

    if action is Action.AGGRESSIVE:
        lines = [Concept(Intent.DEMAND, j, min(MAX_QTY, rem[j])) for j in top_first[:2]]
    elif action is Action.COOPERATIVE:
        lines = [
            Concept(Intent.OFFER, bottom, min(step, rem[bottom])),
            Concept(Intent.REQUEST, top, min(step, rem[top])),
        ]
    else:
        lines = [
            Concept(Intent.DEMAND, top, min(2, rem[top])),
            Concept(Intent.OFFER, bottom, min(step, rem[bottom])),
        ]
    return Proposal(proposer, lines)


def q_update(
    q: QTable,
    state: StateKey,
    action: Action,
    reward: float,
    next_state: Optional[StateKey],
    params: LearningParams,
) -> QTable:
    """One-step Q-learning; ``next_state=None`` marks the terminal round."""
    target = reward + params.gamma * q.max_value(next_state)
    old = q.get(state, action)
    q.table[(state, action)] = (1.0 - params.alpha) * old + params.alpha * target
    return q


def _blend(old: int, new_value: float, lam: float) -> int:
    # tiny epsilon keeps exact-integer results from flooring one below
    return int(math.floor(lam * old + (1.0 - lam) * new_value + 1e-9))


def adapt_goals_env(
    goals: Sequence[int], event: Optional[ChangeEvent], params: AdaptationParams
) -> list[int]:
    out = list(goals)
    if event is not None and event.kind is ChangeKind.VALUE_SHIFT:
        out[event.item] = _blend(out[event.item], event.new_value, params.lambda_env)
    return out


def adapt_goals_peer(
    goals: Sequence[int],
    best_peer_goals: Sequence[int],
    own_recent_mean: float,
    best_peer_reward: float,
    params: AdaptationParams,
) -> list[int]:
    if own_recent_mean <= 0 or not best_peer_reward > params.peer_threshold * own_recent_mean:
        return list(goals)
    return [_blend(g, p, params.lambda_peer) for g, p in zip(goals, best_peer_goals)]
