"""Trust matrix, teaching phase and trust-gated strategy adoption."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .agent import Action, StateKey
from .lexicon import END_MARKER, STRATEGY_MARKER, ListenerModel, Message, Vocabulary, encode


@dataclass(frozen=True)
class TrustParams:
    beta_pos: float = 0.1
    beta_neg: float = 0.05
    tau_init: float = 0.5
    adopt_threshold: float = 0.7
    window: int = 5

    def __post_init__(self):
        if not self.beta_pos > self.beta_neg > 0:
            raise ValueError("need beta_pos > beta_neg > 0")
        if not 0 < self.adopt_threshold < 1 or not 0 < self.tau_init < 1:
            raise ValueError("thresholds must lie in (0, 1)")


class TrustMatrix:
    """Dense N x N trust scores; ``tau[i, j]`` is i's trust in j."""

    def __init__(self, n_agents: int, tau_init: float = 0.5):
        self.tau = np.full((n_agents, n_agents), float(tau_init))
        np.fill_diagonal(self.tau, np.nan)

    @property
    def n(self) -> int:
        return self.tau.shape[0]

    def row(self, i: int) -> dict[int, float]:
        return {j: float(self.tau[i, j]) for j in range(self.n) if j != i}

    def off_diagonal(self) -> np.ndarray:
        return self.tau[~np.eye(self.n, dtype=bool)]

    def mean(self) -> float:
        return float(self.off_diagonal().mean())


def recent_mean(history: Sequence[float], window: int) -> float:
    recent = history[-window:]
    return sum(recent) / len(recent) if recent else 0.0


def update_trust(
    tau: float, teacher_reward: float, learner_recent_mean: float, params: TrustParams = TrustParams()
) -> float:
    if teacher_reward > learner_recent_mean:
        new = min(1.0, tau + params.beta_pos)
    else:
        new = max(0.0, tau - params.beta_neg)
    # keep repeated +-0.05 steps on a decimal grid so gates like "> 0.7" are exact
    return round(new, 10)


def should_teach(episode_reward: float, recent_rewards: Sequence[float]) -> bool:
    history = list(recent_rewards)[-10:]
    if not history:
        return False
    return episode_reward > sum(history) / len(history)


class StrategyEntry(NamedTuple):
    action: Action
    observed_reward: float
    adopted_at: int


class TeachingEntry(NamedTuple):
    state: StateKey
    action: Action
    observed_reward: float
    concepts: tuple  # proposal concepts the strategy produced


@dataclass
class Teaching:
    teacher: int
    entries: list[TeachingEntry]
    encoded: Message
    spans: list[tuple[int, int]] = field(default_factory=list)


class TraceStep(NamedTuple):
    state: StateKey
    action: Action
    reward: float
    concepts: tuple = ()


def build_teaching(episode_trace: Sequence[TraceStep], vocab: Vocabulary) -> Teaching:
    """Encode the teacher's two best rounds of the episode.

    The message is ``STRATEGY c1 c2 ... STRATEGY c1 ... END``; the two
    framing markers are reserved entries of the teacher's own vocabulary.
    """
    if not episode_trace:
        raise ValueError("empty trace")
    ranked = sorted(range(len(episode_trace)), key=lambda k: (-episode_trace[k].reward, k))
    entries = []
    symbols: list[str] = []
    spans = []
    for k in ranked[:2]:
        step = episode_trace[k]
        entries.append(TeachingEntry(step.state, step.action, step.reward, tuple(step.concepts)))
        symbols.append(encode(vocab, STRATEGY_MARKER)[0])
        start = len(symbols)
        symbols.extend(encode(vocab, c)[0] for c in step.concepts)
        spans.append((start, len(symbols)))
    symbols.append(encode(vocab, END_MARKER)[0])
    return Teaching(vocab.owner, entries, Message(vocab.owner, symbols), spans)


def decode_teaching(model: ListenerModel, teaching: Teaching) -> list[TeachingEntry]:
    """Entries whose concept symbols the listener can read; the rest are dropped."""
    known = model.known.get(teaching.teacher, {})
    readable = []
    for entry, (a, b) in zip(teaching.entries, teaching.spans):
        if all(s in known for s in teaching.encoded.symbols[a:b]):
            readable.append(entry)
    return readable


@dataclass
class StrategyStore:
    """Strategies a learner has adopted, keyed by teacher then state."""

    by_teacher: dict = field(default_factory=dict)

    def lookup(self, teacher: int, state: StateKey) -> Optional[StrategyEntry]:
        return self.by_teacher.get(teacher, {}).get(state)

    def merge(self, teacher: int, entries, episode: int) -> None:
        table = self.by_teacher.setdefault(teacher, {})
        for e in entries:
            table[e.state] = StrategyEntry(e.action, e.observed_reward, episode)

    def __len__(self) -> int:
        return sum(len(t) for t in self.by_teacher.values())


@dataclass
class AdoptionEvent:
    learner: int
    teacher: int
    episode: int
    tau_at_adoption: float
    learner_reward_before: float
    learner_reward_after: Optional[float] = None


def consider_adoption(
    store: StrategyStore,
    teaching_entries: Sequence[TeachingEntry],
    tau: float,
    teacher_reward: float,
    learner_recent_mean: float,
    params: TrustParams,
    episode: int,
    learner: int = -1,
    teacher: int = -1,
    gate: Optional[bool] = None,
) -> tuple[StrategyStore, Optional[AdoptionEvent]]:
    """Merge a decoded teaching when the teacher outperforms and is trusted.

    ``gate`` overrides the trust test (the random-trust baseline passes a
    coin flip here); the performance test always applies.
    """
    trusted = tau > params.adopt_threshold if gate is None else gate
    if not (teacher_reward > learner_recent_mean and trusted and teaching_entries):
        return store, None
    store.merge(teacher, teaching_entries, episode)
    return store, AdoptionEvent(learner, teacher, episode, tau, learner_recent_mean)


def _high_trust_edges(tau: np.ndarray, threshold: float):
    n = tau.shape[0]
    return {
        (i, j)
        for i, j in combinations(range(n), 2)
        if tau[i, j] > threshold and tau[j, i] > threshold
    }


def network_density(tau, threshold: float = 0.7) -> float:
    tau = np.asarray(getattr(tau, "tau", tau), dtype=float)
    mask = ~np.eye(tau.shape[0], dtype=bool)
    off = tau[mask]
    return float((off > threshold).mean()) if off.size else 0.0


def network_transitivity(tau, threshold: float = 0.7) -> float:
    """Global clustering coefficient of the mutual high-trust graph."""
    tau = np.asarray(getattr(tau, "tau", tau), dtype=float)
    n = tau.shape[0]
    edges = _high_trust_edges(tau, threshold)
    nbrs = {i: set() for i in range(n)}
    for i, j in edges:
        nbrs[i].add(j)
        nbrs[j].add(i)
    triplets = sum(len(v) * (len(v) - 1) // 2 for v in nbrs.values())
    if triplets == 0:
        return 0.0
    triangles = sum(
        1 for a, b, c in combinations(range(n), 3)
        if b in nbrs[a] and c in nbrs[a] and c in nbrs[b]
    )
    return 3 * triangles / triplets
