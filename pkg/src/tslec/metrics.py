"""Run records and every metric derived from them.

All functions here are pure: the same :class:`RunRecord` always yields the
same :class:`MetricsReport`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .lexicon import Vocabulary, concept_space
from .social import AdoptionEvent, network_density, network_transitivity

import numpy as np

FINAL_WINDOW = 10


@dataclass
class RunRecord:
    condition: str
    seed: int
    n_agents: int
    n_items: int
    rewards: list = field(default_factory=list)  # [episode][agent]
    vocab_sizes: list = field(default_factory=list)  # [episode][agent]
    trust: list = field(default_factory=list)  # [episode] -> N x N, None on diagonal
    phi: list = field(default_factory=list)  # [episode] -> N x N or None without communication
    goals: list = field(default_factory=list)  # [episode][agent] goals used that episode
    rounds: list = field(default_factory=list)  # [episode] -> [{"winner", "allocations", "actions", "sources"}]
    changes: list = field(default_factory=list)  # [{"episode", "kind", "item", "new_value"}]
    teachings: list = field(default_factory=list)  # [episode] -> teacher indices
    adaptations: list = field(default_factory=list)  # [episode] -> agents whose goals adapted
    events: list = field(default_factory=list)  # AdoptionEvent
    vocabularies: list = field(default_factory=list)  # final Vocabulary per agent
    usage: list = field(default_factory=list)  # per agent {symbol: count}

    @property
    def episodes(self) -> int:
        return len(self.rewards)

    @property
    def reward_mean(self) -> list[float]:
        return [sum(r) / len(r) for r in self.rewards]

    def final_performance(self, window: int = FINAL_WINDOW) -> float:
        series = self.reward_mean[-window:]
        return sum(series) / len(series)

    def trust_mean(self) -> list[float]:
        return [_mean_offdiag(m) for m in self.trust]

    def phi_mean(self) -> list[Optional[float]]:
        return [None if m is None else _mean_offdiag(m) for m in self.phi]

    def vocab_mean(self) -> list[float]:
        return [sum(v) / len(v) for v in self.vocab_sizes]

    def change_episodes(self) -> list[int]:
        return [c["episode"] for c in self.changes]


def _mean_offdiag(m) -> float:
    vals = [v for i, row in enumerate(m) for j, v in enumerate(row) if i != j and v is not None]
    return sum(vals) / len(vals) if vals else float("nan")


# --- sample efficiency -------------------------------------------------------

def trailing_mean(series: Sequence[float], window: int) -> list[float]:
    out = []
    acc = 0.0
    for k, x in enumerate(series):
        acc += x
        if k >= window:
            acc -= series[k - window]
        out.append(acc / min(k + 1, window))
    return out


def episodes_to_90(rewards: Sequence[float], smooth_window: int = 10) -> int:
    """First 1-based episode whose trailing mean reaches 90% of final performance."""
    n = len(rewards)
    if n == 0:
        raise ValueError("empty reward series")
    final = sum(rewards[-smooth_window:]) / len(rewards[-smooth_window:])
    threshold = 0.9 * final
    for k, v in enumerate(trailing_mean(rewards, smooth_window)):
        if v >= threshold - 1e-12:
            return k + 1
    return n


def auc(rewards: Sequence[float]) -> float:
    return math.fsum(rewards)


# --- linguistic properties ---------------------------------------------------

def vocabulary_entropy(usage_counts: dict) -> float:
    """Shannon entropy (bits) of symbol usage frequencies."""
    counts = sorted(c for c in usage_counts.values() if c > 0)
    total = sum(counts)
    if total <= 0:
        raise ValueError("no symbol usage")
    # sorted fsum keeps the result independent of dict order
    return max(0.0, -math.fsum(c / total * math.log2(c / total) for c in counts))


def compression_ratio(entropy_bits: float) -> float:
    if entropy_bits < 0:
        raise ValueError("entropy must be non-negative")
    return entropy_bits / 8.0


def _lcp(a: str, b: str) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


def _stripped(vocab: Vocabulary) -> dict:
    prefix_len = len(f"@{vocab.owner}")
    return {c: vocab.map[c][prefix_len:] for c in vocab.concepts}


def compositionality_contrast(stripped: dict) -> float:
    """Unclamped contrast between component-sharing and unrelated concept pairs.

    ``stripped`` maps concepts to their symbol text without the owner prefix.
    """
    shared, unrelated = [], []
    for (c1, s1), (c2, s2) in combinations(stripped.items(), 2):
        sim = _lcp(s1, s2) / max(len(s1), len(s2))
        if c1.intent == c2.intent or c1.item == c2.item or c1.qty == c2.qty:
            shared.append(sim)
        else:
            unrelated.append(sim)
    if not shared or not unrelated:
        return 0.0
    return sum(shared) / len(shared) - sum(unrelated) / len(unrelated)


def compositionality(vocab: Vocabulary) -> float:
    if len(vocab.concepts) < 2:
        return 0.0
    return min(1.0, max(0.0, compositionality_contrast(_stripped(vocab))))


def vocab_prefix(vocab: Vocabulary, size: int) -> Vocabulary:
    """Vocabulary as it stood when it had ``size`` entries (vocabularies only grow)."""
    v = Vocabulary(vocab.owner)
    for entry in vocab.creation_order[:size]:
        s = vocab.map[entry]
        v.map[entry] = s
        v.creation_order.append(entry)
        v._inverse[s] = entry
    return v


def coverage(vocab: Vocabulary, n_items: int) -> float:
    return len(vocab.concepts) / len(concept_space(n_items))


# --- adaptation --------------------------------------------------------------

@dataclass
class Stability:
    phi_before: float
    phi_after: float
    ratio: float


def change_windows(n: int, change_episodes: Sequence[int], width: int = 5):
    """(before, after) 0-based index ranges around each usable change episode."""
    out = []
    for c in change_episodes:
        before = range(c - 1 - width, c - 1)
        after = range(c - 1, c - 1 + width)
        if before.start >= 0 and after.stop <= n:
            out.append((before, after))
    return out


def stability(phi_series: Sequence[Optional[float]], change_episodes: Sequence[int], width: int = 5) -> Optional[Stability]:
    """Pooled decoding accuracy in the 5 episodes before vs from each change."""
    before, after = [], []
    for b, a in change_windows(len(phi_series), change_episodes, width):
        before.extend(phi_series[k] for k in b)
        after.extend(phi_series[k] for k in a)
    if not before or any(v is None for v in before + after):
        return None
    pb = sum(before) / len(before)
    pa = sum(after) / len(after)
    return Stability(pb, pa, pa / pb if pb > 0 else 0.0)


def recovery_episodes(phi_series, change_episode: int, width: int = 5, tol: float = 0.02) -> Optional[int]:
    """Episodes after a change until decoding accuracy is back near its pre-change level.

    0 means no dip beyond ``tol``; ``None`` means no recovery inside the
    series or no usable pre-change window.
    """
    c = change_episode - 1
    if c - width < 0:
        return None
    base = sum(phi_series[c - width:c]) / width
    for k in range(c, len(phi_series)):
        if phi_series[k] >= base - tol:
            return k - c
    return None


# --- trust and teaching ------------------------------------------------------

def teaching_effectiveness(events: Sequence[AdoptionEvent]) -> float:
    done = [e for e in events if e.learner_reward_after is not None]
    if not done:
        return 0.0
    return sum(e.learner_reward_after > e.learner_reward_before for e in done) / len(done)


def trust_performance_pairs(events: Sequence[AdoptionEvent]) -> list[tuple[float, float]]:
    return [
        (e.tau_at_adoption, e.learner_reward_after - e.learner_reward_before)
        for e in events
        if e.learner_reward_after is not None
    ]


# --- report ------------------------------------------------------------------

@dataclass
class MetricsReport:
    condition: str
    seed: int
    final_performance: float
    e90: int
    auc: float
    compositionality: list
    compression: list
    entropy_bits: list
    vocab_size: list
    coverage: list
    phi_before: Optional[float]
    phi_after: Optional[float]
    stability: Optional[float]
    phi_steady: Optional[float]
    recovery: list
    eta_teach: float
    n_events: int
    trust_perf_r: Optional[float]
    trust_perf_p: Optional[float]
    trust_final: float
    density: float
    transitivity: float
    efficiency: float

    def as_dict(self) -> dict:
        return asdict(self)


def compute_report(record: RunRecord) -> MetricsReport:
    from .stats import pearson_r

    series = record.reward_mean
    vocabs = record.vocabularies
    entropies = [vocabulary_entropy(u) if sum(u.values()) else 0.0 for u in record.usage]
    phi = record.phi_mean()
    has_phi = all(v is not None for v in phi)
    stab = stability(phi, record.change_episodes()) if has_phi else None
    recov = []
    if has_phi:
        # judged only where a full post-change window exists, as for stability
        usable = [c for c in record.change_episodes() if c - 1 + 5 <= len(phi)]
        recov = [recovery_episodes(phi, c) for c in usable]
    steady = None
    if has_phi:
        tail = phi[-FINAL_WINDOW:]
        steady = sum(tail) / len(tail)
    pairs = trust_performance_pairs(record.events)
    pr = pearson_r(pairs)
    tau_last = np.array(
        [[np.nan if v is None else v for v in row] for row in record.trust[-1]], dtype=float
    )
    final = record.final_performance()
    vocab_sizes = [len(v) for v in vocabs]
    return MetricsReport(
        condition=record.condition,
        seed=record.seed,
        final_performance=final,
        e90=episodes_to_90(series),
        auc=auc(series),
        compositionality=[compositionality(v) for v in vocabs],
        compression=[compression_ratio(h) for h in entropies],
        entropy_bits=entropies,
        vocab_size=vocab_sizes,
        coverage=[coverage(v, record.n_items) for v in vocabs],
        phi_before=stab.phi_before if stab else None,
        phi_after=stab.phi_after if stab else None,
        stability=stab.ratio if stab else None,
        phi_steady=steady,
        recovery=recov,
        eta_teach=teaching_effectiveness(record.events),
        n_events=len(pairs),
        trust_perf_r=pr.statistic if pr else None,
        trust_perf_p=pr.p_value if pr else None,
        trust_final=record.trust_mean()[-1],
        density=network_density(tau_last),
        transitivity=network_transitivity(tau_last),
        efficiency=final / (sum(vocab_sizes) / len(vocab_sizes)) if sum(vocab_sizes) else 0.0,
    )
