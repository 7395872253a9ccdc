"""End-to-end training loop, condition matrix and seed sweeps."""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import agent as ag
from . import env as ev
from . import lexicon as lx
from . import social as so
from .metrics import RunRecord


class InvariantError(RuntimeError):
    """A simulation invariant (conservation, trust bounds) was violated."""


class ConditionName(str, enum.Enum):
    FULL = "FULL"
    NO_TEACHING = "NO_TEACHING"
    NO_ADAPTATION = "NO_ADAPTATION"
    INDEPENDENT_QL = "INDEPENDENT_QL"
    RANDOM_TRUST = "RANDOM_TRUST"


@dataclass(frozen=True)
class Condition:
    name: str
    teaching: bool
    adaptation: bool
    communication: bool
    random_trust_baseline: bool = False


CONDITIONS = {
    "FULL": Condition("FULL", True, True, True),
    "NO_TEACHING": Condition("NO_TEACHING", False, True, True),
    "NO_ADAPTATION": Condition("NO_ADAPTATION", True, False, True),
    "INDEPENDENT_QL": Condition("INDEPENDENT_QL", False, False, False),
    "RANDOM_TRUST": Condition("RANDOM_TRUST", True, True, True, random_trust_baseline=True),
}
ABLATIONS = ("FULL", "NO_TEACHING", "NO_ADAPTATION", "INDEPENDENT_QL")


def get_condition(name: str) -> Condition:
    key = name.upper().replace("-", "_")
    if key not in CONDITIONS:
        raise KeyError(f"unknown condition {name!r}; choose from {', '.join(CONDITIONS)}")
    return CONDITIONS[key]


@dataclass(frozen=True)
class SweepConfig:
    conditions: tuple = ABLATIONS
    seeds: int = 30
    base_seed: int = 0
    env: ev.EnvConfig = field(default_factory=ev.EnvConfig)
    learning: ag.LearningParams = field(default_factory=ag.LearningParams)
    trust: so.TrustParams = field(default_factory=so.TrustParams)
    adaptation: ag.AdaptationParams = field(default_factory=ag.AdaptationParams)

    def __post_init__(self):
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if not self.conditions:
            raise ValueError("at least one condition is required")
        names = tuple(get_condition(c).name for c in self.conditions)
        object.__setattr__(self, "conditions", names)


class World:
    """Everything one run owns: agents, vocabularies, trust, RNG streams."""

    def __init__(self, cfg: SweepConfig, condition: Condition, seed: int):
        n = cfg.env.n_agents
        self.cfg = cfg
        self.condition = condition
        self.env_config = cfg.env
        # one child stream per concern so a condition flag never shifts another
        # concern's draws
        streams = np.random.SeedSequence([cfg.base_seed, seed]).spawn(n + 3)
        self.env_rng = np.random.default_rng(streams[0])
        self.alloc_rng = np.random.default_rng(streams[1])
        self.social_rng = np.random.default_rng(streams[2])
        self.agent_rngs = [np.random.default_rng(s) for s in streams[3:]]
        self.q = [ag.QTable(cfg.learning.q_max) for _ in range(n)]
        self.vocabs = [lx.Vocabulary(i) for i in range(n)]
        self.models = [lx.ListenerModel(i) for i in range(n)]
        self.stores = [so.StrategyStore() for _ in range(n)]
        self.trust = so.TrustMatrix(n, cfg.trust.tau_init)
        self.history: list[list[float]] = [[] for _ in range(n)]
        self.goals: list[list[int]] = [[0] * cfg.env.n_items for _ in range(n)]
        self.usage = [dict() for _ in range(n)]
        self.pending: list[so.AdoptionEvent] = []
        self.record = RunRecord(condition.name, seed, n, cfg.env.n_items)

    @property
    def n(self) -> int:
        return self.env_config.n_agents


def _trust_row(world: World, i: int) -> dict[int, float]:
    if world.condition.random_trust_baseline:
        # trust is tracked but ignored: the "most trusted" peer is a coin toss
        draws = world.social_rng.random(world.n)
        return {j: float(draws[j]) for j in range(world.n) if j != i}
    return world.trust.row(i)


def run_episode(world: World, episode: int) -> None:
    cfg, cond, rec = world.cfg, world.condition, world.record
    n = world.n

    world.goals = [ag.sample_goals(world.env_config, world.env_rng) for _ in range(n)]
    rec.goals.append([list(g) for g in world.goals])
    change = ev.sample_change(episode, world.env_rng, world.env_config)
    if change is not None:
        world.env_config = ev.apply_change(world.env_config, change)
        rec.changes.append(
            {"episode": episode, "kind": change.kind.value, "item": change.item, "new_value": change.new_value}
        )
    quantities = world.env_config.quantities
    pool = ev.reset_episode(world.env_config)

    traces: list[list[so.TraceStep]] = [[] for _ in range(n)]
    known = np.zeros((n, n))
    seen = np.zeros((n, n))
    rounds = []
    episode_reward = [0.0] * n
    T = world.env_config.rounds_per_episode
    for t in range(1, T + 1):
        pool.round = t
        state = ag.state_key(pool, quantities)
        proposals, messages, actions, sources = [], [], [], []
        for i in range(n):
            action, source = ag.select_action(
                world.q[i], state, _trust_row(world, i), world.stores[i],
                episode, world.agent_rngs[i], cfg.learning, cfg.trust.adopt_threshold,
            )
            prop = ag.generate_proposal(action, world.goals[i], pool, world.agent_rngs[i], proposer=i)
            msg, _ = lx.encode_message(world.vocabs[i], prop.lines)
            for s in msg.symbols:
                world.usage[i][s] = world.usage[i].get(s, 0) + 1
            proposals.append(prop)
            messages.append(msg)
            actions.append(action)
            sources.append(source)

        views = None
        if cond.communication:
            views = {}
            for i in range(n):
                for msg in messages:
                    j = msg.sender
                    if j == i:
                        continue
                    concepts, acc = lx.decode_observed(world.models[i], msg)
                    views[(i, j)] = concepts
                    k = len(msg.symbols)
                    known[i, j] += acc * k
                    seen[i, j] += k

        before = list(pool.remaining)
        allocs, winner = ev.evaluate_and_allocate(
            proposals, pool, world.goals, cond.communication, world.alloc_rng, views,
            request_weight=world.env_config.request_weight,
        )
        _check_conservation(before, allocs, pool.remaining, episode, t)
        pool.round = t + 1
        next_state = ag.state_key(pool, quantities) if t < T else None
        for i in range(n):
            r = float(ev.utility(world.goals[i], allocs[i]))
            episode_reward[i] += r
            ag.q_update(world.q[i], state, actions[i], r, next_state, cfg.learning)
            traces[i].append(so.TraceStep(state, actions[i], r, tuple(proposals[i].lines)))
        if cond.communication:
            lx.reveal_round(world.models, messages, world.vocabs)
        rounds.append({
            "winner": winner,
            "allocations": allocs,
            "actions": [a.name for a in actions],
            "sources": [s.value for s in sources],
        })

    # outcome of last episode's adoptions is this episode's reward
    for e in world.pending:
        e.learner_reward_after = episode_reward[e.learner]
    world.pending = []

    teachers = []
    if cond.teaching:
        teachers = _teaching_phase(world, episode, episode_reward, traces)

    tau = world.trust.off_diagonal()
    if tau.size and (tau.min() < 0.0 or tau.max() > 1.0):
        raise InvariantError(f"trust left [0, 1] in episode {episode}")

    adapted = []
    if cond.adaptation:
        adapted = _adaptation_phase(world, change, episode_reward)

    for i in range(n):
        world.history[i].append(episode_reward[i])

    rec.rewards.append(episode_reward)
    rec.rounds.append(rounds)
    rec.vocab_sizes.append([len(v) for v in world.vocabs])
    rec.trust.append(_matrix(world.trust.tau))
    if cond.communication:
        with np.errstate(invalid="ignore"):
            phi = np.where(seen > 0, known / np.maximum(seen, 1), 1.0)
        rec.phi.append(_matrix(phi))
    else:
        rec.phi.append(None)
    rec.teachings.append(teachers)
    rec.adaptations.append(adapted)


def _check_conservation(before, allocs, after, episode, t) -> None:
    for j, b in enumerate(before):
        given = sum(a[j] for a in allocs)
        if min(a[j] for a in allocs) < 0 or given + after[j] != b:
            raise InvariantError(f"item {j} not conserved in episode {episode}, round {t}")


def _matrix(m: np.ndarray) -> list:
    n = m.shape[0]
    return [[None if i == j else float(m[i, j]) for j in range(n)] for i in range(n)]


def _teaching_phase(world: World, episode: int, rewards: list[float], traces) -> list[int]:
    cfg = world.cfg
    tp = cfg.trust
    n = world.n
    teachers = [i for i in range(n) if so.should_teach(rewards[i], world.history[i][-10:])]
    teachings = {i: so.build_teaching(traces[i], world.vocabs[i]) for i in teachers}
    for i in range(n):
        learner_mean = so.recent_mean(world.history[i] + [rewards[i]], tp.window)
        for j in teachers:
            if j == i:
                continue
            tau = so.update_trust(float(world.trust.tau[i, j]), rewards[j], learner_mean, tp)
            world.trust.tau[i, j] = tau
            entries = so.decode_teaching(world.models[i], teachings[j])
            gate = None
            if world.condition.random_trust_baseline:
                gate = bool(world.social_rng.random() > 0.5)
            _, event = so.consider_adoption(
                world.stores[i], entries, tau, rewards[j], learner_mean, tp, episode,
                learner=i, teacher=j, gate=gate,
            )
            if event is not None:
                world.record.events.append(event)
                world.pending.append(event)
    lx.reveal_round(world.models, [t.encoded for t in teachings.values()], world.vocabs)
    return teachers


def _adaptation_phase(world: World, change, rewards: list[float]) -> list[int]:
    params = world.cfg.adaptation
    n = world.n
    adapted = []
    before = [list(g) for g in world.goals]
    for i in range(n):
        g = ag.adapt_goals_env(before[i], change, params)
        peers = [j for j in range(n) if j != i]
        best = max(peers, key=lambda j: (rewards[j], -j))
        own_mean = so.recent_mean(world.history[i] + [rewards[i]], 10)
        g = ag.adapt_goals_peer(g, before[best], own_mean, rewards[best], params)
        if g != before[i]:
            adapted.append(i)
        world.goals[i] = g
    return adapted


def run(condition: Condition | str, seed: int, cfg: SweepConfig = SweepConfig()) -> RunRecord:
    if isinstance(condition, str):
        condition = get_condition(condition)
    world = World(cfg, condition, seed)
    for episode in range(1, cfg.env.episodes + 1):
        run_episode(world, episode)
    rec = world.record
    rec.vocabularies = [v.copy() for v in world.vocabs]
    rec.usage = [dict(u) for u in world.usage]
    return rec


def _run_job(job):
    cond, seed, cfg = job
    return run(cond, seed, cfg)


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None, progress=None) -> dict[str, list[RunRecord]]:
    """Run every (condition, seed) pair; results ordered by condition then seed."""
    jobs = [(get_condition(c), k, cfg) for c in cfg.conditions for k in range(cfg.seeds)]
    workers = workers or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs, chunksize=4))
    else:
        results = []
        for job in jobs:
            results.append(_run_job(job))
            if progress:
                progress(job)
    out: dict[str, list[RunRecord]] = {get_condition(c).name: [] for c in cfg.conditions}
    for (cond, _, _), rec in zip(jobs, results):
        out[cond.name].append(rec)
    return out
