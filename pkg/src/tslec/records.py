"""Saving and loading run records: run JSON, episode/event CSVs, vocab TSV."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict
from pathlib import Path

from .lexicon import Vocabulary, dump_vocabulary, load_vocabularies
from .metrics import RunRecord
from .social import AdoptionEvent

EPISODE_COLUMNS = ("episode", "reward_mean", "vocab_mean", "trust_mean", "phi_mean")
EVENT_COLUMNS = ("episode", "learner", "teacher", "tau", "before", "after")
RUNS_DIR = "runs"


def run_stem(condition: str, seed: int) -> str:
    return f"{condition}_seed{seed:03d}"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def episode_rows(record: RunRecord):
    rewards = record.reward_mean
    vocab = record.vocab_mean()
    trust = record.trust_mean()
    phi = record.phi_mean()
    for k in range(record.episodes):
        yield (k + 1, rewards[k], vocab[k], trust[k], phi[k])


def event_rows(record: RunRecord):
    for e in record.events:
        yield (e.episode, e.learner, e.teacher, e.tau_at_adoption, e.learner_reward_before, e.learner_reward_after)


def record_to_dict(record: RunRecord) -> dict:
    d = {k: v for k, v in record.__dict__.items() if k not in ("events", "vocabularies")}
    d["events"] = [asdict(e) for e in record.events]
    d["vocabularies"] = [dump_vocabulary(v) for v in record.vocabularies]
    return d


def record_from_dict(d: dict) -> RunRecord:
    d = dict(d)
    events = [AdoptionEvent(**e) for e in d.pop("events")]
    vocabs = [load_vocabularies(text).get(k, Vocabulary(k)) for k, text in enumerate(d.pop("vocabularies"))]
    rec = RunRecord(**d)
    rec.events = events
    rec.vocabularies = vocabs
    return rec


def dumps_record(record: RunRecord) -> str:
    return json.dumps(record_to_dict(record), sort_keys=True, separators=(",", ":")) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_run(record: RunRecord, out_dir) -> dict[str, Path]:
    """Write the four per-run files under ``out_dir/runs``; returns their paths."""
    base = Path(out_dir) / RUNS_DIR
    stem = run_stem(record.condition, record.seed)
    paths = {
        "json": base / f"{stem}.json",
        "episodes": base / f"{stem}_episodes.csv",
        "events": base / f"{stem}_events.csv",
        "vocab": base / f"{stem}_vocab.tsv",
    }
    _write(paths["json"], dumps_record(record))
    _write(paths["episodes"], csv_text(EPISODE_COLUMNS, episode_rows(record)))
    _write(paths["events"], csv_text(EVENT_COLUMNS, event_rows(record)))
    _write(paths["vocab"], "".join(dump_vocabulary(v) for v in record.vocabularies))
    return paths


def load_run(path) -> RunRecord:
    with open(path) as fh:
        return record_from_dict(json.load(fh))


def load_runs(out_dir) -> dict[str, list[RunRecord]]:
    """All saved runs grouped by condition, each group ordered by seed."""
    base = Path(out_dir) / RUNS_DIR
    if not base.is_dir():
        raise FileNotFoundError(f"no run records under {base}")
    files = sorted(base.glob("*_seed*.json"))
    if not files:
        raise FileNotFoundError(f"no run records under {base}")
    out: dict[str, list[RunRecord]] = {}
    for f in files:
        rec = load_run(f)
        out.setdefault(rec.condition, []).append(rec)
    for recs in out.values():
        recs.sort(key=lambda r: r.seed)
    return out


def write_json(path, obj) -> None:
    _write(Path(path), json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_json_default) + "\n")


def _json_default(o):
    if hasattr(o, "as_dict"):
        return o.as_dict()
    raise TypeError(f"cannot serialize {type(o).__name__}")
