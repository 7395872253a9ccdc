"""Plot-ready CSV tables for each figure; rendering is left to external tools."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import stats
from .metrics import MetricsReport, RunRecord, compositionality, compute_report, vocab_prefix
from .records import _write, csv_text

PLOT_FILES = (
    "learning_curves.csv",
    "vocab_growth.csv",
    "compositionality.csv",
    "trust.csv",
    "performance_box.csv",
    "ablation_bars.csv",
    "efficiency_matrix.csv",
)
SERIES_COLUMNS = ("condition", "episode", "mean", "ci_low", "ci_high", "n")


def _ci_row(xs):
    xs = [x for x in xs if x is not None]
    if not xs:
        return None, None, None, 0
    m, _ = stats.mean_std(xs)
    ci = stats.confidence_interval_95(xs)
    return (m, ci[0], ci[1], len(xs)) if ci else (m, m, m, len(xs))


def _series_rows(runs, getter):
    for cond, recs in runs.items():
        series = [getter(r) for r in recs]
        if any(s is None for s in series):
            continue
        for k in range(len(series[0])):
            yield (cond, k + 1, *_ci_row([s[k] for s in series]))


def learning_curves(runs):
    return SERIES_COLUMNS, list(_series_rows(runs, lambda r: r.reward_mean))


def vocab_growth(runs):
    return SERIES_COLUMNS, list(_series_rows(runs, lambda r: r.vocab_mean()))


def trust_series(runs):
    # INDEPENDENT_QL never updates trust; its flat 0.5 line is still emitted
    return SERIES_COLUMNS, list(_series_rows(runs, lambda r: r.trust_mean()))


def compositionality_series(runs, every: int = 10):
    """Mean C over agents at checkpoint episodes, from each agent's vocabulary prefix."""
    rows = []
    for cond, recs in runs.items():
        n_ep = min(r.episodes for r in recs)
        checkpoints = sorted(set(list(range(every, n_ep + 1, every)) + [n_ep]))
        for ep in checkpoints:
            vals = []
            for r in recs:
                sizes = r.vocab_sizes[ep - 1]
                cs = [compositionality(vocab_prefix(v, sizes[i])) for i, v in enumerate(r.vocabularies)]
                vals.append(sum(cs) / len(cs))
            rows.append((cond, ep, *_ci_row(vals)))
    return SERIES_COLUMNS, rows


def performance_box(reports):
    header = ("condition", "min", "q1", "median", "q3", "max", "n")
    rows = []
    for cond, reps in reports.items():
        xs = np.array([r.final_performance for r in reps], dtype=float)
        q = np.percentile(xs, [0, 25, 50, 75, 100])
        rows.append((cond, *[float(v) for v in q], len(xs)))
    return header, rows


def ablation_bars(reports, reference: str = "FULL"):
    header = ("condition", "mean", "std", "ci_low", "ci_high", "relative_to_full")
    ref = None
    if reference in reports:
        ref = stats.mean_std([r.final_performance for r in reports[reference]])[0]
    rows = []
    for cond, reps in reports.items():
        xs = [r.final_performance for r in reps]
        m, s = stats.mean_std(xs)
        ci = stats.confidence_interval_95(xs) or (m, m)
        rows.append((cond, m, s, ci[0], ci[1], m / ref if ref else None))
    return header, rows


def efficiency_matrix(reports):
    header = ("condition", "final_performance", "vocab_size", "efficiency", "e90", "auc")
    rows = []
    for cond, reps in reports.items():
        def mean(f):
            return float(np.mean([f(r) for r in reps]))
        rows.append((
            cond,
            mean(lambda r: r.final_performance),
            mean(lambda r: float(np.mean(r.vocab_size))),
            mean(lambda r: r.efficiency),
            mean(lambda r: r.e90),
            mean(lambda r: r.auc),
        ))
    return header, rows


def plot_tables(runs: Mapping[str, Sequence[RunRecord]], reports: Mapping[str, Sequence[MetricsReport]] = None) -> dict:
    if reports is None:
        reports = {c: [compute_report(r) for r in recs] for c, recs in runs.items()}
    return {
        "learning_curves.csv": learning_curves(runs),
        "vocab_growth.csv": vocab_growth(runs),
        "compositionality.csv": compositionality_series(runs),
        "trust.csv": trust_series(runs),
        "performance_box.csv": performance_box(reports),
        "ablation_bars.csv": ablation_bars(reports),
        "efficiency_matrix.csv": efficiency_matrix(reports),
    }


def write_plots(runs, out_dir, reports=None) -> list[Path]:
    base = Path(out_dir) / "plots"
    paths = []
    for name, (header, rows) in plot_tables(runs, reports).items():
        path = base / name
        _write(path, csv_text(header, rows))
        paths.append(path)
    return paths
