"""Command-line entry point: ``run``, ``sweep``, ``report`` and ``plots``.

Exit statuses: 0 success, 1 usage error, 2 I/O error, 3 invariant violation.
The output directory defaults to ``$TSLEC_OUT_DIR`` or ``./results``.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace

from . import records
from .config import ConfigError, load_config
from .metrics import compute_report
from .plots import write_plots
from .runner import CONDITIONS, InvariantError, get_condition, run, run_sweep
from .summary import summarize

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 1, 2, 3
OUT_DIR_ENV = "TSLEC_OUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_DIR_ENV} or ./results)")


def _sim_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--episodes", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tslec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="simulate one (condition, seed) pair")
    p.add_argument("--condition", default="FULL", help=f"one of {', '.join(CONDITIONS)}")
    p.add_argument("--seed", type=int, default=0)
    _sim_options(p)
    _common(p)

    p = sub.add_parser("sweep", help="every condition x seed, plus the summary")
    p.add_argument("--seeds", type=int, default=None, help="number of seeds (default 30)")
    p.add_argument("--conditions", default=None, help="comma-separated condition names")
    p.add_argument("--random-trust", action="store_true", help="also run the random-trust baseline")
    p.add_argument("--workers", type=int, default=1)
    _sim_options(p)
    _common(p)

    p = sub.add_parser("report", help="recompute metrics and summary from saved runs")
    _common(p)
    p = sub.add_parser("plots", help="emit plot-ready CSVs from saved runs")
    _common(p)
    return parser


def _out_dir(args) -> str:
    return args.out_dir or os.environ.get(OUT_DIR_ENV) or "results"


def _config(args):
    overrides = list(args.overrides)
    if args.episodes is not None:
        overrides.append(f"env.episodes = {args.episodes}")
    if args.base_seed is not None:
        overrides.append(f"sweep.base_seed = {args.base_seed}")
    if getattr(args, "seeds", None) is not None:
        overrides.append(f"sweep.seeds = {args.seeds}")
    cfg = load_config(args.config, overrides)
    try:
        if getattr(args, "conditions", None):
            cfg = replace(cfg, conditions=tuple(c.strip() for c in args.conditions.split(",") if c.strip()))
        if getattr(args, "random_trust", False) and "RANDOM_TRUST" not in cfg.conditions:
            cfg = replace(cfg, conditions=cfg.conditions + ("RANDOM_TRUST",))
    except (KeyError, ValueError) as exc:
        raise UsageError(exc.args[0] if exc.args else str(exc)) from None
    return cfg


def _condition(name: str):
    try:
        return get_condition(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _summary_line(rep) -> str:
    trust = "-" if rep.trust_final != rep.trust_final else f"{rep.trust_final:.2f}"
    return (
        f"{rep.condition} seed={rep.seed} final={rep.final_performance:.3f} e90={rep.e90} "
        f"vocab={sum(rep.vocab_size) / len(rep.vocab_size):.1f} trust={trust} events={rep.n_events}"
    )


def cmd_run(args) -> int:
    cond = _condition(args.condition)
    cfg = _config(args)
    out = _out_dir(args)
    rec = run(cond, args.seed, cfg)
    records.write_run(rec, out)
    print(_summary_line(compute_report(rec)))
    return EXIT_OK


def _print_table(summary: dict) -> None:
    print(f"{'condition':<16}{'final':>10}{'std':>8}{'e90':>8}{'vocab':>8}{'phi':>8}{'stab':>8}")
    for row in summary["conditions"]:
        f = row["final_performance"]

        def m(key):
            v = row[key]["mean"]
            return "-" if v is None else f"{v:.3f}"

        print(f"{row['condition']:<16}{f['mean']:>10.3f}{(f['std'] or 0):>8.3f}"
              f"{row['e90']['mean']:>8.1f}{m('vocab_size'):>8}{m('phi_steady'):>8}{m('stability'):>8}")
    print("note:", summary["notes"]["compression_ratio"])


def cmd_sweep(args) -> int:
    cfg = _config(args)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    out = _out_dir(args)
    t0 = time.perf_counter()
    runs = run_sweep(cfg, workers=args.workers)
    for recs in runs.values():
        for rec in recs:
            records.write_run(rec, out)
    summary = summarize(runs)
    records.write_json(os.path.join(out, "summary.json"), summary)
    _print_table(summary)
    n = sum(len(v) for v in runs.values())
    print(f"{n} runs in {time.perf_counter() - t0:.1f}s -> {out}", file=sys.stderr)
    return EXIT_OK


def _load(args):
    runs = records.load_runs(_out_dir(args))
    reports = {c: [compute_report(r) for r in recs] for c, recs in runs.items()}
    return runs, reports


def cmd_report(args) -> int:
    runs, reports = _load(args)
    out = _out_dir(args)
    records.write_json(
        os.path.join(out, "reports.json"),
        {c: [r.as_dict() for r in reps] for c, reps in reports.items()},
    )
    summary = summarize(runs, reports)
    records.write_json(os.path.join(out, "summary.json"), summary)
    _print_table(summary)
    return EXIT_OK


def cmd_plots(args) -> int:
    runs, reports = _load(args)
    for path in write_plots(runs, _out_dir(args), reports):
        print(path)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "report": cmd_report, "plots": cmd_plots}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"tslec: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tslec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantError as exc:
        print(f"tslec: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
