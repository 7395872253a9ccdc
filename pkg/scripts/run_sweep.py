"""Full sweep (four ablations plus the random-trust baseline), summary JSON and plot tables.

    python scripts/run_sweep.py --out-dir results
"""

import argparse
import os
import time

from tslec import records
from tslec.env import EnvConfig
from tslec.metrics import compute_report
from tslec.plots import write_plots
from tslec.runner import ABLATIONS, SweepConfig, run_sweep
from tslec.summary import summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--episodes", type=int, default=100)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    cfg = SweepConfig(conditions=ABLATIONS + ("RANDOM_TRUST",), seeds=args.seeds, env=EnvConfig(episodes=args.episodes))
    t0 = time.perf_counter()
    runs = run_sweep(cfg, workers=args.workers)
    elapsed = time.perf_counter() - t0
    for recs in runs.values():
        for rec in recs:
            records.write_run(rec, args.out_dir)
    reports = {c: [compute_report(r) for r in recs] for c, recs in runs.items()}
    summary = summarize(runs, reports)
    records.write_json(os.path.join(args.out_dir, "summary.json"), summary)
    write_plots(runs, args.out_dir, reports)

    print(f"{'condition':<16}{'final':>8}{'std':>7}{'e90':>7}{'|V|':>7}{'cov':>6}{'phi':>7}{'stab':>7}{'tau60':>7}{'eta':>7}")
    for row in summary["conditions"]:
        def m(key, fmt=".3f"):
            v = row[key]["mean"]
            return "-" if v is None else format(v, fmt)
        print(f"{row['condition']:<16}{m('final_performance', '.2f'):>8}{row['final_performance']['std']:>7.2f}"
              f"{m('e90', '.1f'):>7}{m('vocab_size', '.1f'):>7}{m('coverage', '.2f'):>6}{m('phi_steady'):>7}"
              f"{m('stability'):>7}{m('trust_at_episode_60'):>7}{m('eta_teach'):>7}")
    for t in summary["tests"]["final_vs_full"]:
        print(f"FULL vs {t['condition']}: t={t['statistic']:.2f} p_bonf={t['p_bonferroni']:.3g} d={t['effect_size']:.2f}")
    e90 = summary["tests"]["e90_full_vs_no_teaching"]
    print(f"E90 reduction FULL vs NO_TEACHING: {e90['relative_reduction']:.1%} (p={e90['p_value']:.3g})")
    sign = summary["tests"]["eta_trust_vs_random"]["sign_test"]
    print(f"eta trust vs random sign test: {sign['n1']}+/{sign['n2']}- p={sign['p_value']:.3g}")
    print(f"{sum(len(v) for v in runs.values())} runs in {elapsed:.1f}s -> {args.out_dir}")


if __name__ == "__main__":
    main()
