"""Why the trust gate does not filter teachers in this model.

For every (learner, teacher) trust update in FULL this prints how often the
teacher beat the learner's recent mean, the trust values at adoption, and
eta for the trust-gated and random-trust conditions.  A gate only filters
when success is rare enough that trust settles below the threshold: with
beta_pos = 2 * beta_neg the break-even success rate is 1/3.
"""

import argparse
from collections import Counter

import numpy as np

from tslec.metrics import teaching_effectiveness
from tslec.runner import SweepConfig, run
from tslec.social import recent_mean


def update_outcomes(rec, window=5):
    """(success, tau_before) for every trust update, replayed from the record."""
    out = []
    n = rec.n_agents
    for e, teachers in enumerate(rec.teachings):
        prev = rec.trust[e - 1] if e else [[0.5] * n for _ in range(n)]
        for i in range(n):
            hist = [rec.rewards[k][i] for k in range(e + 1)]
            mean = recent_mean(hist, window)
            for j in teachers:
                if j != i:
                    out.append((rec.rewards[e][j] > mean, prev[i][j]))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=30)
    args = ap.parse_args()
    cfg = SweepConfig()

    outcomes, taus, etas = [], [], {"FULL": [], "RANDOM_TRUST": []}
    for seed in range(args.seeds):
        full = run("FULL", seed, cfg)
        outcomes += update_outcomes(full)
        taus += [e.tau_at_adoption for e in full.events]
        etas["FULL"].append(teaching_effectiveness(full.events))
        etas["RANDOM_TRUST"].append(teaching_effectiveness(run("RANDOM_TRUST", seed, cfg).events))

    succ = np.mean([s for s, _ in outcomes])
    print(f"trust updates: {len(outcomes)}, P(teacher beats learner mean) = {succ:.3f} (break-even 0.333)")
    hist = Counter(round(t, 2) for t in taus)
    print(f"adoptions: {len(taus)}, share at tau = 1.0: {hist[1.0] / len(taus):.2f}")
    print("tau at adoption:", ", ".join(f"{k:.2f}:{v}" for k, v in sorted(hist.items())))
    for c, xs in etas.items():
        print(f"eta {c}: mean {np.mean(xs):.3f}")


if __name__ == "__main__":
    main()
