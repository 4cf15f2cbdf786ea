"""Positive-attitude fraction after negative official posts and a later rebuttal.

    python3 scripts/attitude_trough.py --seeds 10 --rebuttal-step 10
"""

import argparse

from s3sim.engine import run
from s3sim.scenarios import trough_stats, trough_world


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--positive-prior", type=float, default=0.6)
    ap.add_argument("--rebuttal-step", type=int, default=10)
    ap.add_argument("--rebuttals", type=int, default=1)
    args = ap.parse_args()

    hits = 0
    for seed in range(args.seeds):
        series = run(trough_world(seed, args.positive_prior, args.rebuttal_step, args.rebuttals))
        st = trough_stats(series.column("positive_fraction"))
        hits += st.passes()
        print(f"seed {seed}: initial {st.initial:.2f}  min {st.minimum:.2f} at step {st.minimum_step}  "
              f"recovery {st.recovery:+.2f}  {'ok' if st.passes() else 'no trough'}")
    print(f"{hits}/{args.seeds} seeds show a trough with recovery")


if __name__ == "__main__":
    main()
