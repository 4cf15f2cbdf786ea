"""Emotion density on two communities joined by one weak bridge.

    python3 scripts/two_peaks.py --seeds 10
"""

import argparse

from s3sim.engine import run
from s3sim.scenarios import two_peak_world, two_peaks


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--forward-probability", type=float, default=0.8)
    ap.add_argument("--decay-steps", type=int, default=3)
    ap.add_argument("--min-gap", type=int, default=3)
    args = ap.parse_args()

    hits = 0
    for seed in range(args.seeds):
        series = run(two_peak_world(seed, args.forward_probability, args.decay_steps))
        dens = series.column("emotion_density")
        peaks = two_peaks(dens, args.min_gap)
        hits += peaks is not None
        curve = " ".join(f"{d:.2f}" for d in dens[:25])
        print(f"seed {seed}: peaks {peaks}  density {curve}")
    print(f"{hits}/{args.seeds} seeds show two peaks")


if __name__ == "__main__":
    main()
