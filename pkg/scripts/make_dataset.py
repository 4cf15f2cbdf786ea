"""Write a synthetic JSON-lines dataset that the CLI can ingest.

    python3 scripts/make_dataset.py --users 300 --out data/synthetic.jsonl
"""

import argparse
import random

from s3sim.fixtures import connected_er
from s3sim.network import Post, UserRecord, write_dataset

TOPIC_POSTS = [
    "The river plant discharge worries me",
    "Experts say the plant discharge is safe",
    "Why is nobody talking about the discharge?",
]
OTHER_POSTS = ["Lovely weather today", "Match night with friends", "New recipe turned out great",
               "Reading a good book", "Traffic was terrible this morning"]
DESCRIPTIONS = ["mother of two and teacher", "software engineer", "retired nurse", "student",
                "journalist covering science", "dad, driver, football fan", "", "artist and musician"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--users", type=int, default=300)
    ap.add_argument("--mean-degree", type=float, default=6.0)
    ap.add_argument("--topic-share", type=float, default=0.1, help="share of users posting about the topic")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    g = connected_er(args.users, args.mean_degree, args.seed)
    records = []
    for i in range(args.users):
        posts = [Post(t, rng.choice(OTHER_POSTS)) for t in range(rng.randint(0, 6))]
        if rng.random() < args.topic_share:
            posts.append(Post(len(posts), rng.choice(TOPIC_POSTS)))
        # each undirected edge becomes a follow in one or both directions
        followees = [f"u{j:04d}" for j in g.neighbors(i) if j < i or rng.random() < 0.7]
        records.append(UserRecord(f"u{i:04d}", rng.choice(DESCRIPTIONS), tuple(posts), tuple(sorted(followees))))
    write_dataset(records, args.out)
    print(f"wrote {len(records)} users to {args.out}")


if __name__ == "__main__":
    main()
