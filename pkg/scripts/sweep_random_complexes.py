"""Sample random even-dimensional pseudomanifolds, thin them, and tabulate the surfaces.

Each row of the CSV describes one complex: its size, the width reached by the
search, the certificate, and how many extracted surfaces classified stable,
unstable or otherwise. Rows whose surfaces do not conform are the ones worth
a closer look.

    python scripts/sweep_random_complexes.py --count 200 --max-bricks 8 --seed 7
"""

import argparse
import random
import sys
from pathlib import Path

import pandas as pd

# Ensure project root is in python path
sys.path.append(str(Path(__file__).resolve().parents[1]))

from BackEnd.core.logging_config import get_logger
from BackEnd.core.paths import prepare_reports_dir
from BackEnd.services.constructions import random_pseudomanifold
from BackEnd.services.orderings import Ordering
from BackEnd.services.surfaces import Verdict
from BackEnd.services.thinning import (
    CertificateStatus,
    certify_locally_thin,
    extract_minimal_surfaces,
    thin_search,
)

logger = get_logger("sweep")


def sweep(count: int, max_bricks: int, seed: int, budget: int, dimensions=(2, 4)) -> pd.DataFrame:
    rng = random.Random(seed)
    rows = []
    for sample in range(count):
        dimension = rng.choice([d for d in dimensions if d + 2 <= max_bricks])
        M = random_pseudomanifold(rng, max_bricks, dimension=dimension)
        start = list(M.brick_ids)
        rng.shuffle(start)
        thinned = thin_search(M, Ordering(tuple(start)), budget=budget, seed=sample)
        certificate = certify_locally_thin(M, thinned.ordering, budget=budget)
        certified = certificate.status is CertificateStatus.LOCALLY_THIN
        surfaces = extract_minimal_surfaces(M, thinned.ordering)
        verdicts = [s.classification.verdict for s in surfaces]
        rows.append(
            {
                "sample": sample,
                "dimension": dimension,
                "bricks": M.size,
                "facets": len(M.facets),
                "width": " ".join(thinned.width.as_strings()),
                "moves": len(thinned.moves),
                "certificate": certificate.status.value,
                "stable": verdicts.count(Verdict.STABLE),
                "unstable": verdicts.count(Verdict.UNSTABLE),
                "other": sum(v not in (Verdict.STABLE, Verdict.UNSTABLE) for v in verdicts),
                "conforming": all(s.theorem_checked is not False for s in surfaces)
                if certified
                else None,
            }
        )
    return pd.DataFrame(rows)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Conformance sweep over random pseudomanifolds")
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--max-bricks", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=20_000)
    parser.add_argument("--output", type=Path, default=None, help="CSV path (default: data/reports)")
    args = parser.parse_args(argv)

    print(f"Sweeping {args.count} complexes with at most {args.max_bricks} bricks...")
    df = sweep(args.count, args.max_bricks, args.seed, args.budget)
    output = args.output or prepare_reports_dir() / f"sweep_seed{args.seed}.csv"
    df.to_csv(output, index=False)

    certified = df[df["certificate"] == CertificateStatus.LOCALLY_THIN.value]
    failures = certified[certified["conforming"] == False]  # noqa: E712
    print(f"Certified locally thin: {len(certified)}/{len(df)}")
    print(f"Non-conforming: {len(failures)}")
    print(f"Wrote {output}")
    if not failures.empty:
        logger.warning("Non-conforming samples: %s", failures["sample"].tolist())
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
