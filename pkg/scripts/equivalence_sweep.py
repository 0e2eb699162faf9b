#!/usr/bin/env python3
"""Cross-validate the sparse controllability decision test against the oracle.

Samples deduplicated integer systems, runs the algebraic decision test and
the exhaustive schedule search on each (system, sparsity) pair, and reports
any disagreement.  Exits non-zero when a mismatch is found.

Usage:
    python scripts/equivalence_sweep.py --count 500 --seed 0
"""

import argparse
import sys
import time

import numpy as np

from sparse_ctrb import SystemModel, exact_min_k, sparse_pbh_test


def sample_systems(count, seed, max_n, max_l, magnitude):
    rng = np.random.default_rng(seed)
    seen = set()
    systems = []
    while len(systems) < count:
        n = int(rng.integers(2, max_n + 1))
        l = int(rng.integers(1, max_l + 1))
        d = rng.integers(-magnitude, magnitude + 1, size=(n, n))
        h = rng.integers(-magnitude, magnitude + 1, size=(n, l))
        key = (n, l, d.tobytes(), h.tobytes())
        if key in seen:
            continue
        seen.add(key)
        systems.append(SystemModel(D=d.astype(float), H=h.astype(float)))
    return systems


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=500, help="systems to sample")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--max-n", type=int, default=3, help="largest state dimension")
    parser.add_argument("--max-l", type=int, default=3, help="largest input count")
    parser.add_argument(
        "--magnitude", type=int, default=1, help="entries drawn from [-m, m]"
    )
    parser.add_argument(
        "--max-s", type=int, default=2, help="largest sparsity level to test"
    )
    args = parser.parse_args(argv)

    systems = sample_systems(
        args.count, args.seed, args.max_n, args.max_l, args.magnitude
    )
    start = time.perf_counter()
    pairs = 0
    controllable = 0
    mismatches = []
    for idx, sys_ in enumerate(systems):
        for s in range(1, min(args.max_s, sys_.n_inputs) + 1):
            pairs += 1
            verdict = sparse_pbh_test(sys_, s).verdict
            k, _ = exact_min_k(sys_, s)
            if verdict != (k is not None):
                mismatches.append((idx, s, verdict, k))
            if verdict:
                controllable += 1
    elapsed = time.perf_counter() - start

    print(
        f"{len(systems)} systems, {pairs} (system, s) pairs, "
        f"{controllable} sparse-controllable, {elapsed:.1f}s"
    )
    for idx, s, verdict, k in mismatches:
        sys_ = systems[idx]
        print(f"MISMATCH at system {idx}, s={s}: decision={verdict}, oracle_k={k}")
        print("  D =", sys_.D.tolist())
        print("  H =", sys_.H.tolist())
    if mismatches:
        print(f"{len(mismatches)} mismatches")
        return 1
    print("decision test and oracle agree on every pair")
    return 0


if __name__ == "__main__":
    sys.exit(main())
