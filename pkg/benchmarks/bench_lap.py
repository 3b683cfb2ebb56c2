"""Compare the compiled and pure-Python assignment kernels.

    python3 benchmarks/bench_lap.py [--repeat 5]

Times single LAP solves on tracker-shaped matrices and a 100-best Murty
enumeration, for every available backend.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from pvtrack.assignment import FORBIDDEN, CostMatrix, available_backends, ranked_iter, set_backend
from pvtrack.assignment import kernel


def tracker_matrix(rng, n_tracks, n_meas):
    """Detection block plus diagonal missed and died blocks."""
    entries = np.full((n_tracks, n_meas + 2 * n_tracks), FORBIDDEN)
    det = rng.normal(-2.0, 2.0, (n_tracks, n_meas))
    det[rng.random(det.shape) < 0.3] = FORBIDDEN
    entries[:, :n_meas] = det
    idx = np.arange(n_tracks)
    entries[idx, n_meas + idx] = rng.normal(4.0, 0.3, n_tracks)
    entries[idx, n_meas + n_tracks + idx] = rng.normal(6.9, 0.1, n_tracks)
    return CostMatrix(entries)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    shapes = [(3, 3), (6, 8), (10, 12)]
    mats = {s: [tracker_matrix(rng, *s) for _ in range(50)] for s in shapes}

    results = {}
    for name in available_backends():
        set_backend(name)
        for s, batch in mats.items():
            t = min(timeit.repeat(
                lambda: [kernel.solve_lap(c.costs, c.allowed) for c in batch],
                number=1, repeat=args.repeat)) / len(batch)
            results[(name, f"lap {s[0]}x{s[1] + 2 * s[0]}")] = t
        big = mats[(6, 8)][0]
        t = min(timeit.repeat(lambda: sum(1 for _ in zip(range(100), ranked_iter(big))),
                              number=1, repeat=args.repeat))
        results[(name, "murty 100-best 6x20")] = t

    cases = sorted({case for _, case in results})
    print(f"{'case':<24}" + "".join(f"{b:>14}" for b in available_backends()) + f"{'speedup':>10}")
    for case in cases:
        row = [results[(b, case)] for b in available_backends()]
        speed = row[0] / row[-1] if len(row) > 1 else 1.0
        print(f"{case:<24}" + "".join(f"{t * 1e6:>12.1f}us" for t in row) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
