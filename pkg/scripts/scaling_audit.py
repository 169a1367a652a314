#!/usr/bin/env python3
"""Counted pipeline operations on growing planted drawings, against a C*n*log(n) fit."""

import argparse
import math
import random
import time
from dataclasses import dataclass

from untangling.generators import grown_planted_drawing
from untangling.reducing_tri import build_reducing
from untangling.untangle import untangle


@dataclass
class ScalingConfig:
    genus: int = 2
    sizes: tuple = (100, 200, 400, 800, 1600)
    seed: int = 12
    repeats: int = 1


def run(cfg: ScalingConfig):
    rng = random.Random(cfg.seed)
    tri = build_reducing(cfg.genus)
    rows = []
    for n in cfg.sizes:
        ops, secs = 0, 0.0
        for _ in range(cfg.repeats):
            d = grown_planted_drawing(tri.map, rng, n)
            start = time.perf_counter()
            verdict = untangle(d, tri)
            secs += time.perf_counter() - start
            ops += verdict.stats.get("operations", 0)
        rows.append((n, ops / cfg.repeats, secs / cfg.repeats))
    x = [n * math.log(n) for n, _, _ in rows]
    c = sum(o * xi for (_, o, _), xi in zip(rows, x)) / sum(xi * xi for xi in x)
    print(f"genus {cfg.genus}, fit ops = {c:.3f} * n log n")
    print(f"{'n':>6} {'ops':>9} {'seconds':>8} {'ops/fit':>8}")
    for (n, o, s), xi in zip(rows, x):
        print(f"{n:>6} {o:>9.0f} {s:>8.3f} {o / (c * xi):>8.2f}")
    return c, rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--genus", type=int, default=ScalingConfig.genus)
    p.add_argument("--sizes", type=int, nargs="+", default=list(ScalingConfig.sizes))
    p.add_argument("--seed", type=int, default=ScalingConfig.seed)
    p.add_argument("--repeats", type=int, default=ScalingConfig.repeats)
    a = p.parse_args()
    run(ScalingConfig(a.genus, tuple(a.sizes), a.seed, a.repeats))


if __name__ == "__main__":
    main()
