#!/usr/bin/env python3
"""Write a small corpus of input files for the command-line tool."""

import argparse
import os
import random
from dataclasses import dataclass

from untangling import formats
from untangling.generators import perturb, planted_drawing, random_walk
from untangling.reducing_tri import build_reducing
from untangling.schema import SCALE, PLDrawing


@dataclass
class CorpusConfig:
    out_dir: str = "corpus"
    genus: int = 2
    seed: int = 0
    drawings: int = 4
    walks: int = 20
    walk_length: int = 40


def write(path, text):
    with open(path, "w") as fh:
        fh.write(text)
    print(path)


def build(cfg: CorpusConfig):
    rng = random.Random(cfg.seed)
    os.makedirs(cfg.out_dir, exist_ok=True)
    tri = build_reducing(cfg.genus)
    m = tri.map
    write(os.path.join(cfg.out_dir, f"tri_g{cfg.genus}.txt"), formats.format_triangulation(tri))
    walks = [(random_walk(m, 0, rng.randint(1, cfg.walk_length), rng), 0) for _ in range(cfg.walks)]
    write(os.path.join(cfg.out_dir, "walks.txt"), formats.format_walks(walks))
    # homotopic pairs for the homotopy command
    for k, (w, at) in enumerate(walks[:3]):
        pair = [(w, at), (perturb(tri, w, 6, rng), at)]
        write(os.path.join(cfg.out_dir, f"walk_pair_{k}.txt"), formats.format_walks(pair))
    for k in range(cfg.drawings):
        for answer in (True, False):
            d = planted_drawing(m, rng, rng.randint(2, m.n_edges), answer)
            name = f"drawing_{k}_{'yes' if answer else 'no'}.txt"
            write(os.path.join(cfg.out_dir, name), formats.format_drawing(d))
    s = SCALE
    ring = [(-s, -s), (s, -s), (s, s), (-s, s), (-s, -s)]
    for turns in (1, 2):
        line = ring[:-1] * turns + [ring[0]]
        pl = PLDrawing([(0, 0)], [ring[0]], [(0, 0)], [line], ["p"])
        write(os.path.join(cfg.out_dir, f"plane_winding_{turns}.txt"), formats.format_pl(pl))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default=CorpusConfig.out_dir)
    p.add_argument("--genus", type=int, default=CorpusConfig.genus)
    p.add_argument("--seed", type=int, default=CorpusConfig.seed)
    p.add_argument("--drawings", type=int, default=CorpusConfig.drawings)
    a = p.parse_args()
    build(CorpusConfig(a.out_dir, a.genus, a.seed, a.drawings))


if __name__ == "__main__":
    main()
