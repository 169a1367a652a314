"""Command-line interface: ``untangle <command> [options]``.

Verdict commands print ``VERDICT yes`` or ``VERDICT no``.  Exit codes:
0 success or yes, 1 no, 2 bad input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import formats
from .config import UntangleConfig
from .errors import BudgetExceeded, ContractibleInput, ExplorationBudgetExceeded, UntanglingError
from .factorize import NotUntangleable, factorize, factorize_boundary, factorize_torus
from .generators import heart_case, perturb, planted_drawing, random_drawing, random_walk
from .homotopy_tree import HomotopyTree
from .reducing_tri import build_reducing
from .untangle import untangle, untangle_plane
from .walks import ReductionStats, canonical_rotation, reduce_closed_walk, reduce_walk
from .weak_embed import is_weak_embedding

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class _Out:
    """Collects text lines and a JSON payload; prints one of them at the end."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: list[str] = []
        self.data: dict = {}

    def line(self, text: str):
        self.lines.append(text)

    def emit(self, stream):
        if self.as_json:
            stream.write(json.dumps(self.data, sort_keys=True) + "\n")
        else:
            stream.write("".join(t + "\n" for t in self.lines))


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _is_triangulation_text(text: str) -> bool:
    return any(ln.split("#", 1)[0].split()[:1] in (["color"], ["canonical"])
               for ln in text.splitlines())


def _load_host(path: str):
    """``(map, triangulation or None)`` from a map or triangulation file."""
    text = _read(path)
    if _is_triangulation_text(text):
        tri = formats.parse_triangulation(text)
        return tri.map, tri
    return formats.parse_map(text), None


def _seed(args) -> int:
    env = os.environ.get("UNTANGLE_SEED")
    return int(env) if env not in (None, "") else args.seed


def _verdict(out: _Out, answer: bool, reason: str = ""):
    word = "yes" if answer else "no"
    out.line(f"VERDICT {word}")
    if reason:
        out.line(f"# {reason}")
    out.data.update(verdict=word, reason=reason)
    return EXIT_OK if answer else EXIT_NO


def _end(end) -> str:
    loop, side = end
    return f"{loop}{'s' if side == 0 else 'e'}"


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, out):
    text = _read(args.map)
    if _is_triangulation_text(text) or args.reducing:
        tri = formats.parse_triangulation(text)
        m = tri.map
        out.line("# reducing triangulation")
    else:
        m = formats.parse_map(text)
    info = {"vertices": m.n_vertices, "edges": m.n_edges, "faces": m.n_faces,
            "genus": m.genus, "boundary": m.boundary_count}
    out.line("VALID " + " ".join(f"{k}={v}" for k, v in info.items()))
    out.data.update(valid=True, **info)
    return EXIT_OK


def cmd_reduce_walk(args, out):
    tri = formats.parse_triangulation(_read(args.tri))
    walks = formats.parse_walks(_read(args.walks), tri.map)
    results, total = [], ReductionStats()
    for walk, at in walks:
        stats = ReductionStats()
        if args.closed:
            try:
                red = reduce_closed_walk(tri, walk, stats) if walk else []
            except ContractibleInput:
                red = []
        else:
            red = reduce_walk(tri, walk, stats)
        start = at if at is not None else tri.map.vertex_of[walk[0]]
        out.line(formats.format_walk(red, start))
        results.append({"walk": red, "moves": stats.moves})
        total.moves += stats.moves
    out.line(f"# moves {total.moves}")
    out.data.update(walks=results, moves=total.moves)
    return EXIT_OK


def cmd_homotopy(args, out):
    tri = formats.parse_triangulation(_read(args.tri))
    walks = formats.parse_walks(_read(args.walks), tri.map)
    if len(walks) != 2:
        raise UntanglingError("homotopy needs exactly two walks")
    (w1, a1), (w2, a2) = walks
    if args.closed:
        def cls(w):
            try:
                return canonical_rotation(reduce_closed_walk(tri, w)) if w else ()
            except ContractibleInput:
                return ()
        same = cls(w1) == cls(w2)
    else:
        s1 = a1 if a1 is not None else tri.map.vertex_of[w1[0]]
        s2 = a2 if a2 is not None else tri.map.vertex_of[w2[0]]
        if s1 != s2:
            raise UntanglingError("walks start at different vertices")
        tree = HomotopyTree(tri, s1)
        same = tree.key_of(w1) is tree.key_of(w2)
    word = "yes" if same else "no"
    out.line(f"HOMOTOPIC {word}")
    out.data.update(homotopic=same)
    return EXIT_OK if same else EXIT_NO


def cmd_factorize(args, out):
    host, tri = _load_host(args.host)
    d = formats.parse_drawing(_read(args.drawing), host)
    if args.mode == "reducing":
        if tri is None:
            tri = formats.parse_triangulation(_read(args.host))
        fact = factorize(d, tri, cutoff=not args.no_cutoff)
    elif args.mode == "torus":
        fact = factorize_torus(d)
    else:
        fact = factorize_boundary(d)
    if isinstance(fact, NotUntangleable):
        return _verdict(out, False, fact.reason)
    out.line(formats.format_drawing(fact.loop_drawing()).rstrip("\n"))
    for u, c in enumerate(fact.gamma_vertex):
        out.line(f"gamma vertex {u} -> {c}")
    for i, g in enumerate(fact.gamma_edge):
        out.line(f"gamma edge {i} -> " + ("none" if g is None else f"{g[0]} {'+' if g[1] > 0 else '-'}"))
    out.line(f"# loops {fact.n_loops} extends {fact.stats.extends}")
    out.data.update(loops=fact.loop_walks, loop_vertex=fact.loop_vertex,
                    base_vertex=fact.base_vertex, gamma_vertex=fact.gamma_vertex,
                    gamma_edge=fact.gamma_edge, extends=fact.stats.extends)
    return EXIT_OK


def cmd_weak_embed(args, out):
    host, _ = _load_host(args.host)
    d = formats.parse_drawing(_read(args.drawing), host)
    res = is_weak_embedding(d, budget=args.budget)
    code = _verdict(out, res.ok)
    if res.ok:
        for e, order in sorted(res.certificate.strips.items()):
            out.line(f"strip {e}: " + " ".join(f"{i}.{p}" for i, p in order))
        out.data["strips"] = {str(e): order for e, order in res.certificate.strips.items()}
    out.line(f"# search nodes {res.nodes}")
    out.data["search_nodes"] = res.nodes
    return code


def _report(out, verdict):
    code = _verdict(out, verdict.answer, verdict.reason)
    if verdict.answer:
        for v, ends in sorted(verdict.rotation.items()):
            out.line(f"rotation {v}: " + " ".join(_end(e) for e in ends))
    out.line(f"# stage {verdict.stage}")
    out.data.update(stage=verdict.stage,
                    rotation={str(v): [list(e) for e in ends] for v, ends in verdict.rotation.items()},
                    stats={k: v for k, v in verdict.stats.items()
                           if isinstance(v, (int, float, str))})
    return code


def cmd_untangle(args, out):
    host, tri = _load_host(args.host)
    d = formats.parse_drawing(_read(args.drawing), host)
    return _report(out, untangle(d, tri, config=UntangleConfig(budget=args.budget)))


def cmd_untangle_plane(args, out):
    pl = formats.parse_pl(_read(args.input))
    verdict = untangle_plane(pl, config=UntangleConfig(budget=args.budget))
    code = _report(out, verdict)
    for key in ("obstacles", "max_stabbing", "input_size", "output_size"):
        if key in verdict.stats:
            out.line(f"# {key} {verdict.stats[key]}")
    return code


def cmd_gen(args, out):
    rng = random.Random(_seed(args))
    tri = build_reducing(args.genus)
    m = tri.map
    if args.kind == "tri":
        text = formats.format_triangulation(tri)
    elif args.kind == "walks":
        walks = []
        for _ in range(args.count):
            w = random_walk(m, rng.randrange(m.n_vertices), rng.randint(1, args.length), rng)
            if args.moves:
                w = perturb(tri, w, args.moves, rng)
            walks.append((w, m.vertex_of[w[0]] if w else 0))
        text = formats.format_walks(walks)
    elif args.kind == "drawing":
        if args.planted is not None:
            d = planted_drawing(m, rng, args.edges, args.planted == "yes")
        else:
            d = random_drawing(m, args.vertices, args.edges, args.length, rng)
        text = formats.format_drawing(d)
    else:
        found = heart_case(tri, rng)
        if found is None:
            raise UntanglingError("no heart-case walk found")
        walk, turns = found
        text = formats.format_walks([(walk, m.vertex_of[walk[0]])])
        text += "# turns " + " ".join(f"{t.value}{t.tag}" for t in turns) + "\n"
    for ln in text.rstrip("\n").split("\n"):
        out.line(ln)
    out.data["text"] = text
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="untangle", description=__doc__.split("\n")[0])
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        s.set_defaults(func=func)
        return s

    s = add("validate", cmd_validate, "parse a map or triangulation and report its surface")
    s.add_argument("map")
    s.add_argument("--reducing", action="store_true", help="require a reducing triangulation")

    for name, func, text in (("reduce-walk", cmd_reduce_walk, "reduce walks to their unique reduced form"),
                             ("homotopy", cmd_homotopy, "test two walks for homotopy")):
        s = add(name, func, text)
        s.add_argument("--tri", required=True)
        s.add_argument("--walks", required=True)
        s.add_argument("--closed", action="store_true", help="treat walks as closed (free homotopy)")

    s = add("factorize", cmd_factorize, "factor a drawing through a sparse loop graph")
    s.add_argument("--host", required=True)
    s.add_argument("--drawing", required=True)
    s.add_argument("--mode", choices=("reducing", "torus", "boundary"), default="reducing")
    s.add_argument("--no-cutoff", action="store_true", help="disable the 12g class cutoff")

    for name, func, text in (("weak-embed", cmd_weak_embed, "decide whether a drawing is a weak embedding"),
                             ("untangle", cmd_untangle, "decide whether a drawing can be untangled")):
        s = add(name, func, text)
        s.add_argument("--host", required=True)
        s.add_argument("--drawing", required=True)
        s.add_argument("--budget", type=int, default=UntangleConfig.budget)

    s = add("untangle-plane", cmd_untangle_plane, "untangle a PL drawing in the punctured plane")
    s.add_argument("--input", required=True)
    s.add_argument("--budget", type=int, default=UntangleConfig.budget)

    s = add("gen", cmd_gen, "generate instances")
    s.add_argument("kind", choices=("tri", "walks", "drawing", "heart"))
    s.add_argument("--genus", type=int, default=2)
    s.add_argument("--seed", type=int, default=0, help="overridden by UNTANGLE_SEED")
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--length", type=int, default=20)
    s.add_argument("--moves", type=int, default=0, help="homotopy moves applied to each walk")
    s.add_argument("--vertices", type=int, default=5)
    s.add_argument("--edges", type=int, default=6)
    s.add_argument("--planted", choices=("yes", "no"))
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Out(getattr(args, "json", False))
    try:
        code = args.func(args, out)
    except (BudgetExceeded, ExplorationBudgetExceeded) as exc:
        sys.stderr.write(f"error: budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except (UntanglingError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    out.emit(sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
