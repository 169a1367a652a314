"""Acceptance criteria, one test each.

Every test records a ``CRITERION k PASS|FAIL`` line, printed at the end of the
pytest run, and asserts the criterion at its stated tolerance.
"""

import itertools
import math
import random
import time
from collections import Counter

import pytest

from hyperbolic_cover import OneVertexCover
from torus_lattice import basepoint, crossings, interior_lattice_points
from untangling.cover_oracle import CoverOracle
from untangling.errors import ContractibleInput
from untangling.factorize import NotUntangleable, factorize
from untangling.generators import (
    grown_planted_drawing,
    perturb,
    planted_many_classes,
    random_drawing,
    random_walk,
    random_weak_instance,
)
from untangling.homotopy_tree import HomotopyTree
from untangling.reducing_tri import build_reducing
from untangling.schema import SCALE, PLDrawing, torus_schema
from untangling.surface_map import Drawing, build_map
from untangling.untangle import (
    check_sparse_reducing,
    torus_loop_verdict,
    untangle,
    untangle_loop_graph_torus,
    untangle_plane,
)
from untangling.walks import (
    ReductionStats,
    canonical_rotation,
    potential,
    reduce_closed_walk,
    reduce_closed_walk_based,
    reduce_walk,
    reverse,
)
from untangling.weak_embed import check_certificate, exhaustive_weak_embed_oracle, is_weak_embedding

# simple disk-bounding closed walks in build_reducing(2) with the disk on the
# left and a fixed first dart, by length 3..10; computed by enumeration in the
# universal cover (one-vertex {3,18} tiling), then frozen
DISK_WALKS_BY_LENGTH = {3: 1, 4: 2, 5: 5, 6: 14, 7: 42, 8: 132, 9: 429, 10: 1430}
DISK_WALKS_BOTH_SIDES = 4110


def drawing_size(d):
    """Complexity of a drawing: vertices plus edges plus image darts."""
    return d.n_vertices + sum(len(w) + 1 for w in d.edge_image)


def record(report, k, ok, detail):
    line = f"CRITERION {k} {'PASS' if ok else 'FAIL'} {detail}"
    report.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def corpus():
    """1000 walk pairs (w, perturbed w) per genus, with an oracle per host."""
    rng = random.Random(20260101)
    out = {}
    for g in (2, 3):
        tri = build_reducing(g)
        pairs = []
        for _ in range(1000):
            w = random_walk(tri.map, 0, rng.randint(1, 200), rng)
            pairs.append((w, perturb(tri, w, rng.randint(1, 20), rng)))
        out[g] = (tri, CoverOracle(tri.map), pairs)
    return out


def test_criterion_1_uniqueness(corpus, acceptance_report):
    start = time.perf_counter()
    failures = 0
    for tri, oracle, pairs in corpus.values():
        for a, b in pairs:
            if reduce_walk(tri, a) != reduce_walk(tri, b) or not oracle.homotopic(a, b):
                failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 10
    record(acceptance_report, 1, ok, f"pairs=2000 failures={failures} time={elapsed:.2f}s (<10s)")
    assert ok


def test_criterion_2_reversal(corpus, acceptance_report):
    failures = sum(reduce_walk(tri, reverse(w)) != reverse(reduce_walk(tri, w))
                   for tri, _, pairs in corpus.values() for pair in pairs for w in pair)
    ok = failures == 0
    record(acceptance_report, 2, ok, f"walks=4000 failures={failures}")
    assert ok


def test_criterion_3_move_bound(corpus, acceptance_report):
    violations = 0
    closed_violations = 0
    worst = 0.0
    for tri, _, pairs in corpus.values():
        for pair in pairs:
            for w in pair:
                stats = ReductionStats()
                reduce_walk(tri, w, stats)
                phi = potential(tri, w)
                violations += stats.moves > phi
                worst = max(worst, stats.moves / max(phi, 1))
                try:
                    res = reduce_closed_walk_based(tri, w)
                except ContractibleInput:
                    continue
                closed_violations += res.stats.moves > potential(tri, w, closed=True) + 1
    ok = violations == 0 and closed_violations == 0
    record(acceptance_report, 3, ok, f"open_violations={violations} closed_violations="
           f"{closed_violations} max_moves/phi={worst:.3f}")
    assert ok


def test_criterion_4_free_homotopy(acceptance_report):
    rng = random.Random(4)
    tri = build_reducing(2)
    oracle = CoverOracle(tri.map)
    failures = checked = 0
    while checked < 300:
        w = random_walk(tri.map, 0, rng.randint(1, 60), rng)
        if oracle.is_contractible_loop(w):
            continue
        checked += 1
        ref = canonical_rotation(reduce_closed_walk(tri, w))
        variants = [w[k:] + w[:k] for k in range(len(w))]
        for _ in range(5):
            p = random_walk(tri.map, 0, rng.randint(1, 30), rng)
            variants.append(p + w + reverse(p))
        failures += sum(canonical_rotation(reduce_closed_walk(tri, v)) != ref for v in variants)
    ok = failures == 0
    record(acceptance_report, 4, ok, f"closed_walks={checked} failures={failures}")
    assert ok


def test_criterion_5_gauss_bonnet(acceptance_report):
    tri = build_reducing(2)
    cover = OneVertexCover(tri.map)
    # the tiling is vertex-transitive and rotation by one dart is a symmetry,
    # so fixing the first dart loses no turn sequence
    cycles = cover.simple_cycles(10, [tri.map.rotations[0][0]])
    by_length = Counter()
    violations = 0
    for c in cycles:
        if not cover.disk_on_left(c):
            continue
        by_length[len(c)] += 1
        m = Counter(cover.turn(c[i - 1], c[i]) for i in range(len(c)))
        if 2 * m[1] + m[2] < 6 + sum(v for k, v in m.items() if k >= 4):
            violations += 1
    ok = (violations == 0 and dict(by_length) == DISK_WALKS_BY_LENGTH
          and len(cycles) == DISK_WALKS_BOTH_SIDES)
    record(acceptance_report, 5, ok, f"cycles={len(cycles)} disk_on_left={sum(by_length.values())} "
           f"violations={violations}")
    assert ok


def test_criterion_6_homotopy_tree(acceptance_report):
    rng = random.Random(6)
    tri = build_reducing(3)
    tree = HomotopyTree(tri, 0)
    mismatches = 0
    worst_rewrite = 0
    for _ in range(500):
        w = random_walk(tri.map, 0, rng.randint(0, 200), rng)
        key = tree.trivial_key()
        for d in w:
            key = tree.extend(key, d)
            worst_rewrite = max(worst_rewrite, tree.stats.max_rewrite)
        if key is not tree.key_of(w) or tree.walk_of(key) != reduce_walk(tri, w):
            mismatches += 1
    # extend counts per factorization run, relative to g * n
    ratio = 0.0
    for g in (2, 3):
        t = build_reducing(g)
        for _ in range(20):
            n = rng.randint(1, 300)
            d = random_drawing(t.map, n, rng.randint(0, n // 5 + 2), 6, rng)
            fact = factorize(d, t, cutoff=False)
            ratio = max(ratio, fact.stats.extends / (g * drawing_size(d)))
    C = 12
    ok = mismatches == 0 and worst_rewrite <= 49 and ratio <= C
    record(acceptance_report, 6, ok, f"walks=500 mismatches={mismatches} max_rewrite={worst_rewrite} "
           f"(<=49) extends/(g*n) max={ratio:.2f} (C={C})")
    assert ok


def test_criterion_7_factorization(acceptance_report):
    rng = random.Random(7)
    tris = {g: build_reducing(g) for g in (2, 3, 4)}
    oracles = {g: CoverOracle(t.map) for g, t in tris.items()}
    failures = 0
    size_ratio = 0.0
    for i in range(200):
        g = (2, 3, 4)[i % 3]
        tri = tris[g]
        n = rng.randint(1, 500)
        d = random_drawing(tri.map, n, rng.randint(0, n // 5 + 2), 6, rng)
        # random drawings often exceed 12g classes; validity is checked without the cutoff
        fact = factorize(d, tri, cutoff=False)
        try:
            check_sparse_reducing(fact.loop_drawing(), tri)
        except Exception:
            failures += 1
            continue
        for e, (u, _) in enumerate(d.edges):
            if not oracles[g].homotopic(d.edge_image[e], fact.composed_image(d, e),
                                        d.vertex_image[u]):
                failures += 1
                break
        size_ratio = max(size_ratio, fact.size / (g * drawing_size(d)))
    planted = factorize(planted_many_classes(tris[2], 25), tris[2])
    C = 12
    ok = failures == 0 and size_ratio <= C and isinstance(planted, NotUntangleable)
    record(acceptance_report, 7, ok, f"drawings=200 failures={failures} |output|/(g*n) max="
           f"{size_ratio:.2f} (C={C}) planted_25={'NotUntangleable' if not planted else 'factorized'}")
    assert ok


def _torus_walk(s):
    a, b = s
    return ([0] * a if a >= 0 else [1] * -a) + ([2] * b if b >= 0 else [3] * -b)


def test_criterion_8_torus_oracle(acceptance_report):
    start = time.perf_counter()
    host = torus_schema().map
    classes = [(a, b) for a in range(-5, 6) for b in range(-5, 6) if (a, b) > (0, 0)]
    same, apart = {}, {}
    for i, u in enumerate(classes):
        for v in classes[i + 1:]:
            same[u, v] = same[v, u] = crossings(u, v)
    for u in classes:
        for v in classes:
            apart[u, v] = crossings(u, v, basepoint(0), basepoint(1))

    def geometric(components):
        loops = [(k, s) for k, sigs in enumerate(components) for s in sigs]
        if any(interior_lattice_points(s) for _, s in loops):
            return False
        for (k, u), (l, v) in itertools.combinations(loops, 2):
            if (same[u, v] if k == l else apart[u, v]):
                return False
        return True

    configs = [[[u]] for u in classes]
    configs += [[[u, v]] for u, v in itertools.combinations(classes, 2)]
    configs += [[[u], [v]] for u, v in itertools.combinations_with_replacement(classes, 2)]
    configs += [[list(c)] for c in itertools.combinations(classes, 3)]
    mismatches = 0
    for comps in configs:
        edges, images = [], []
        for k, sigs in enumerate(comps):
            for s in sigs:
                edges.append((k, k))
                images.append(_torus_walk(s))
        lam = Drawing(host, len(comps), edges, [0] * len(comps), images)
        mismatches += bool(untangle_loop_graph_torus(lam)) != geometric(comps)
    # two loops at one vertex next to a single loop elsewhere
    for u, v in itertools.combinations(classes, 2):
        for w in classes:
            mismatches += torus_loop_verdict([[u, v], [w]])[0] != geometric([[u, v], [w]])
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 5
    record(acceptance_report, 8, ok, f"configurations={len(configs) + 1770 * 60} "
           f"mismatches={mismatches} time={elapsed:.2f}s (<5s)")
    assert ok


def _square(turns=1):
    s = SCALE
    ring = [(-s, -s), (s, -s), (s, s), (-s, s)]
    return ring * turns + [ring[0]]


def _circle(turns=1):
    return PLDrawing([(0, 0)], [(-SCALE, -SCALE)], [(0, 0)], [_square(turns)])


def test_criterion_9_primitivity_negatives(acceptance_report):
    tri = build_reducing(2)
    a = tri.canonical["a1"]
    at = tri.map.vertex_of[a]
    torus = torus_schema().map
    annulus = build_map([[0, 1]], boundary=[0, 1])
    results = {
        "a1^2": untangle(Drawing(tri.map, 1, [(0, 0)], [at], [[a, a]]), tri),
        "torus(2,2)": untangle(Drawing(torus, 1, [(0, 0)], [0], [[0, 0, 2, 2]])),
        "annulus x^2": untangle(Drawing(annulus, 1, [(0, 0)], [0], [[0, 0]])),
        "plane winding 2": untangle_plane(_circle(2)),
    }
    ok = not any(results.values())
    record(acceptance_report, 9, ok, " ".join(f"{k}={v.word}" for k, v in results.items()))
    assert ok


def _angular_order(signatures):
    ends = []
    for i, (x, y) in signatures.items():
        ends.append((math.atan2(y, x), (i, 0)))
        ends.append((math.atan2(-y, -x), (i, 1)))
    return [e for _, e in sorted(ends)]


def _same_cycle(a, b):
    return len(a) == len(b) and any(a[k:] + a[:k] == b for k in range(len(a)))


def test_criterion_10_positives(acceptance_report):
    tri = build_reducing(2)
    a = tri.canonical["a1"]
    canonical = untangle(Drawing(tri.map, 1, [(0, 0)], [tri.map.vertex_of[a]], [[a]]), tri)
    signatures = {0: (1, 0), 1: (0, 1), 2: (1, 1)}
    lam = Drawing(torus_schema().map, 1, [(0, 0)] * 3, [0],
                  [_torus_walk(s) for s in signatures.values()])
    triple = untangle_loop_graph_torus(lam)
    order_ok = bool(triple) and _same_cycle(triple.rotation[0], _angular_order(signatures))
    circle = untangle_plane(_circle(1))
    ok = bool(canonical) and bool(triple) and order_ok and bool(circle)
    record(acceptance_report, 10, ok, f"a1={canonical.word} torus_triple={triple.word} "
           f"rotation_order={'match' if order_ok else 'mismatch'} plane_circle={circle.word}")
    assert ok


def test_criterion_11_weak_embedding(acceptance_report):
    rng = random.Random(11)
    mismatches = bad_certificates = 0
    answers = Counter()
    for _ in range(300):
        d = random_weak_instance(rng, max_strands=10, max_orderings=5040)
        res = is_weak_embedding(d)
        mismatches += res.ok != exhaustive_weak_embed_oracle(d, max_strands=10)
        if res:
            bad_certificates += not check_certificate(d, res.certificate)
        answers["yes" if res else "no"] += 1
    ok = mismatches == 0 and bad_certificates == 0
    record(acceptance_report, 11, ok, f"instances=300 yes={answers['yes']} no={answers['no']} "
           f"mismatches={mismatches} bad_certificates={bad_certificates}")
    assert ok


def test_criterion_12_scaling_report(acceptance_report):
    rng = random.Random(12)
    tri = build_reducing(2)
    sizes = [100, 200, 400, 800, 1600]
    ops = []
    for n in sizes:
        verdict = untangle(grown_planted_drawing(tri.map, rng, n), tri)
        assert verdict
        ops.append(verdict.stats["operations"])
    x = [n * math.log(n) for n in sizes]
    c = sum(o * xi for o, xi in zip(ops, x)) / sum(xi * xi for xi in x)
    ratios = [o / (c * xi) for o, xi in zip(ops, x)]
    upper = all(r <= 1.5 for r in ratios)
    band = all(1 / 1.5 <= r <= 1.5 for r in ratios)
    # reported only: the criterion does not gate the suite
    record(acceptance_report, 12, upper and band,
           f"(report) C={c:.3f} ops={ops} ratio_to_fit={[round(r, 2) for r in ratios]} "
           f"below_1.5x_fit={upper} within_1.5x_band={band}")
