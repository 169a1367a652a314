"""Random instances for tests, benchmarks and the ``gen`` command."""

from __future__ import annotations

import math
import random
from typing import Optional, Sequence

from .reducing_tri import ReducingTriangulation
from .surface_map import CombinatorialMap, Drawing, build_map, reverse_walk
from .errors import DisconnectedMap


def random_walk(m: CombinatorialMap, start: int, length: int, rng: random.Random) -> list[int]:
    out = []
    v = start
    for _ in range(length):
        d = rng.choice(m.rotations[v])
        out.append(d)
        v = m.vertex_of[d ^ 1]
    return out


def random_loop(m: CombinatorialMap, start: int, length: int, rng: random.Random) -> list[int]:
    """Closed walk at ``start``: a random walk closed up along a BFS path."""
    w = random_walk(m, start, length, rng)
    end = m.vertex_of[w[-1] ^ 1] if w else start
    return w + shortest_path(m, end, start)


def shortest_path(m: CombinatorialMap, a: int, b: int, avoid: int = -1) -> list[int]:
    """Breadth-first path from ``a`` to ``b``, optionally not using edge ``avoid``."""
    if a == b:
        return []
    prev = {a: None}
    frontier = [a]
    while frontier:
        nxt = []
        for v in frontier:
            for d in m.rotations[v]:
                if d >> 1 == avoid:
                    continue
                w = m.vertex_of[d ^ 1]
                if w not in prev:
                    prev[w] = d
                    if w == b:
                        path = []
                        while w != a:
                            path.append(prev[w])
                            w = m.vertex_of[prev[w]]
                        return path[::-1]
                    nxt.append(w)
        frontier = nxt
    raise DisconnectedMap(f"no path from {a} to {b}")


def perturb(tri: ReducingTriangulation, walk: Sequence[int], moves: int, rng: random.Random,
            closed: bool = False) -> list[int]:
    """Insert spurs and face detours at random positions (homotopy moves)."""
    m = tri.map
    w = list(walk)
    for _ in range(moves):
        if not w:
            return w
        k = rng.randint(0, len(w) - 1 if closed else len(w))
        v = m.vertex_of[w[k]] if k < len(w) else m.vertex_of[w[-1] ^ 1]
        d = rng.choice(m.rotations[v])
        f = m.face_of[d]
        if rng.random() < 0.5 or f in m.boundary_faces:
            # detours around a hole would change the class
            ins = [d, d ^ 1]
        else:
            cyc = m.faces[f]
            j = cyc.index(d)
            ins = cyc[j:] + cyc[:j]
            if rng.random() < 0.5:
                ins = reverse_walk(ins)
        w = w[:k] + ins + w[k:]
    return w


def random_graph_edges(n: int, extra: int, rng: random.Random, connected: bool = True):
    edges = []
    if connected:
        for v in range(1, n):
            edges.append((rng.randrange(v), v))
    for _ in range(extra):
        edges.append((rng.randrange(n), rng.randrange(n)))
    return edges


def random_drawing(host: CombinatorialMap, n: int, extra: int, walk_length: int,
                   rng: random.Random, connected: bool = True) -> Drawing:
    """A random graph with every edge drawn as a random walk between vertex images."""
    vimg = [rng.randrange(host.n_vertices) for _ in range(n)]
    edges = random_graph_edges(n, extra, rng, connected)
    images = []
    for u, v in edges:
        w = random_walk(host, vimg[u], rng.randint(0, walk_length), rng)
        end = host.vertex_of[w[-1] ^ 1] if w else vimg[u]
        images.append(w + shortest_path(host, end, vimg[v]))
    return Drawing(host, n, edges, vimg, images)


def random_small_host(rng: random.Random, max_vertices: int = 3, max_edges: int = 4) -> CombinatorialMap:
    """A connected map given by a random rotation system."""
    while True:
        nv = rng.randint(1, max_vertices)
        ne = rng.randint(max(1, nv - 1), max(max_edges, nv - 1))
        ends = []
        for v in range(1, nv):
            ends.append((rng.randrange(v), v))
        while len(ends) < ne:
            ends.append((rng.randrange(nv), rng.randrange(nv)))
        rot = [[] for _ in range(nv)]
        for e, (a, b) in enumerate(ends):
            rot[a].append(2 * e)
            rot[b].append(2 * e + 1)
        for r in rot:
            rng.shuffle(r)
        if any(not r for r in rot):
            continue
        return build_map(rot)


def random_weak_instance(rng: random.Random, max_strands: int = 4,
                         max_orderings: Optional[int] = None) -> Drawing:
    """Small drawing for checking the weak-embedding search against brute force.

    ``max_orderings`` caps the product over host edges of (strands)!, the
    number of strip orders an exhaustive search has to try.
    """
    while True:
        host = random_small_host(rng)
        ng = rng.randint(1, 4)
        vimg = [rng.randrange(host.n_vertices) for _ in range(ng)]
        edges, images = [], []
        for _ in range(rng.randint(1, 4)):
            u = rng.randrange(len(vimg))
            w = random_walk(host, vimg[u], rng.randint(0, 3), rng)
            end = host.vertex_of[w[-1] ^ 1] if w else vimg[u]
            cands = [x for x in range(len(vimg)) if vimg[x] == end]
            if not cands or rng.random() < 0.3:
                vimg.append(end)
                cands = [len(vimg) - 1]
            edges.append((u, rng.choice(cands)))
            images.append(w)
        counts = {}
        for w in images:
            for d in w:
                counts[d >> 1] = counts.get(d >> 1, 0) + 1
        if counts and max(counts.values()) > max_strands:
            continue
        if max_orderings is not None:
            total = 1
            for k in counts.values():
                total *= math.factorial(k)
            if total > max_orderings:
                continue
        return Drawing(host, len(vimg), edges, vimg, images)


def planted_many_classes(tri: ReducingTriangulation, classes: int, name: str = "a1") -> Drawing:
    """One vertex with loops along powers of a canonical loop: pairwise distinct classes."""
    d = tri.canonical[name]
    images = [[d] * k for k in range(1, classes + 1)]
    return Drawing(tri.map, 1, [(0, 0)] * classes, [0], images)


def heart_case(tri: ReducingTriangulation, rng: Optional[random.Random] = None,
               max_run: int = 6):
    """A closed walk with cyclic turns 4 3^k 2r 3^l, for exercising the heart case.

    Searches start darts and run lengths; returns ``(walk, turns)`` or None.
    """
    from .reducing_tri import RED

    m = tri.map
    darts = list(range(m.n_darts))
    if rng is not None:
        rng.shuffle(darts)
    for total in range(1, 2 * max_run + 1):
        for k in range(0, total + 1):
            pattern = [4] + [3] * k + [2] + [3] * (total - k)
            for start in darts:
                walk = [start]
                d = start
                for t in pattern[1:]:
                    d = tri.dart_by_turn(d, t)
                    walk.append(d)
                if tri.dart_by_turn(walk[-1], pattern[0]) != walk[0]:
                    continue
                turns = [tri.turn(walk[i - 1], walk[i]) for i in range(len(walk))]
                values = [t.value for t in turns]
                if values != pattern:
                    continue
                if turns[k + 1].tag != RED:
                    continue
                return walk, turns
    return None


def relocate(host: CombinatorialMap, drawing_edges, images, vimg, rng: random.Random):
    """Move every vertex along a path, dragging its incident edge ends (a homotopy)."""
    images = [list(w) for w in images]
    vimg = list(vimg)
    for i in range(len(vimg)):
        target = rng.randrange(host.n_vertices)
        path = shortest_path(host, vimg[i], target)
        for j, (u, v) in enumerate(drawing_edges):
            if u == i:
                images[j] = reverse_walk(path) + images[j]
            if v == i:
                images[j] = images[j] + path
        vimg[i] = target
    return images, vimg


def planted_drawing(host: CombinatorialMap, rng: random.Random, n_edges: int,
                    answer: bool = True, moves: int = 4) -> Drawing:
    """A drawing whose verdict is known by construction.

    Yes: a random subgraph of the host, relocated and perturbed by homotopy.
    No: the same plus a loop tracing a non-contractible host cycle twice,
    which is never homotopic to a simple curve.
    """
    es = rng.sample(range(host.n_edges), min(n_edges, host.n_edges))
    verts = sorted({host.vertex_of[2 * e] for e in es} | {host.vertex_of[2 * e + 1] for e in es})
    index = {v: i for i, v in enumerate(verts)}
    edges = [(index[host.vertex_of[2 * e]], index[host.vertex_of[2 * e + 1]]) for e in es]
    images = [[2 * e] for e in es]
    if not answer:
        cycle = _essential_cycle(host, rng)
        at = host.vertex_of[cycle[0]]
        if at not in index:
            index[at] = len(verts)
            verts.append(at)
        edges.append((index[at], index[at]))
        images.append(cycle + cycle)
    images, vimg = relocate(host, edges, images, verts, rng)
    walker = _MapOnly(host)
    images = [perturb(walker, w, rng.randint(0, moves), rng) for w in images]
    return Drawing(host, len(vimg), edges, vimg, images)


class _MapOnly:
    def __init__(self, m):
        self.map = m


def _essential_cycle(host: CombinatorialMap, rng: random.Random) -> list[int]:
    """An edge closed up by a shortest path avoiding it, chosen so the result is non-contractible."""
    from .cover_oracle import GroupModel

    group = GroupModel(host)
    edges = list(range(host.n_edges))
    rng.shuffle(edges)
    for e in edges:
        d = 2 * e
        try:
            cycle = [d] + shortest_path(host, host.vertex_of[d ^ 1], host.vertex_of[d], avoid=e)
        except DisconnectedMap:
            continue
        if not group.is_identity(group.word_of(cycle)):
            return cycle
    raise ValueError("host surface has no non-contractible cycle")


def grown_planted_drawing(host: CombinatorialMap, rng: random.Random, n: int) -> Drawing:
    """A planted Yes drawing grown to ``n`` vertices by pendant edges along random walks."""
    base = planted_drawing(host, rng, host.n_edges, True)
    edges, vimg = list(base.edges), list(base.vertex_image)
    images = [list(w) for w in base.edge_image]
    while len(vimg) < n:
        u = rng.randrange(len(vimg))
        w = random_walk(host, vimg[u], rng.randint(0, 6), rng)
        vimg.append(host.vertex_of[w[-1] ^ 1] if w else vimg[u])
        edges.append((u, len(vimg) - 1))
        images.append(w)
    return Drawing(host, len(vimg), edges, vimg, images)
