"""Surface conversion front-ends.

Every conversion first collapses the host to a single vertex (spanning-tree
contraction), then reshapes the one-vertex map:

* closed surfaces: delete face-separating edges until one face is left and
  normalize its boundary word by cut-and-paste into commutator blocks
  ``p q p' q'``, which are then identified with the canonical loops of the
  target (a reducing triangulation for genus two and up, the two-loop
  schema on the torus);
* surfaces with boundary: delete edges between an unpunctured face and its
  parent in a dual forest rooted at the punctured faces (a loop system).

Each host dart is tracked as a homotopic walk in the target, so pushing a
drawing through is a substitution followed by spur cancellation.

The plane front-end builds the vertical decomposition of a box minus the
obstacles: one upward and one downward ray per obstacle, under the symbolic
shear ``x + eps*y`` so that points are compared lexicographically.  Its dual
has one vertex per slab and one edge per ray.
"""

from __future__ import annotations

import bisect
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (
    HasBoundary,
    MalformedPolyline,
    NoBoundary,
    ObstacleOnDrawing,
    UnsupportedNoObstacles,
    WrongGenus,
)
from .reducing_tri import ReducingTriangulation, build_reducing
from .surface_map import (
    CombinatorialMap,
    Drawing,
    build_map,
    contract_edges,
    delete_edges,
    map_from_faces,
    remove_monogons_and_bigons,
    reroute,
    reverse_walk,
)


@dataclass
class Conversion:
    """Target host, converted drawing, and each source dart as a target walk."""

    target: object
    drawing: Drawing
    dart_image: dict
    stats: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.target, self.drawing))


@dataclass
class CanonicalSchema:
    """One-vertex map whose single face reads ``a1 b1 a1' b1' ...``."""

    map: CombinatorialMap
    loops: dict
    word: list[int]

    @property
    def genus(self) -> int:
        return len(self.word) // 4


# ---------------------------------------------------------------------------
# shared steps


def spanning_tree(m: CombinatorialMap) -> list[int]:
    """Edges of a BFS spanning forest of the host."""
    seen = [False] * m.n_vertices
    tree = []
    for root in range(m.n_vertices):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for d in m.rotations[v]:
                w = m.vertex_of[d ^ 1]
                if not seen[w]:
                    seen[w] = True
                    tree.append(d >> 1)
                    queue.append(w)
    return tree


def _compose(image: dict, dmap_walks: dict) -> dict:
    return {d: reroute(w, dmap_walks) for d, w in image.items()}


def _collapse(m: CombinatorialMap):
    """Contract a spanning tree: (one-vertex map, source dart -> walk)."""
    tree = set(spanning_tree(m))
    new, dmap = contract_edges(m, tree)
    image = {d: ([dmap[d]] if (d >> 1) not in tree else []) for d in range(m.n_darts)}
    return new, image


def _delete_with_reroute(m: CombinatorialMap, dart: int):
    """Delete the edge of ``dart``, rerouting it around the rest of its face."""
    cyc = m.faces[m.face_of[dart]]
    k = cyc.index(dart)
    rest = cyc[k + 1:] + cyc[:k]
    new, dmap = delete_edges(m, [dart >> 1])
    walks = {}
    for x in range(m.n_darts):
        if x == dart:
            walks[x] = [dmap[y] for y in reverse_walk(rest)]
        elif x == dart ^ 1:
            walks[x] = [dmap[y] for y in rest]
        else:
            walks[x] = [dmap[x]]
    return new, walks


def _merge_faces(m: CombinatorialMap, image: dict):
    """Delete face-separating edges, shortest face first, until one face remains."""
    while m.n_faces > 1:
        best = None
        for f, cyc in enumerate(m.faces):
            for d in cyc:
                if m.face_of[d ^ 1] != f:
                    if best is None or len(cyc) < len(m.faces[m.face_of[best]]):
                        best = d
                    break
        m, walks = _delete_with_reroute(m, best)
        image = _compose(image, walks)
    return m, image


# ---------------------------------------------------------------------------
# cut-and-paste normalization of a one-face word


def _cut_and_glue(word, i, j, new_dart, glue_edge):
    """Cut the polygon from corner ``i`` to corner ``j`` and reglue along ``glue_edge``.

    Corner ``k`` sits before ``word[k]``.  The diagonal is the new dart.
    Returns ``(new word, glued dart, its expression)``.
    """
    n = len(word)
    r = word[i:] + word[:i]
    jj = (j - i) % n
    first = r[:jj] + [new_dart ^ 1]
    second = [new_dart] + r[jj:]
    for t in (2 * glue_edge, 2 * glue_edge + 1):
        if t in first and (t ^ 1) in second:
            k = first.index(t)
            before, after = first[:k], first[k + 1:]
            k2 = second.index(t ^ 1)
            head, tail = second[:k2], second[k2 + 1:]
            expr = reverse_walk(before) + reverse_walk(after)
            return head + after + before + tail, t, expr
    raise ValueError("glue edge does not straddle the cut")


def _free(word):
    out = []
    for d in word:
        if out and out[-1] == d ^ 1:
            out.pop()
        else:
            out.append(d)
    return out


def normalize_word(word: Sequence[int], n_edges: int):
    """Bring the boundary word of a one-vertex one-face map to commutator blocks.

    Returns ``(blocks, final_word, expand)`` where ``blocks`` lists ``(p, q)``
    dart pairs in cyclic order, ``final_word`` is the concatenation of the
    blocks ``p q p^1 q^1``, and ``expand(d)`` rewrites an input dart as a
    homotopic word in final darts.
    """
    word = list(word)
    if len(word) % 4:
        raise WrongGenus("one-face word of a non-orientable or odd size")
    defs: dict[int, list[int]] = {}  # eliminated edge -> word for its even dart
    next_edge = n_edges
    block_edges: set[int] = set()
    blocks: list[tuple[int, int]] = []

    def position(w):
        return {d: k for k, d in enumerate(w)}

    while len(block_edges) < len(word) // 2:
        pos = position(word)
        n = len(word)
        start = word.index(min(d for d in word if (d >> 1) not in block_edges))
        found = None
        for off in range(n):
            x = word[(start + off) % n]
            if (x >> 1) in block_edges:
                continue
            px, pxb = pos[x], pos[x ^ 1]
            span = (pxb - px) % n
            for s in range(1, span):
                y = word[(px + s) % n]
                if (y >> 1) in block_edges or (y >> 1) == (x >> 1):
                    continue
                if (pos[y ^ 1] - px) % n > span:
                    found = (x, y)
                    break
            if found:
                break
        if found is None:
            raise WrongGenus("one-face word has an unlinked letter")
        x, y = found
        px = pos[x]
        r = word[px:] + word[:px]
        if r[1] == y and r[2] == x ^ 1 and r[3] == y ^ 1:
            blocks.append((x, y))
            block_edges.update((x >> 1, y >> 1))
            continue
        # x B y C x' D y' E  ->  c D C x' c' x B E
        c = 2 * next_edge
        next_edge += 1
        j = (pos[x ^ 1] + 1) % n
        word, t, expr = _cut_and_glue(word, px, j, c, y >> 1)
        defs[t >> 1] = expr if t % 2 == 0 else reverse_walk(expr)
        # c D C x' c' x B E  ->  d c' d' c D C B E
        pos = position(word)
        d = 2 * next_edge
        next_edge += 1
        word, t, expr = _cut_and_glue(word, pos[c], pos[c ^ 1], d, x >> 1)
        defs[t >> 1] = expr if t % 2 == 0 else reverse_walk(expr)
        blocks.append((d, c ^ 1))
        block_edges.update((d >> 1, c >> 1))

    # order the blocks as they appear in the word
    pos = {dd: k for k, dd in enumerate(word)}
    blocks.sort(key=lambda b: pos[b[0]])
    if blocks:
        k0 = pos[blocks[0][0]]
        word = word[k0:] + word[:k0]
    expected = [z for p, q in blocks for z in (p, q, p ^ 1, q ^ 1)]
    if word != expected:
        raise AssertionError("normalized word is not a product of commutators")

    memo: dict[int, list[int]] = {}

    def expand_edge(e):
        if e not in defs:
            return [2 * e]
        if e not in memo:
            out = []
            for z in defs[e]:
                out.extend(expand_dart(z))
            memo[e] = _free(out)
        return memo[e]

    def expand_dart(z):
        w = expand_edge(z >> 1)
        return w if z % 2 == 0 else reverse_walk(w)

    return blocks, word, expand_dart


def _one_face(drawing: Drawing):
    """Collapse, clean and merge the host; normalize its single face."""
    m, image = _collapse(drawing.host)
    m2, clean = remove_monogons_and_bigons(m)
    image = _compose(image, clean)
    m3, image = _merge_faces(m2, image)
    if m3.n_edges == 0:
        return m3, image, [], [], None
    blocks, word, expand = normalize_word(m3.faces[0], m3.n_edges)
    return m3, image, blocks, word, expand


def _push(drawing: Drawing, target_map: CombinatorialMap, dart_image: dict, vertex_map) -> Drawing:
    images = [reroute(w, dart_image) for w in drawing.edge_image]
    vimg = [vertex_map(v) for v in drawing.vertex_image]
    return Drawing(target_map, drawing.n_vertices, list(drawing.edges), vimg, images,
                   dict(drawing.names))


def _letters_to_target(blocks, expand, image, target_letters):
    """Map final block letters to target darts and compose with the source image."""
    letter = {}
    for k, (p, q) in enumerate(blocks):
        a, b = target_letters[k]
        for src, dst in ((p, a), (q, b)):
            letter[src] = [dst]
            letter[src ^ 1] = [dst ^ 1]
    one_vertex = {}
    for d, w in image.items():
        out = []
        for z in w:
            out.extend(expand(z))
        one_vertex[d] = reroute(_free(out), letter)
    return one_vertex


def _schema_face(tri: ReducingTriangulation) -> list[tuple[int, int]]:
    """Canonical (a_k, b_k) darts of the triangulation, in schema order."""
    return [(tri.canonical[f"a{k + 1}"], tri.canonical[f"b{k + 1}"])
            for k in range(tri.genus)]


def _size_stats(drawing: Drawing, new: Drawing) -> dict:
    before = sum(len(w) for w in drawing.edge_image)
    after = sum(len(w) for w in new.edge_image)
    return {"input_size": before, "output_size": after,
            "ratio": (after / before) if before else 0.0}


# ---------------------------------------------------------------------------
# public conversions


def to_reducing(drawing: Drawing, tri: Optional[ReducingTriangulation] = None) -> Conversion:
    """Homotopic drawing on the one-vertex reducing triangulation of the same genus."""
    h = drawing.host
    if h.boundary_faces:
        raise HasBoundary("host has boundary faces")
    if h.genus < 2:
        raise WrongGenus(f"genus {h.genus} < 2")
    if tri is None:
        tri = build_reducing(h.genus)
    elif tri.genus != h.genus:
        raise WrongGenus("target triangulation has a different genus")
    _, image, blocks, _, expand = _one_face(drawing)
    dart_image = _letters_to_target(blocks, expand, image, _schema_face(tri))
    new = _push(drawing, tri.map, dart_image, lambda v: 0)
    return Conversion(tri, new, dart_image, _size_stats(drawing, new))


def torus_schema() -> CanonicalSchema:
    m = map_from_faces([[0, 2, 1, 3]])
    return CanonicalSchema(m, {"q1": 0, "q2": 2}, [0, 2, 1, 3])


def to_torus_schema(drawing: Drawing) -> Conversion:
    """Homotopic drawing on the two-loop torus schema (darts 0 = q1, 2 = q2)."""
    h = drawing.host
    if h.boundary_faces:
        raise HasBoundary("host has boundary faces")
    if h.genus != 1:
        raise WrongGenus(f"genus {h.genus} is not 1")
    q = torus_schema()
    _, image, blocks, _, expand = _one_face(drawing)
    dart_image = _letters_to_target(blocks, expand, image, [(0, 2)])
    new = _push(drawing, q.map, dart_image, lambda v: 0)
    return Conversion(q, new, dart_image, _size_stats(drawing, new))


def to_loop_system(drawing: Drawing) -> Conversion:
    """Homotopic drawing on a one-vertex map whose faces each hold one boundary."""
    h = drawing.host
    if not h.boundary_faces:
        raise NoBoundary("host has no boundary")
    m, image = _collapse(h)
    # multi-source BFS over the dual from the punctured faces
    depth = {f: 0 for f in m.boundary_faces}
    parent_dart = {}
    queue = deque(sorted(m.boundary_faces))
    while queue:
        f = queue.popleft()
        for d in m.faces[f]:
            g = m.face_of[d ^ 1]
            if g not in depth:
                depth[g] = depth[f] + 1
                parent_dart[g] = d ^ 1  # dart of the separating edge on g's side
                queue.append(g)
    order = sorted(parent_dart, key=lambda f: -depth[f])
    pending = [parent_dart[f] for f in order]
    while pending:
        d = pending.pop(0)
        m, walks = _delete_with_reroute(m, d)
        image = _compose(image, walks)
        # the remaining parent edges survive, so each keeps a single dart
        pending = [walks[x][0] for x in pending]
    new = _push(drawing, m, image, lambda v: 0)
    return Conversion(m, new, image, _size_stats(drawing, new))


# ---------------------------------------------------------------------------
# the punctured plane

SCALE = 10 ** 9


@dataclass
class PLDrawing:
    """Obstacles, vertex points and polylines in fixed point (units of 1e-9)."""

    obstacles: list[tuple[int, int]]
    points: list[tuple[int, int]]
    edges: list[tuple[int, int]]
    polylines: list[list[tuple[int, int]]]
    vertex_ids: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.points) + sum(max(0, len(p) - 1) for p in self.polylines)

    def validate(self):
        for i, ((u, v), line) in enumerate(zip(self.edges, self.polylines)):
            if len(line) < 2:
                raise MalformedPolyline(f"edge {i} has fewer than two points")
            if line[0] != self.points[u] or line[-1] != self.points[v]:
                raise MalformedPolyline(f"edge {i} does not join its endpoints")
            for a, b in zip(line, line[1:]):
                if a == b:
                    raise MalformedPolyline(f"edge {i} has a zero-length segment")
        if len(set(self.obstacles)) != len(self.obstacles):
            raise MalformedPolyline("duplicate obstacle")
        obs = set(self.obstacles)
        for v, p in enumerate(self.points):
            if p in obs:
                raise ObstacleOnDrawing(f"vertex {v} sits on an obstacle")


def _cross(a, b, c) -> int:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


@dataclass
class Decomposition:
    """Vertical rays above and below each obstacle, sorted lexicographically."""

    obstacles: list[tuple[int, int]]
    map: CombinatorialMap

    def upper_edge(self, i: int) -> int:
        return 2 * i

    def lower_edge(self, i: int) -> int:
        return 2 * i + 1

    def slab(self, point) -> int:
        return bisect.bisect_left(self.obstacles, tuple(point))

    def crossings(self, a, b) -> list[int]:
        """Darts of the dual crossed by segment ``a -> b``, in order."""
        a, b = tuple(a), tuple(b)
        lo, hi = (a, b) if a < b else (b, a)
        i = bisect.bisect_right(self.obstacles, lo)
        j = bisect.bisect_left(self.obstacles, hi)
        if i < len(self.obstacles) and self.obstacles[i] == lo:
            raise ObstacleOnDrawing(f"segment endpoint {lo} is an obstacle")
        if j < len(self.obstacles) and self.obstacles[j] == hi:
            raise ObstacleOnDrawing(f"segment endpoint {hi} is an obstacle")
        idx = list(range(i, j))
        rightward = a < b
        if not rightward:
            idx.reverse()
        out = []
        for k in idx:
            s = _cross(a, b, self.obstacles[k])
            if s == 0:
                raise ObstacleOnDrawing(f"segment passes through obstacle {self.obstacles[k]}")
            above = (s < 0) if rightward else (s > 0)
            e = self.upper_edge(k) if above else self.lower_edge(k)
            out.append(2 * e if rightward else 2 * e + 1)
        return out


def vertical_decomposition(obstacles: Sequence[tuple[int, int]]) -> Decomposition:
    """Dual of the slab decomposition: slabs ``0..p``, rays joining slab k and k+1."""
    obs = sorted(tuple(o) for o in obstacles)
    p = len(obs)
    if p == 0:
        raise UnsupportedNoObstacles("no obstacles: plain planarity testing")
    rot = []
    for s in range(p + 1):
        r = []
        if s < p:  # right side: lower then upper, leaving the slab
            r += [2 * (2 * s + 1), 2 * (2 * s)]
        if s > 0:  # left side: upper then lower, coming back
            r += [2 * (2 * (s - 1)) + 1, 2 * (2 * (s - 1) + 1) + 1]
        rot.append(r)
    tmp = build_map(rot)
    m = build_map(rot, boundary=range(tmp.n_faces))
    return Decomposition(obs, m)


def plane_to_combinatorial(pl: PLDrawing) -> Conversion:
    """Drawing on the dual of the slab decomposition (sphere with p+1 holes)."""
    if not pl.obstacles:
        raise UnsupportedNoObstacles("no obstacles: plain planarity testing")
    pl.validate()
    dec = vertical_decomposition(pl.obstacles)
    vimg = [dec.slab(p) for p in pl.points]
    images = []
    stabbing = 0
    for line in pl.polylines:
        walk = []
        for a, b in zip(line, line[1:]):
            seg = dec.crossings(a, b)
            stabbing = max(stabbing, len(seg))
            walk.extend(seg)
        images.append(walk)
    d = Drawing(dec.map, len(pl.points), list(pl.edges), vimg, images,
                {"vertex_ids": list(pl.vertex_ids)})
    stats = {"obstacles": len(pl.obstacles), "max_stabbing": stabbing,
             "output_size": sum(len(w) for w in images), "input_size": pl.size}
    return Conversion(dec, d, {}, stats)


def winding_number(polyline: Sequence[tuple[int, int]], point) -> int:
    """Winding number of a closed polyline around ``point`` (horizontal ray test)."""
    x0, y0 = point
    w = 0
    for a, b in zip(polyline, list(polyline[1:]) + [polyline[0]]):
        if a[1] <= y0 < b[1] and _cross(a, b, point) > 0:
            w += 1
        elif b[1] <= y0 < a[1] and _cross(a, b, point) < 0:
            w -= 1
    return w


def ray_winding(dec: Decomposition, walk: Sequence[int], k: int) -> int:
    """Winding around obstacle ``k`` read off the upper-ray crossings of a closed walk."""
    e = dec.upper_edge(k)
    return sum(1 for d in walk if d == 2 * e + 1) - sum(1 for d in walk if d == 2 * e)
