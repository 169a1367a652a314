"""Reducing triangulations: bipartite dual, every vertex of degree at least eight.

Outgoing darts of a vertex are numbered clockwise.  The turn from ``e_in`` to
``e_out`` counts the triangles swept clockwise from ``twin(e_in)`` to
``e_out``, which are exactly the triangles on the left of the length-two walk.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    DegreeBelowEight,
    DualNotBipartite,
    GenusTooSmall,
    NotATriangulation,
    NotIncident,
)
from .surface_map import CombinatorialMap, map_from_faces

RED = "r"
BLUE = "b"


@dataclass(frozen=True)
class Turn:
    value: int
    tag: str

    def __str__(self):
        return f"{self.value}{self.tag}"


def normalize_turn(left: int, degree: int) -> int:
    """Pick the representative in [-3, 3] when one exists, else the positive one."""
    left %= degree
    if left <= 3:
        return left
    if degree - left <= 3:
        return left - degree
    return left


class TurnTable:
    """Clockwise dart numbering and O(1) turn arithmetic on a triangulated map.

    Works on any map with face colours; :class:`ReducingTriangulation` adds
    the defining checks.
    """

    def __init__(self, m: CombinatorialMap, color):
        self.map = m
        self.color = list(color)
        self.deg = [len(r) for r in m.rotations]
        self.A: list[list[int]] = []
        self.idx = [0] * m.n_darts
        for v, rot in enumerate(m.rotations):
            arr = []
            d = rot[0]
            for i in range(len(rot)):
                arr.append(d)
                self.idx[d] = i
                d = m.sigma_inv[d]
            self.A.append(arr)
        self.vertex_of = m.vertex_of
        self.face_of = m.face_of
        self.sigma = m.sigma
        self.sigma_inv = m.sigma_inv
        # per-dart lookups used in hot loops
        self.head_deg = [self.deg[m.vertex_of[d ^ 1]] for d in range(m.n_darts)]
        self.left_color = [self.color[m.face_of[d]] for d in range(m.n_darts)]

    def left_count(self, e_in: int, e_out: int) -> int:
        v = self.vertex_of[e_out]
        if self.vertex_of[e_in ^ 1] != v:
            raise NotIncident(f"dart {e_out} does not leave the head of dart {e_in}")
        return (self.idx[e_out] - self.idx[e_in ^ 1]) % self.deg[v]

    def turn_value(self, e_in: int, e_out: int) -> int:
        return normalize_turn(self.left_count(e_in, e_out), self.head_deg[e_in])

    def turn(self, e_in: int, e_out: int) -> Turn:
        return Turn(self.turn_value(e_in, e_out), self.left_color[e_in])

    def dart_by_turn(self, e_in: int, k: int) -> int:
        v = self.vertex_of[e_in ^ 1]
        return self.A[v][(self.idx[e_in ^ 1] + k) % self.deg[v]]

    def face_color(self, f: int) -> str:
        return self.color[f]


class ReducingTriangulation(TurnTable):
    """A validated reducing triangulation.

    ``canonical`` maps loop names such as ``"a1"`` to darts when the
    triangulation was built around a canonical system of loops.
    """

    def __init__(self, m, color, canonical=None):
        super().__init__(m, color)
        self.canonical = dict(canonical or {})

    @property
    def genus(self) -> int:
        return self.map.genus

    @property
    def size(self) -> int:
        return self.map.n_vertices + self.map.n_edges + self.map.n_faces

    def canonical_cycle(self, name: str) -> list[int]:
        """Closed walk along a canonical loop (a single dart in our constructions)."""
        d = self.canonical[name]
        return list(d) if isinstance(d, (list, tuple)) else [d]


def two_color(m: CombinatorialMap):
    """Two-colour the faces so that adjacent faces differ, or return None."""
    color = [None] * m.n_faces
    for start in range(m.n_faces):
        if color[start] is not None:
            continue
        color[start] = RED
        queue = deque([start])
        while queue:
            f = queue.popleft()
            other = BLUE if color[f] == RED else RED
            for d in m.faces[f]:
                g = m.face_of[d ^ 1]
                if color[g] is None:
                    color[g] = other
                    queue.append(g)
                elif color[g] != other:
                    return None
    return color


def validate_reducing(m: CombinatorialMap, color=None, canonical=None) -> ReducingTriangulation:
    if m.boundary_faces:
        raise NotATriangulation("reducing triangulations have no boundary")
    for f, cyc in enumerate(m.faces):
        if len(cyc) != 3:
            raise NotATriangulation(f"face {f} has {len(cyc)} sides")
    if color is None:
        color = two_color(m)
        if color is None:
            raise DualNotBipartite("the dual graph has an odd cycle")
    else:
        if isinstance(color, dict):
            color = [color.get(f) for f in range(m.n_faces)]
        color = list(color)
        if len(color) != m.n_faces or any(c not in (RED, BLUE) for c in color):
            raise DualNotBipartite("every face needs a red or blue colour")
        for d in range(m.n_darts):
            if color[m.face_of[d]] == color[m.face_of[d ^ 1]]:
                raise DualNotBipartite(f"faces across edge {d >> 1} share a colour")
    for v, rot in enumerate(m.rotations):
        if len(rot) < 8:
            raise DegreeBelowEight(f"vertex {v} has degree {len(rot)}")
    return ReducingTriangulation(m, color, canonical)


# ---------------------------------------------------------------------------
# construction from the canonical 4g-gon


def _required_parities(g: int, pattern):
    """Parity of the triangle count demanded at each polygon corner (None = free)."""
    req = [None] * (4 * g)
    for k in range(g):
        p = pattern[k]
        # colours alternate around each corner, so the parity of its triangle
        # count fixes how the two sides' triangles compare; these choices give
        # partner sides a and a' triangles of opposite colour
        req[4 * k + 1] = p
        req[4 * k + 2] = 1 - p
        req[4 * k + 3] = p
    return req


def _triangulate_polygon(n: int, req):
    """Diagonal triangulation of an n-gon meeting corner parity constraints.

    Interval DP: ``table[i][j]`` maps the parities of the triangle counts at
    corners ``i`` and ``j`` (inside the sub-polygon ``i..j``) to a split.
    """
    table = [[None] * n for _ in range(n)]
    for i in range(n - 1):
        table[i][i + 1] = {(0, 0): None}
    for length in range(2, n):
        for i in range(0, n - length):
            j = i + length
            states = {}
            for m in range(i + 1, j):
                left, right = table[i][m], table[m][j]
                if not left or not right:
                    continue
                for (a, b1) in left:
                    for (b2, c) in right:
                        mid = (b1 + b2 + 1) % 2
                        if req[m] is not None and mid != req[m]:
                            continue
                        key = ((a + 1) % 2, (c + 1) % 2)
                        if key not in states:
                            states[key] = (m, (a, b1), (b2, c))
            table[i][j] = states
    for key in table[0][n - 1]:
        a, c = key
        if (req[0] is None or a == req[0]) and (req[n - 1] is None or c == req[n - 1]):
            triangles = []
            _unwind(table, 0, n - 1, key, triangles)
            return triangles
    return None


def _unwind(table, i, j, key, out):
    if j == i + 1:
        return
    m, lk, rk = table[i][j][key]
    out.append((i, m, j))
    _unwind(table, i, m, lk, out)
    _unwind(table, m, j, rk, out)


@lru_cache(maxsize=None)
def _schema_triangles(g: int):
    n = 4 * g
    patterns = [tuple([0] * g), tuple([1] * g)]
    patterns += [tuple((k + s) % 2 for k in range(g)) for s in (0, 1)]
    for pattern in patterns:
        tris = _triangulate_polygon(n, _required_parities(g, pattern))
        if tris is not None:
            return tuple(sorted(tris))
    raise RuntimeError(f"no parity-compatible triangulation found for genus {g}")


def build_reducing(g: int) -> ReducingTriangulation:
    """One-vertex reducing triangulation of the closed genus-``g`` surface.

    The canonical 4g-gon ``a1 b1 a1' b1' ...`` is triangulated by diagonals so
    that triangles glued across identified sides get opposite colours; all
    corners become one vertex of degree ``12g - 6``.  Side loops are kept as
    edges and recorded in ``canonical`` and in the map's edge tags.
    """
    if g < 2:
        raise GenusTooSmall(f"genus {g} < 2")
    n = 4 * g
    triangles = _schema_triangles(g)

    side_dart = {}
    names = {}
    for k in range(g):
        a_edge, b_edge = 2 * k, 2 * k + 1
        side_dart[4 * k] = 2 * a_edge
        side_dart[4 * k + 2] = 2 * a_edge + 1
        side_dart[4 * k + 1] = 2 * b_edge
        side_dart[4 * k + 3] = 2 * b_edge + 1
        names[f"a{k + 1}"] = 2 * a_edge
        names[f"b{k + 1}"] = 2 * b_edge
    next_edge = 2 * g
    diagonal = {}

    def segment(x, y):
        nonlocal next_edge
        if y == (x + 1) % n:
            return side_dart[x]
        if x == (y + 1) % n:
            return side_dart[y] ^ 1
        lo, hi = min(x, y), max(x, y)
        if (lo, hi) not in diagonal:
            diagonal[(lo, hi)] = 2 * next_edge
            next_edge += 1
        d = diagonal[(lo, hi)]
        return d if x == lo else d ^ 1

    faces = [[segment(i, k), segment(k, j), segment(j, i)] for (i, k, j) in triangles]
    tags = {names[key] >> 1: key for key in names}
    m = map_from_faces(faces, edge_tags=tags)
    tri = validate_reducing(m, canonical=names)
    tri.corner_triangles = triangles
    return tri


def subdivide_face(tri: ReducingTriangulation, face: int) -> CombinatorialMap:
    """Stellar subdivision of one face (produces an odd dual cycle)."""
    m = tri.map
    a, b, c = m.faces[face]
    E = m.n_edges
    spokes = [2 * E, 2 * E + 2, 2 * E + 4]  # centre -> tail(a), tail(b), tail(c)
    cycles = [list(f) for i, f in enumerate(m.faces) if i != face]
    # triangle on dart a: tail(a) -> head(a) = tail(b) -> centre -> tail(a)
    cycles.append([a, spokes[1] ^ 1, spokes[0]])
    cycles.append([b, spokes[2] ^ 1, spokes[1]])
    cycles.append([c, spokes[0] ^ 1, spokes[2]])
    return map_from_faces(cycles)
