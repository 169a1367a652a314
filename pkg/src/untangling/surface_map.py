"""Combinatorial maps of graphs cellularly embedded on orientable surfaces.

Darts are dense integers ``0 .. 2E-1`` and ``twin(d) == d ^ 1``, so the
darts of edge ``e`` are ``2e`` and ``2e + 1``.  ``sigma[d]`` is the next dart
counterclockwise around the source of ``d``.  Faces are traced with the face
on the left of each dart: the successor of ``d`` along its face is
``sigma_inv[d ^ 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    DisconnectedMap,
    EulerMismatch,
    MalformedDrawing,
    NonInvolutiveTwin,
    NotASpanningForest,
)


def twin(d: int) -> int:
    return d ^ 1


class CombinatorialMap:
    """An immutable rotation system with derived vertices and faces."""

    def __init__(self, sigma, boundary_faces=(), face_colors=None, edge_tags=None,
                 connected=True):
        n = len(sigma)
        if n % 2:
            raise NonInvolutiveTwin("odd number of darts")
        self.sigma = list(sigma)
        self.sigma_inv = [0] * n
        for d, s in enumerate(self.sigma):
            self.sigma_inv[s] = d
        if sorted(self.sigma) != list(range(n)):
            raise NonInvolutiveTwin("rotation is not a permutation of the darts")

        self.vertex_of = [-1] * n
        self.rotations: list[list[int]] = []
        for d in range(n):
            if self.vertex_of[d] < 0:
                v = len(self.rotations)
                orbit = []
                x = d
                while self.vertex_of[x] < 0:
                    self.vertex_of[x] = v
                    orbit.append(x)
                    x = self.sigma[x]
                self.rotations.append(orbit)

        self.face_of = [-1] * n
        self.faces: list[list[int]] = []
        for d in range(n):
            if self.face_of[d] < 0:
                f = len(self.faces)
                cycle = []
                x = d
                while self.face_of[x] < 0:
                    self.face_of[x] = f
                    cycle.append(x)
                    x = self.sigma_inv[x ^ 1]
                self.faces.append(cycle)

        self.boundary_faces = frozenset(boundary_faces)
        for f in self.boundary_faces:
            if not 0 <= f < len(self.faces):
                raise EulerMismatch(f"boundary mark on unknown face {f}")
        self.face_colors = dict(face_colors or {})
        self.edge_tags = dict(edge_tags or {})

        self.component_of_vertex, self.n_components = self._components()
        if connected and self.n_components > 1:
            raise DisconnectedMap(f"map has {self.n_components} components")
        twice_genus = 2 * self.n_components - self.euler_characteristic_closed
        if twice_genus < 0 or twice_genus % 2:
            raise EulerMismatch(f"inconsistent Euler characteristic {self.euler_characteristic_closed}")
        self.genus = twice_genus // 2

    def _components(self):
        comp = [-1] * len(self.rotations)
        count = 0
        for start in range(len(self.rotations)):
            if comp[start] >= 0:
                continue
            comp[start] = count
            stack = [start]
            while stack:
                v = stack.pop()
                for d in self.rotations[v]:
                    w = self.vertex_of[d ^ 1]
                    if comp[w] < 0:
                        comp[w] = count
                        stack.append(w)
            count += 1
        return comp, count

    # basic accessors
    @property
    def n_darts(self) -> int:
        return len(self.sigma)

    @property
    def n_edges(self) -> int:
        return len(self.sigma) // 2

    @property
    def n_vertices(self) -> int:
        return len(self.rotations)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic_closed(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def euler_characteristic(self) -> int:
        """V - E + F with boundary faces treated as holes."""
        return self.euler_characteristic_closed - len(self.boundary_faces)

    @property
    def boundary_count(self) -> int:
        return len(self.boundary_faces)

    def source(self, d: int) -> int:
        return self.vertex_of[d]

    def head(self, d: int) -> int:
        return self.vertex_of[d ^ 1]

    def face_next(self, d: int) -> int:
        return self.sigma_inv[d ^ 1]

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        return self.vertex_of[2 * e], self.vertex_of[2 * e + 1]

    def is_face_boundary(self, f: int) -> bool:
        return f in self.boundary_faces

    def check_walk(self, darts: Sequence[int]) -> None:
        for a, b in zip(darts, darts[1:]):
            if self.vertex_of[a ^ 1] != self.vertex_of[b]:
                raise MalformedDrawing(f"darts {a} and {b} are not consecutive")

    def rotation_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rotations]

    def with_boundary(self, faces: Iterable[int]) -> "CombinatorialMap":
        return CombinatorialMap(self.sigma, faces, self.face_colors, self.edge_tags,
                                connected=self.n_components == 1)

    def __repr__(self):
        return (f"CombinatorialMap(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces}, "
                f"genus={self.genus}, boundary={self.boundary_count})")


def build_map(rotation_lists, twin_pairs=None, boundary=(), *, connected=True,
              face_colors=None, edge_tags=None) -> CombinatorialMap:
    """Build a map from per-vertex ccw dart lists.

    Without ``twin_pairs`` darts must be ``0 .. 2E-1`` paired by XOR.  With
    explicit pairs, arbitrary integer labels are accepted and relabelled so
    that the pairs become XOR pairs; the relabelling is stored on the result
    as ``relabel`` (old label -> new dart).
    """
    darts = [d for rot in rotation_lists for d in rot]
    if len(set(darts)) != len(darts):
        raise NonInvolutiveTwin("a dart appears in two rotation slots")
    relabel = None
    if twin_pairs is None:
        if sorted(darts) != list(range(len(darts))) or len(darts) % 2:
            raise NonInvolutiveTwin("implicit XOR pairing needs darts 0..2E-1")
        mapping = {d: d for d in darts}
    else:
        partner = {}
        for a, b in twin_pairs:
            if a == b or a in partner or b in partner:
                raise NonInvolutiveTwin(f"bad twin pair ({a}, {b})")
            partner[a] = b
            partner[b] = a
        if set(partner) != set(darts):
            raise NonInvolutiveTwin("twin pairs do not match the rotation darts")
        if all(partner[d] == d ^ 1 for d in darts) and sorted(darts) == list(range(len(darts))):
            mapping = {d: d for d in darts}
        else:
            mapping = {}
            for d in darts:
                if d not in mapping:
                    k = len(mapping)
                    mapping[d] = k
                    mapping[partner[d]] = k + 1
            relabel = dict(mapping)
    n = len(darts)
    sigma = [0] * n
    for rot in rotation_lists:
        for i, d in enumerate(rot):
            sigma[mapping[d]] = mapping[rot[(i + 1) % len(rot)]]
    m = CombinatorialMap(sigma, boundary, face_colors, edge_tags, connected=connected)
    m.relabel = relabel
    return m


def map_from_faces(face_cycles, boundary=(), *, connected=True, face_colors=None,
                   edge_tags=None) -> CombinatorialMap:
    """Build a map from its face cycles (darts listed with the face on the left)."""
    darts = [d for cyc in face_cycles for d in cyc]
    n = len(darts)
    if sorted(darts) != list(range(n)) or n % 2:
        raise NonInvolutiveTwin("face cycles must cover darts 0..2E-1 exactly once")
    sigma = [0] * n
    for cyc in face_cycles:
        for i, d in enumerate(cyc):
            prev = cyc[i - 1]
            sigma[d] = prev ^ 1
    m = CombinatorialMap(sigma, (), None, edge_tags, connected=connected)
    # face indices of the built map follow its own orbit order; translate marks
    index = {}
    for i, cyc in enumerate(face_cycles):
        index[i] = m.face_of[cyc[0]]
    m = CombinatorialMap(sigma, [index[f] for f in boundary],
                         {index[f]: c for f, c in (face_colors or {}).items()},
                         edge_tags, connected=connected)
    m.relabel = None
    return m


def genus_and_boundary(m: CombinatorialMap) -> tuple[int, int]:
    return m.genus, m.boundary_count


# ---------------------------------------------------------------------------
# edge deletion / contraction with dart bookkeeping


def _compact(m: CombinatorialMap, sigma_partial: dict[int, int], keep_edges: list[int],
             boundary_darts=(), face_colors_darts=None):
    """Renumber the surviving edges densely and rebuild the map.

    ``boundary_darts`` is a list of surviving darts whose left faces are to be
    marked as boundary in the result.
    """
    new_of_old = {}
    for k, e in enumerate(keep_edges):
        new_of_old[2 * e] = 2 * k
        new_of_old[2 * e + 1] = 2 * k + 1
    sigma = [0] * (2 * len(keep_edges))
    for d, s in sigma_partial.items():
        sigma[new_of_old[d]] = new_of_old[s]
    position = {e: k for k, e in enumerate(keep_edges)}
    tags = {position[e]: t for e, t in m.edge_tags.items() if e in position}
    tmp = CombinatorialMap(sigma, (), None, tags, connected=False)
    bnd = {tmp.face_of[new_of_old[d]] for d in boundary_darts}
    colors = {}
    for d, c in (face_colors_darts or {}).items():
        colors[tmp.face_of[new_of_old[d]]] = c
    out = CombinatorialMap(sigma, bnd, colors, tags, connected=False)
    return out, new_of_old


def delete_edges(m: CombinatorialMap, edges: Iterable[int]):
    """Delete edges; returns (new map, old dart -> new dart for survivors).

    Boundary marks follow the surviving darts of formerly marked faces.
    """
    dead = set(edges)
    alive = lambda d: (d >> 1) not in dead
    partial = {}
    for d in range(m.n_darts):
        if not alive(d):
            continue
        x = m.sigma[d]
        while not alive(x):
            x = m.sigma[x]
        partial[d] = x
    keep = [e for e in range(m.n_edges) if e not in dead]
    # faces on both sides of a deleted edge merge; a merged face keeps any mark
    group = list(range(m.n_faces))

    def find(f):
        while group[f] != f:
            group[f] = group[group[f]]
            f = group[f]
        return f

    for e in dead:
        group[find(m.face_of[2 * e])] = find(m.face_of[2 * e + 1])
    marked = {find(f) for f in m.boundary_faces}
    bdarts = [d for d in range(m.n_darts) if alive(d) and find(m.face_of[d]) in marked]
    return _compact(m, partial, keep, bdarts)


def contract_edges(m: CombinatorialMap, edges: Iterable[int]):
    """Contract a forest of non-loop edges; returns (new map, dart map)."""
    dead = set(edges)
    tree = lambda d: (d >> 1) in dead
    partial = {}
    for d in range(m.n_darts):
        if tree(d):
            continue
        x = m.sigma[d]
        steps = 0
        while tree(x):
            x = m.sigma[x ^ 1]
            steps += 1
            if steps > m.n_darts:
                raise NotASpanningForest("contracted edges contain a cycle")
        partial[d] = x
    keep = [e for e in range(m.n_edges) if e not in dead]
    bdarts = [d for f in m.boundary_faces for d in m.faces[f] if not tree(d)]
    return _compact(m, partial, keep, bdarts)


def check_spanning_forest(n_vertices: int, edge_list: Sequence[tuple[int, int]],
                          forest: Iterable[int], components: int = 1) -> list[int]:
    """Check that ``forest`` (edge indices) is acyclic and spans every component."""
    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = list(forest)
    for e in chosen:
        u, v = edge_list[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            raise NotASpanningForest(f"edge {e} closes a cycle")
        parent[ru] = rv
    roots = {find(v) for v in range(n_vertices)}
    if len(roots) != components:
        raise NotASpanningForest("forest does not span")
    return chosen


# ---------------------------------------------------------------------------
# drawings


@dataclass
class Drawing:
    """A graph ``G`` drawn in the host map: vertices to host vertices, edges to walks."""

    host: CombinatorialMap
    n_vertices: int
    edges: list[tuple[int, int]]
    vertex_image: list[int]
    edge_image: list[list[int]]
    names: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        h = self.host
        if len(self.vertex_image) != self.n_vertices:
            raise MalformedDrawing("vertex image has the wrong length")
        if len(self.edge_image) != len(self.edges):
            raise MalformedDrawing("edge image has the wrong length")
        for v, hv in enumerate(self.vertex_image):
            if not 0 <= hv < h.n_vertices:
                raise MalformedDrawing(f"vertex {v} mapped outside the host")
        for i, ((u, v), walk) in enumerate(zip(self.edges, self.edge_image)):
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise MalformedDrawing(f"edge {i} has an unknown endpoint")
            for d in walk:
                if not 0 <= d < h.n_darts:
                    raise MalformedDrawing(f"edge {i} uses unknown dart {d}")
            if walk:
                if h.vertex_of[walk[0]] != self.vertex_image[u]:
                    raise MalformedDrawing(f"edge {i} does not start at its tail image")
                if h.vertex_of[walk[-1] ^ 1] != self.vertex_image[v]:
                    raise MalformedDrawing(f"edge {i} does not end at its head image")
                for a, b in zip(walk, walk[1:]):
                    if h.vertex_of[a ^ 1] != h.vertex_of[b]:
                        raise MalformedDrawing(f"edge {i}: darts {a}, {b} not consecutive")
            elif self.vertex_image[u] != self.vertex_image[v]:
                raise MalformedDrawing(f"edge {i} has an empty walk between distinct vertices")

    @property
    def size(self) -> int:
        return len(self.edges) + sum(len(w) for w in self.edge_image)

    def graph_components(self) -> list[list[int]]:
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            parent[find(u)] = find(v)
        groups: dict[int, list[int]] = {}
        for v in range(self.n_vertices):
            groups.setdefault(find(v), []).append(v)
        return list(groups.values())

    def edge_vertex_of(self, i: int) -> int:
        """Host vertex carrying an edge image (its start)."""
        walk = self.edge_image[i]
        return self.host.vertex_of[walk[0]] if walk else self.vertex_image[self.edges[i][0]]


def reverse_walk(walk: Sequence[int]) -> list[int]:
    return [d ^ 1 for d in reversed(walk)]


def reroute(walk: Sequence[int], dart_map) -> list[int]:
    """Replace each dart by a walk (``dart_map[d]`` is a list) and cancel spurs."""
    out: list[int] = []
    for d in walk:
        for x in dart_map[d]:
            if out and out[-1] == x ^ 1:
                out.pop()
            else:
                out.append(x)
    return out


def contract_spanning_tree(drawing: Drawing, tree: Iterable[int], on: str = "host") -> Drawing:
    """Contract a spanning forest of the host (``on='host'``) or of ``G`` (``on='graph'``).

    Host contraction drops the contracted darts from every walk.  Graph
    contraction reroutes every non-tree edge through the tree paths to the
    root of its component; the result has one vertex per component and one
    loop per non-tree edge.  The original index of each surviving edge is
    kept in ``names['edge_origin']``.
    """
    if on == "host":
        h = drawing.host
        tree = list(tree)
        check_spanning_forest(h.n_vertices, [h.edge_endpoints(e) for e in range(h.n_edges)],
                              tree, h.n_components)
        new, dmap = contract_edges(h, tree)
        vmap = [new.vertex_of[dmap[_some_kept_dart(h, tree, v)]] if h.rotations[v] else 0
                for v in range(h.n_vertices)]
        # every vertex of a connected host collapses to the single vertex of its component
        images = []
        for walk in drawing.edge_image:
            images.append([dmap[d] for d in walk if d in dmap])
        vimg = [vmap[v] for v in drawing.vertex_image]
        return Drawing(new, drawing.n_vertices, list(drawing.edges), vimg, images,
                       dict(drawing.names))
    if on != "graph":
        raise ValueError("on must be 'host' or 'graph'")
    tree = set(tree)
    check_spanning_forest(drawing.n_vertices, drawing.edges, tree,
                          len(drawing.graph_components()))
    adj: dict[int, list[tuple[int, int, bool]]] = {v: [] for v in range(drawing.n_vertices)}
    for i in tree:
        u, v = drawing.edges[i]
        adj[u].append((v, i, True))
        adj[v].append((u, i, False))
    root_of = [-1] * drawing.n_vertices
    path_to: list[list[int]] = [[] for _ in range(drawing.n_vertices)]
    roots = []
    for r in range(drawing.n_vertices):
        if root_of[r] >= 0:
            continue
        roots.append(r)
        root_of[r] = r
        stack = [r]
        while stack:
            x = stack.pop()
            for y, i, forward in adj[x]:
                if root_of[y] < 0:
                    root_of[y] = r
                    step = drawing.edge_image[i] if forward else reverse_walk(drawing.edge_image[i])
                    path_to[y] = _cancel(path_to[x] + list(step))
                    stack.append(y)
    index = {r: k for k, r in enumerate(roots)}
    edges, images, origin = [], [], []
    for i, (u, v) in enumerate(drawing.edges):
        if i in tree:
            continue
        walk = _cancel(path_to[u] + list(drawing.edge_image[i]) + reverse_walk(path_to[v]))
        edges.append((index[root_of[u]], index[root_of[v]]))
        images.append(walk)
        origin.append(i)
    vimg = [drawing.vertex_image[r] for r in roots]
    names = dict(drawing.names)
    names["edge_origin"] = origin
    names["root_of"] = [index[root_of[v]] for v in range(drawing.n_vertices)]
    return Drawing(drawing.host, len(roots), edges, vimg, images, names)


def _some_kept_dart(h, tree, v):
    dead = set(tree)
    for d in h.rotations[v]:
        if (d >> 1) not in dead:
            return d
    # a vertex whose darts are all contracted: follow the tree to another vertex
    seen = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for d in h.rotations[x]:
            if (d >> 1) not in dead:
                return d
            y = h.vertex_of[d ^ 1]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    raise NotASpanningForest("component has no surviving edge")


def _cancel(walk):
    out = []
    for d in walk:
        if out and out[-1] == d ^ 1:
            out.pop()
        else:
            out.append(d)
    return out


def remove_monogons_and_bigons(m: CombinatorialMap):
    """Delete monogon loops and merge bigon pairs until none remain.

    Returns ``(new map, reroute)`` where ``reroute[d]`` is a homotopic walk in
    the new map for every dart ``d`` of the input.  Faces marked as boundary
    are never treated as disks.
    """
    current = m
    # walks of the original darts, expressed in darts of ``current``
    image = {d: [d] for d in range(m.n_darts)}
    while True:
        target = None
        for f, cyc in enumerate(current.faces):
            if f in current.boundary_faces:
                continue
            if len(cyc) == 1:
                target = ("mono", cyc[0])
                break
            if len(cyc) == 2 and (cyc[0] >> 1) != (cyc[1] >> 1):
                target = ("bi", cyc[0], cyc[1])
                break
        if target is None:
            break
        if target[0] == "mono":
            d = target[1]
            subst = {d: [], d ^ 1: []}
            dead = d >> 1
        else:
            keep, drop = target[1], target[2]
            subst = {drop: [keep ^ 1], drop ^ 1: [keep]}
            dead = drop >> 1
        new, dmap = delete_edges(current, [dead])
        full = {}
        for x in range(current.n_darts):
            full[x] = [dmap[y] for y in subst.get(x, [x])]
        image = {d: reroute(w, full) for d, w in image.items()}
        current = new
    return current, image
