"""Factorizations of drawings through sparse loop graphs.

Each connected component of ``G`` is contracted along a depth-first spanning
tree.  Every non-tree edge ``e`` from ``s`` to its ancestor ``t`` becomes the
loop ``P_s . delta(e) . reverse(P_t)`` at the image of the root, where ``P_v``
is the image of the tree path from the root to ``v``.  Loops are classified
by homotopy with a key store: the compressed homotopy tree on reducing
triangulations, integer vectors on the torus, and reduced free-group words on
surfaces with boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cover_oracle import GroupModel
from .errors import HostNotLoopSystem, HostNotReducing, HostNotTorusSchema
from .homotopy_tree import HomotopyTree
from .reducing_tri import ReducingTriangulation
from .surface_map import CombinatorialMap, Drawing, reverse_walk


@dataclass
class NotUntangleable:
    """Verdict: too many directed homotopy classes of loops at one vertex."""

    reason: str
    vertex: int
    n_classes: int

    def __bool__(self):
        return False


@dataclass
class FactorizationStats:
    extends: int = 0
    max_key_set: int = 0
    tree_nodes: int = 0


@dataclass
class Factorization:
    """A loop graph ``L`` drawn by ``loop_walks`` and the projection of ``G`` onto it.

    ``gamma_edge[i]`` is ``None`` when edge ``i`` collapses to the vertex, and
    ``(j, s)`` when it runs along loop ``j`` in direction ``s`` (``+1`` or
    ``-1``).  ``tree_step[v]`` is the image of the tree edge from the parent
    of ``v`` down to ``v``; chained together they transport basepoints for
    homotopy checks.
    """

    host: CombinatorialMap
    n_loop_vertices: int
    base_vertex: list[int]
    loop_vertex: list[int]
    loop_walks: list[list[int]]
    gamma_vertex: list[int]
    gamma_edge: list[Optional[tuple[int, int]]]
    tree_parent: list[int]
    tree_step: list[list[int]]
    mode: str
    stats: FactorizationStats = field(default_factory=FactorizationStats)

    def vertex_path(self, v: int) -> list[int]:
        """Image of the tree path from the root of ``v``'s component to ``v``."""
        steps = []
        while self.tree_parent[v] >= 0:
            steps.append(self.tree_step[v])
            v = self.tree_parent[v]
        out: list[int] = []
        for step in reversed(steps):
            out.extend(step)
        return out

    def __bool__(self):
        return True

    @property
    def n_loops(self) -> int:
        return len(self.loop_walks)

    @property
    def size(self) -> int:
        return self.n_loops + sum(len(w) for w in self.loop_walks)

    def loop_drawing(self) -> Drawing:
        edges = [(v, v) for v in self.loop_vertex]
        return Drawing(self.host, self.n_loop_vertices, edges, list(self.base_vertex),
                       [list(w) for w in self.loop_walks])

    def loops_of(self, component: int) -> list[int]:
        return [j for j, v in enumerate(self.loop_vertex) if v == component]

    def composed_image(self, drawing: Drawing, i: int) -> list[int]:
        """Image of edge ``i`` under lambda after gamma, with endpoints transported back."""
        u, v = drawing.edges[i]
        mid: list[int] = []
        if self.gamma_edge[i] is not None:
            j, s = self.gamma_edge[i]
            mid = list(self.loop_walks[j]) if s > 0 else reverse_walk(self.loop_walks[j])
        return reverse_walk(self.vertex_path(u)) + mid + self.vertex_path(v)


# ---------------------------------------------------------------------------
# key stores


class _TreeStore:
    def __init__(self, tri: ReducingTriangulation, root_vertex: int):
        self.tree = HomotopyTree(tri, root_vertex)
        self.tri = tri

    def trivial(self):
        return self.tree.trivial_key()

    def extend_walk(self, key, walk):
        return self.tree.extend_walk(key, walk)

    def is_trivial(self, key) -> bool:
        return key is self.tree.root

    def walk(self, key) -> list[int]:
        return self.tree.walk_of(key)

    def inverse(self, key):
        return self.tree.key_of(reverse_walk(self.tree.walk_of(key)))

    def partition(self, items):
        return self.tree.partition(items)

    @property
    def extends(self) -> int:
        return self.tree.stats.extends


class _GroupStore:
    """Keys from a one-vertex host whose edges are all group generators."""

    def __init__(self, group: GroupModel):
        self.group = group
        self.letter_dart = {}
        for k, e in enumerate(group.generator_edges):
            self.letter_dart[k + 1] = 2 * e
            self.letter_dart[-(k + 1)] = 2 * e + 1
        self.extends = 0

    def partition(self, items):
        groups: dict = {}
        for payload, key in items:
            groups.setdefault(key, []).append(payload)
        return list(groups.values())


class _AbelianStore(_GroupStore):
    def trivial(self):
        return (0,) * self.group.n_gens

    def extend_walk(self, key, walk):
        self.extends += len(walk)
        vec = list(key)
        for d in walk:
            for x in self.group.dart_word[d]:
                vec[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(vec)

    def is_trivial(self, key) -> bool:
        return not any(key)

    def walk(self, key) -> list[int]:
        out = []
        for k, c in enumerate(key):
            out.extend([self.letter_dart[(k + 1) if c > 0 else -(k + 1)]] * abs(c))
        return out

    def inverse(self, key):
        return tuple(-c for c in key)


class _WordNode:
    __slots__ = ("parent", "letter", "children")

    def __init__(self, parent, letter):
        self.parent = parent
        self.letter = letter
        self.children = {}


class _FreeStore(_GroupStore):
    """Reduced words kept as a trie, so that extending by a letter is O(1)."""

    def __init__(self, group):
        super().__init__(group)
        self.root = _WordNode(None, 0)

    def trivial(self):
        return self.root

    def push(self, node, x):
        if node.letter == -x:
            return node.parent
        child = node.children.get(x)
        if child is None:
            child = node.children[x] = _WordNode(node, x)
        return child

    def extend_walk(self, key, walk):
        self.extends += len(walk)
        for d in walk:
            for x in self.group.dart_word[d]:
                key = self.push(key, x)
        return key

    def is_trivial(self, key) -> bool:
        return key is self.root

    def word(self, key) -> list[int]:
        out = []
        while key is not self.root:
            out.append(key.letter)
            key = key.parent
        out.reverse()
        return out

    def walk(self, key) -> list[int]:
        return [self.letter_dart[x] for x in self.word(key)]

    def inverse(self, key):
        node = self.root
        for x in reversed(self.word(key)):
            node = self.push(node, -x)
        return node


# ---------------------------------------------------------------------------
# the algorithm


def _dfs_forest(drawing: Drawing):
    """Depth-first forest: parent edge, preorder, and back edges oriented to ancestors."""
    n = drawing.n_vertices
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, (u, v) in enumerate(drawing.edges):
        adj[u].append((v, i))
        if u != v:
            adj[v].append((u, i))
    parent_edge = [-1] * n
    parent = [-1] * n
    seen = [False] * n
    used = [False] * len(drawing.edges)
    order: list[int] = []
    roots: list[int] = []
    back: list[tuple[int, int, int]] = []  # (edge, source, ancestor target)
    for r in range(n):
        if seen[r]:
            continue
        roots.append(r)
        seen[r] = True
        order.append(r)
        stack = [(r, iter(adj[r]))]
        while stack:
            x, it = stack[-1]
            for y, i in it:
                if used[i]:
                    continue
                used[i] = True
                if seen[y]:
                    back.append((i, x, y))
                    continue
                seen[y] = True
                parent[y] = x
                parent_edge[y] = i
                order.append(y)
                stack.append((y, iter(adj[y])))
                break
            else:
                stack.pop()
    return parent, parent_edge, order, roots, back


def _oriented(drawing: Drawing, i: int, source: int) -> list[int]:
    u, _ = drawing.edges[i]
    walk = drawing.edge_image[i]
    return list(walk) if u == source else reverse_walk(walk)


def _run(drawing: Drawing, make_store, cutoff: Optional[int], mode: str, brute_force: bool = False):
    parent, parent_edge, order, roots, back = _dfs_forest(drawing)
    n = drawing.n_vertices
    comp_index = {}
    root_of = [-1] * n
    for v in order:
        root_of[v] = v if parent[v] < 0 else root_of[parent[v]]
    for k, r in enumerate(roots):
        comp_index[r] = k
    stats = FactorizationStats()

    steps: list[list[int]] = [[] for _ in range(n)]
    for v in order:
        if parent[v] >= 0:
            steps[v] = _oriented(drawing, parent_edge[v], parent[v])

    stores = {r: make_store(drawing.vertex_image[r]) for r in roots}
    loop_vertex, loop_walks = [], []
    gamma_edge: list = [None] * len(drawing.edges)
    children: list[list[int]] = [[] for _ in range(n)]
    for v in order:
        if parent[v] >= 0:
            children[parent[v]].append(v)
    by_target: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, s, t in back:
        by_target[t].append((i, s))

    for r in roots:
        store = stores[r]
        comp = comp_index[r]
        members = [v for v in order if root_of[v] == r]
        if brute_force:
            classes = _brute_classes(drawing, store, members, parent, steps, by_target)
        else:
            # keys of tree paths, top-down
            path_key = {r: store.trivial()}
            for v in members:
                if v != r:
                    path_key[v] = store.extend_walk(path_key[parent[v]], steps[v])
            leader: dict[int, int] = {}
            K: dict[int, list] = {}
            for v in reversed(members):
                items = []
                for i, s in by_target[v]:
                    key = store.extend_walk(path_key[s], _oriented(drawing, i, s))
                    items.append(((key, i), key))
                for c in children[v]:
                    step = _oriented(drawing, parent_edge[c], c)
                    for key, i in K.pop(c):
                        key = store.extend_walk(key, step)
                        items.append(((key, i), key))
                merged = []
                for group in store.partition(items):
                    key, first = group[0]
                    for _, other in group[1:]:
                        leader[other] = first
                    merged.append((key, first))
                K[v] = merged
                nontrivial = sum(1 for key, _ in merged if not store.is_trivial(key))
                stats.max_key_set = max(stats.max_key_set, nontrivial)
                if cutoff is not None and nontrivial > cutoff:
                    return NotUntangleable(
                        f"{nontrivial} distinct directed loop classes exceed the bound {cutoff}",
                        v, nontrivial)
            root_class = {i: key for key, i in K.pop(r)}

            def resolve(i):
                chain = []
                while i in leader:
                    chain.append(i)
                    i = leader[i]
                for x in chain:
                    leader[x] = i
                return i

            classes = {i: root_class[resolve(i)] for v in members for i, _ in by_target[v]}

        # assign loops: drop trivial classes, merge inverse pairs
        loop_of_key: dict = {}
        for v in members:
            for i, s in by_target[v]:
                key = classes[i]
                if store.is_trivial(key):
                    continue
                u0, _ = drawing.edges[i]
                sign = 1 if u0 == s else -1
                if key in loop_of_key:
                    j, o = loop_of_key[key]
                    gamma_edge[i] = (j, o * sign)
                    continue
                j = len(loop_walks)
                loop_walks.append(store.walk(key))
                loop_vertex.append(comp)
                loop_of_key[key] = (j, 1)
                loop_of_key[store.inverse(key)] = (j, -1)
                gamma_edge[i] = (j, sign)
        stats.extends += store.extends
        if hasattr(store, "tree"):
            stats.tree_nodes += store.tree.stats.nodes

    return Factorization(
        host=drawing.host,
        n_loop_vertices=len(roots),
        base_vertex=[drawing.vertex_image[r] for r in roots],
        loop_vertex=loop_vertex,
        loop_walks=loop_walks,
        gamma_vertex=[comp_index[root_of[v]] for v in range(n)],
        gamma_edge=gamma_edge,
        tree_parent=parent,
        tree_step=steps,
        mode=mode,
        stats=stats,
    )


def _brute_classes(drawing, store, members, parent, steps, by_target):
    """Classify each loop independently by its full key (no sharing, no cutoff)."""
    paths = {}
    for v in members:
        paths[v] = paths[parent[v]] + steps[v] if parent[v] >= 0 else []
    classes = {}
    for v in members:
        for i, s in by_target[v]:
            loop = paths[s] + _oriented(drawing, i, s) + reverse_walk(paths[v])
            classes[i] = store.extend_walk(store.trivial(), loop)
    return classes


def factorize(drawing: Drawing, tri: ReducingTriangulation, *, cutoff: bool = True,
              brute_force: bool = False):
    """Factorize a drawing on a reducing triangulation (genus at least two)."""
    if not isinstance(tri, ReducingTriangulation) or tri.map is not drawing.host:
        raise HostNotReducing("the drawing must live on a validated reducing triangulation")
    if tri.genus < 2:
        raise HostNotReducing("reducing triangulations have genus at least two")
    limit = 12 * tri.genus if cutoff and not brute_force else None
    return _run(drawing, lambda v: _TreeStore(tri, v), limit, "reducing", brute_force)


def is_torus_schema(m: CombinatorialMap) -> bool:
    return (m.n_vertices == 1 and m.n_edges == 2 and m.genus == 1
            and not m.boundary_faces and m.n_components == 1)


def is_loop_system(m: CombinatorialMap) -> bool:
    return (m.n_vertices == 1 and m.n_components == 1 and m.n_faces >= 1
            and len(m.boundary_faces) == m.n_faces)


def factorize_torus(drawing: Drawing, *, brute_force: bool = False):
    """Factorize a drawing on the two-loop torus schema; keys are integer vectors."""
    if not is_torus_schema(drawing.host):
        raise HostNotTorusSchema("host must be a one-vertex torus with two loops")
    group = GroupModel(drawing.host)
    return _run(drawing, lambda v: _AbelianStore(group), None, "torus", brute_force)


def factorize_boundary(drawing: Drawing, *, brute_force: bool = False):
    """Factorize a drawing on a loop system; keys are reduced free-group words."""
    if not is_loop_system(drawing.host):
        raise HostNotLoopSystem("host must be a one-vertex map whose faces all carry boundary")
    group = GroupModel(drawing.host)
    return _run(drawing, lambda v: _FreeStore(group), None, "boundary", brute_force)

