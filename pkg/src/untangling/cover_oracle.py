"""Ground-truth homotopy oracle.

Each lifted vertex is a pair (base vertex, deck element), where deck elements
live in the fundamental group presented from a tree/cotree decomposition of
the host.  Closed surfaces of genus at least two get Dehn's algorithm on
their single relator, the torus uses exponent sums, and surfaces with
boundary use free reduction.  Nothing here depends on turns or on the
reduction moves, which is the point.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import ExplorationBudgetExceeded, NoGroupModel
from .surface_map import CombinatorialMap


def free_reduce(word: Sequence[int]) -> list[int]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def inverse(word: Sequence[int]) -> list[int]:
    return [-x for x in reversed(word)]


class GroupModel:
    """Fundamental group of a map, with dart words and a word problem solver."""

    def __init__(self, m: CombinatorialMap):
        self.map = m
        if m.n_components != 1:
            raise NoGroupModel("group models need a connected host")
        self.genus = m.genus
        self.n_boundary = m.boundary_count
        self._build(m)

    def _build(self, m):
        n = m.n_darts
        in_tree = [False] * m.n_edges
        seen = [False] * m.n_vertices
        seen[0] = True
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for d in m.rotations[v]:
                w = m.vertex_of[d ^ 1]
                if not seen[w]:
                    seen[w] = True
                    in_tree[d >> 1] = True
                    queue.append(w)

        # dual forest: rooted at boundary faces when there are any, else at face 0
        roots = sorted(m.boundary_faces) if m.boundary_faces else [0]
        parent_dart = [None] * m.n_faces
        order = []
        reached = [False] * m.n_faces
        in_cotree = [False] * m.n_edges
        queue = deque(roots)
        for f in roots:
            reached[f] = True
        while queue:
            f = queue.popleft()
            order.append(f)
            for d in m.faces[f]:
                e = d >> 1
                if in_tree[e]:
                    continue
                g = m.face_of[d ^ 1]
                if not reached[g] and g not in m.boundary_faces:
                    reached[g] = True
                    in_cotree[e] = True
                    parent_dart[g] = d ^ 1  # dart of the parent edge lying in face g
                    queue.append(g)

        gens = [e for e in range(m.n_edges) if not in_tree[e] and not in_cotree[e]]
        self.generator_edges = gens
        self.n_gens = len(gens)
        words: list = [None] * n
        for e in range(m.n_edges):
            if in_tree[e]:
                words[2 * e] = ()
                words[2 * e + 1] = ()
        for k, e in enumerate(gens):
            words[2 * e] = (k + 1,)
            words[2 * e + 1] = (-(k + 1),)
        for f in reversed(order):
            d = parent_dart[f]
            if d is None:
                continue
            cyc = m.faces[f]
            j = cyc.index(d)
            rest = cyc[j + 1:] + cyc[:j]
            acc: list[int] = []
            for x in rest:
                acc.extend(words[x])
            w = tuple(inverse(free_reduce(acc)))
            words[d] = w
            words[d ^ 1] = tuple(inverse(w))
        self.dart_word = words

        if m.boundary_faces:
            self.kind = "free" if self.n_gens else "trivial"
            return
        if self.genus == 0:
            self.kind = "trivial"
            return
        acc = []
        for x in m.faces[roots[0]]:
            acc.extend(words[x])
        rel = _cyclic_reduce(free_reduce(acc))
        if self.genus == 1:
            self.kind = "abelian"
            self.relator = tuple(rel)
            return
        self.kind = "surface"
        self.relator = tuple(rel)
        if len(rel) != 4 * self.genus or self.n_gens != 2 * self.genus:
            raise NoGroupModel("unexpected relator shape")
        self._dehn_setup()

    def _dehn_setup(self):
        rel = list(self.relator)
        L = len(rel)
        h = L // 2 + 1
        self._half = h
        table = {}
        for base in (rel, inverse(rel)):
            for s in range(L):
                rot = base[s:] + base[:s]
                key = tuple(rot[:h])
                if key in table:
                    raise NoGroupModel("relator pieces are too long for Dehn's algorithm")
                table[key] = tuple(inverse(rot[h:]))
        self._dehn = table

    # word problem -------------------------------------------------------
    def word_of(self, walk: Sequence[int]) -> list[int]:
        acc = []
        for d in walk:
            acc.extend(self.dart_word[d])
        return self.normal(acc)

    def normal(self, word: Sequence[int]) -> list[int]:
        """A reduced representative; canonical except for the surface case."""
        if self.kind == "trivial":
            return []
        if self.kind == "abelian":
            return list(self.abelian(word))
        if self.kind == "free":
            return free_reduce(word)
        return self.dehn_reduce(word)

    def dehn_reduce(self, word: Sequence[int]) -> list[int]:
        table, h = self._dehn, self._half
        out: list[int] = []
        pending = list(reversed(word))
        while pending:
            x = pending.pop()
            if out and out[-1] == -x:
                out.pop()
                continue
            out.append(x)
            if len(out) >= h:
                rep = table.get(tuple(out[-h:]))
                if rep is not None:
                    del out[-h:]
                    pending.extend(reversed(rep))
        return out

    def abelian(self, word: Sequence[int]) -> tuple[int, ...]:
        vec = [0] * self.n_gens
        for x in word:
            if x > 0:
                vec[x - 1] += 1
            else:
                vec[-x - 1] -= 1
        return tuple(vec)

    def product(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        if self.kind == "abelian":
            return [x + y for x, y in zip(a, b)]
        return self.normal(list(a) + list(b))

    def is_trivial(self, word: Sequence[int]) -> bool:
        if self.kind == "abelian":
            return not any(self.abelian(word))
        return not self.normal(word)

    def is_identity(self, element: Sequence[int]) -> bool:
        """Triviality of an element as returned by ``word_of`` or ``normal``."""
        if self.kind == "abelian":
            return not any(element)
        return not element

    def bucket(self, element: Sequence[int]):
        if self.kind == "abelian":
            return tuple(element)
        if self.kind == "surface":
            return self.abelian(element)
        return tuple(element)

    def equal(self, a: Sequence[int], b: Sequence[int]) -> bool:
        if self.kind == "abelian":
            return tuple(a) == tuple(b)
        if self.kind == "surface":
            return self.is_trivial(list(a) + inverse(b))
        return list(a) == list(b)


def _cyclic_reduce(word):
    w = list(word)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


@dataclass(frozen=True)
class LiftedVertex:
    base_vertex: int
    sheet_id: int


class CoverOracle:
    """Lifts walks of a host map to its universal cover.

    Sheets are hash-consed: two lifts of the same base vertex get the same
    ``sheet_id`` exactly when their deck elements agree.
    """

    def __init__(self, host, budget: int = 1_000_000):
        m = host.map if hasattr(host, "map") else host
        self.map = m
        self.group = GroupModel(m)
        self.budget = budget
        self._elements: list[tuple[int, list[int]]] = []
        self._buckets: dict = {}

    def _register(self, vertex: int, element: list[int]) -> LiftedVertex:
        if len(element) > self.budget:
            raise ExplorationBudgetExceeded(f"deck word of length {len(element)}")
        key = (vertex, self.group.bucket(element))
        for sid in self._buckets.get(key, ()):
            if self.group.equal(self._elements[sid][1], element):
                return LiftedVertex(vertex, sid)
        sid = len(self._elements)
        if sid >= self.budget:
            raise ExplorationBudgetExceeded("too many sheets")
        self._elements.append((vertex, list(element)))
        self._buckets.setdefault(key, []).append(sid)
        return LiftedVertex(vertex, sid)

    def base_lift(self, vertex: int) -> LiftedVertex:
        return self._register(vertex, self.group.normal([]))

    def element(self, lv: LiftedVertex) -> list[int]:
        return self._elements[lv.sheet_id][1]

    def lift_walk(self, start: LiftedVertex, walk: Sequence[int]) -> LiftedVertex:
        m = self.map
        if walk and m.vertex_of[walk[0]] != start.base_vertex:
            raise ValueError("walk does not start at the lifted vertex")
        m.check_walk(walk)
        elem = self.element(start)
        word = self.group.word_of(walk)
        end = m.vertex_of[walk[-1] ^ 1] if walk else start.base_vertex
        return self._register(end, self.group.product(elem, word))

    def homotopic(self, w1: Sequence[int], w2: Sequence[int], start_vertex=None) -> bool:
        """Fixed-endpoint homotopy of two walks with common endpoints."""
        m = self.map
        if start_vertex is None:
            start_vertex = m.vertex_of[w1[0]] if w1 else m.vertex_of[w2[0]] if w2 else 0
        s = self.base_lift(start_vertex)
        return self.lift_walk(s, w1) == self.lift_walk(s, w2)

    def is_contractible_loop(self, walk: Sequence[int]) -> bool:
        return self.group.is_identity(self.group.word_of(walk))
