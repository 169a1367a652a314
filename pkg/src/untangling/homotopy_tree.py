"""Compressed homotopy trees.

A trie whose nodes are elementary subwalks.  The path from the root to a node
spells the compressed turn sequence of a reduced walk from the root vertex,
so homotopy classes of walks from the root are identified with nodes.

The root's children carry the first dart of the walk (the turn into it from
the virtual incoming dart is treated as infinite, so that first dart always
starts a fresh subwalk).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .errors import ForeignKey, NotIncident
from .reducing_tri import TurnTable
from .walks import (
    RUN3,
    RUN_NEG3,
    CompressedTurnSequence,
    ElementarySubwalk,
    compress,
    expand_subwalk,
    reduce_walk,
)

START = "START"


class HomotopyNode:
    __slots__ = ("tree", "parent", "depth", "first_dart", "last_dart", "kind", "k",
                 "children", "mark", "length")

    def __init__(self, tree, parent, first_dart, last_dart, kind, k):
        self.tree = tree
        self.parent = parent
        self.depth = 0 if parent is None else parent.depth + 1
        self.first_dart = first_dart
        self.last_dart = last_dart
        self.kind = kind
        self.k = k
        # three categories of children: runs of 3, runs of -3, single symbols
        self.children = {RUN3: {}, RUN_NEG3: {}, "SINGLE": {}, START: {}}
        self.mark = None
        # number of darts from the root to last_dart
        if parent is None:
            self.length = 0
        elif kind == START:
            self.length = 1
        else:
            self.length = parent.length + (k if kind in (RUN3, RUN_NEG3) else 1)

    def subwalk(self) -> ElementarySubwalk:
        return ElementarySubwalk(self.first_dart, self.last_dart, self.kind, self.k)

    def __repr__(self):
        return f"HomotopyNode({self.kind}, {self.k}, {self.first_dart}->{self.last_dart})"


HomotopyKey = HomotopyNode


@dataclass
class TreeStats:
    extends: int = 0
    nodes: int = 1
    window_darts: int = 0
    retries: int = 0
    max_rewrite: int = 0
    rewrite_histogram: dict = field(default_factory=dict)


class HomotopyTree:
    """Canonical keys for homotopy classes of walks starting at ``root``."""

    def __init__(self, tri: TurnTable, root_vertex: int, window: int = 2):
        self.tri = tri
        self.root_vertex = root_vertex
        self.root = HomotopyNode(self, None, None, None, START, None)
        self.window = window
        self.stats = TreeStats()

    # ------------------------------------------------------------------
    def trivial_key(self) -> HomotopyKey:
        return self.root

    def head_vertex(self, key: HomotopyKey) -> int:
        if key is self.root:
            return self.root_vertex
        return self.tri.vertex_of[key.last_dart ^ 1]

    def _check(self, key):
        if not isinstance(key, HomotopyNode) or key.tree is not self:
            raise ForeignKey("key belongs to another tree")

    def _child(self, parent: HomotopyNode, sub: ElementarySubwalk) -> HomotopyNode:
        if sub.kind == START:
            table, label = parent.children[START], sub.last_dart
        else:
            table, label = parent.children[sub.kind], sub.k
        node = table.get(label)
        if node is None:
            node = HomotopyNode(self, parent, sub.first_dart, sub.last_dart, sub.kind, sub.k)
            table[label] = node
            self.stats.nodes += 1
        return node

    def _thread(self, parent: HomotopyNode, subs: Iterable[ElementarySubwalk]) -> HomotopyNode:
        node = parent
        for s in subs:
            node = self._child(node, s)
        return node

    def _node_darts(self, node: HomotopyNode) -> list[int]:
        if node.kind == START:
            return [node.last_dart]
        return expand_subwalk(self.tri, node.subwalk())

    # ------------------------------------------------------------------
    def insert_walk(self, walk: Sequence[int]) -> HomotopyKey:
        """Key of a reduced walk from the root, threaded in wholesale."""
        if not walk:
            return self.root
        if self.tri.vertex_of[walk[0]] != self.root_vertex:
            raise NotIncident("walk does not start at the root")
        start = self._child(self.root, ElementarySubwalk(None, walk[0], START, 0))
        return self._thread(start, compress(self.tri, walk).subwalks)

    def key_of(self, walk: Sequence[int]) -> HomotopyKey:
        """Batch key: reduce the walk, then thread it in."""
        return self.insert_walk(reduce_walk(self.tri, walk))

    def extend(self, key: HomotopyKey, e: int) -> HomotopyKey:
        self._check(key)
        if self.tri.vertex_of[e] != self.head_vertex(key):
            raise NotIncident(f"dart {e} does not leave the end of the keyed walk")
        self.stats.extends += 1
        levels = self.window
        while True:
            anchor = key
            chain = []
            while len(chain) < levels and anchor is not self.root:
                chain.append(anchor)
                anchor = anchor.parent
            result = self._try_window(anchor, chain, e)
            if result is not None:
                break
            self.stats.retries += 1
            levels *= 2
        self._record_rewrite(key, result)
        return result

    def _try_window(self, anchor, chain, e):
        """Re-reduce the walk below ``anchor``; None if the anchor dart moved."""
        darts: list[int] = []
        if anchor is not self.root:
            darts.append(anchor.last_dart)
        for node in reversed(chain):
            nd = self._node_darts(node)
            darts.extend(nd if node.kind == START else nd[1:])
        darts.append(e)
        self.stats.window_darts += len(darts)
        red = reduce_walk(self.tri, darts)
        if anchor is self.root:
            return self.insert_walk(red)
        if not red or red[0] != anchor.last_dart:
            return None
        if len(red) == 1:
            return anchor
        subs = compress(self.tri, red).subwalks
        base = anchor
        first = subs[0]
        if anchor.kind == first.kind and anchor.kind in (RUN3, RUN_NEG3):
            # the anchor run keeps growing; replace it by the merged run
            merged = ElementarySubwalk(anchor.first_dart, first.last_dart, anchor.kind,
                                       anchor.k + first.k)
            base = self._child(anchor.parent, merged)
            subs = subs[1:]
        return self._thread(base, subs)

    def _record_rewrite(self, old, new):
        a, b = old, new
        while a.depth > b.depth:
            a = a.parent
        while b.depth > a.depth:
            b = b.parent
        while a is not b:
            a, b = a.parent, b.parent
        rewritten = old.depth - a.depth
        st = self.stats
        st.max_rewrite = max(st.max_rewrite, rewritten)
        st.rewrite_histogram[rewritten] = st.rewrite_histogram.get(rewritten, 0) + 1

    def extend_walk(self, key: HomotopyKey, walk: Sequence[int]) -> HomotopyKey:
        for d in walk:
            key = self.extend(key, d)
        return key

    # ------------------------------------------------------------------
    def path(self, key: HomotopyKey) -> list[HomotopyNode]:
        self._check(key)
        nodes = []
        while key is not self.root:
            nodes.append(key)
            key = key.parent
        nodes.reverse()
        return nodes

    def reduced_walk(self, key: HomotopyKey) -> CompressedTurnSequence:
        nodes = self.path(key)
        if not nodes:
            return CompressedTurnSequence([], self.root_vertex, ())
        start = nodes[0]
        subs = [n.subwalk() for n in nodes[1:]]
        if not subs:
            return CompressedTurnSequence([], self.root_vertex, (start.last_dart,))
        return CompressedTurnSequence(subs, self.root_vertex, ())

    def walk_of(self, key: HomotopyKey) -> list[int]:
        nodes = self.path(key)
        if not nodes:
            return []
        out = [nodes[0].last_dart]
        for n in nodes[1:]:
            out.extend(self._node_darts(n)[1:])
        return out

    def partition(self, items: Sequence[tuple[Hashable, HomotopyKey]]) -> list[list]:
        """Group payloads by key using scratch marks on the nodes."""
        for _, key in items:
            self._check(key)
        groups: list[list] = []
        touched = []
        try:
            for payload, key in items:
                if key.mark is None:
                    key.mark = len(groups)
                    groups.append([])
                    touched.append(key)
                groups[key.mark].append(payload)
        finally:
            for key in touched:
                key.mark = None
        return groups

    def audit(self) -> None:
        """Check the trie invariants on every node."""
        stack = [self.root]
        count = 0
        while stack:
            node = stack.pop()
            count += 1
            for table in node.children.values():
                for child in table.values():
                    if child.parent is not node:
                        raise AssertionError("broken parent pointer")
                    if node is not self.root and child.first_dart != node.last_dart:
                        raise AssertionError("child does not continue its parent")
                    if (child.kind in (RUN3, RUN_NEG3) and child.kind == node.kind):
                        raise AssertionError("adjacent runs of the same sign")
                    stack.append(child)
        if count != self.stats.nodes:
            raise AssertionError("node count drifted")
