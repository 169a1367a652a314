"""Weak embeddings in patch systems.

The patch system of a host graph has one disk per vertex and one untwisted
strip per edge; the segments on a disk boundary follow the rotation system.
A drawing of ``G`` is a weak embedding when its strands can be ordered inside
every strip so that each disk can be drawn without crossings.

The decision is an exact search.  Unknowns are the left-to-right orders of
the strands in each strip, kept as pairwise booleans.  Two strand pieces that
pass through a disk (chords) constrain the orders on the segments they share;
those tables, plus transitivity, are propagated before branching.  A disk is
verified exactly once its strips are fully ordered: the disk graph together
with a wheel on its boundary terminals must be planar.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .errors import BudgetExceeded
from .surface_map import CombinatorialMap, Drawing


# ---------------------------------------------------------------------------
# patch systems


@dataclass
class PatchSystem:
    host: CombinatorialMap
    segments: list[list[int]]
    position: dict

    @property
    def n_disks(self) -> int:
        return len(self.segments)

    @property
    def n_strips(self) -> int:
        return self.host.n_edges

    @property
    def euler_characteristic(self) -> int:
        return self.n_disks - self.n_strips

    def strip_of(self, dart: int) -> int:
        return dart >> 1


def build_patch_system(host: CombinatorialMap) -> PatchSystem:
    """One disk per vertex with a boundary segment per outgoing dart, in rotation order."""
    segments = [list(rot) for rot in host.rotations]
    position = {}
    for v, rot in enumerate(segments):
        for i, d in enumerate(rot):
            position[d] = (v, i)
    return PatchSystem(host, segments, position)


# ---------------------------------------------------------------------------
# results


@dataclass
class StrandOrdering:
    """Certificate of a weak embedding.

    ``strips[e]`` lists strand occurrences ``(edge, index)`` from left to
    right as seen along dart ``2e``.  ``disks[v]`` is the counterclockwise
    cyclic order of terminals on the boundary of disk ``v``; a terminal is
    ``(edge, index, end)`` with ``end`` 0 at the tail of the occurrence and 1
    at its head.  ``rotations[u]`` lists the edge ends ``(edge, side)`` at
    ``G``-vertex ``u`` counterclockwise (``side`` 0 for the start of the edge).
    """

    strips: dict
    disks: dict
    rotations: dict


@dataclass
class WeakEmbeddingResult:
    ok: bool
    certificate: Optional[StrandOrdering] = None
    nodes: int = 0

    def __bool__(self):
        return self.ok


# ---------------------------------------------------------------------------
# the instance: simplification, pieces and terminals


@dataclass
class _Instance:
    host: CombinatorialMap
    n_vertices: int
    edges: list
    walks: list
    vimg: list
    origin: list = field(default_factory=list)  # new edge -> [(old edge, +1/-1), ...]
    alive: list = field(default_factory=list)
    original_lengths: list = field(default_factory=list)


def _simplify(d: Drawing) -> _Instance:
    """Drop leaves hanging off by empty walks and suppress degree-two vertices."""
    edges = [tuple(e) for e in d.edges]
    walks = [list(w) for w in d.edge_image]
    origin = [[(i, 1)] for i in range(len(edges))]
    dead_edge = [False] * len(edges)
    alive = [True] * d.n_vertices
    inc: list[set] = [set() for _ in range(d.n_vertices)]
    for i, (u, v) in enumerate(edges):
        inc[u].add(i)
        inc[v].add(i)

    def degree(x):
        return sum(2 if edges[i][0] == edges[i][1] else 1 for i in inc[x])

    queue = list(range(d.n_vertices))
    while queue:
        x = queue.pop()
        if not alive[x]:
            continue
        if degree(x) == 1:
            (i,) = inc[x]
            if walks[i]:
                continue
            u, v = edges[i]
            y = v if u == x else u
            alive[x] = False
            dead_edge[i] = True
            inc[x].clear()
            inc[y].discard(i)
            queue.append(y)
        elif degree(x) == 2 and len(inc[x]) == 2:
            i, j = sorted(inc[x])
            # orient i into x and j out of x
            wi = walks[i] if edges[i][1] == x else [t ^ 1 for t in reversed(walks[i])]
            oi = origin[i] if edges[i][1] == x else [(a, -s) for a, s in reversed(origin[i])]
            ui = edges[i][0] if edges[i][1] == x else edges[i][1]
            wj = walks[j] if edges[j][0] == x else [t ^ 1 for t in reversed(walks[j])]
            oj = origin[j] if edges[j][0] == x else [(a, -s) for a, s in reversed(origin[j])]
            vj = edges[j][1] if edges[j][0] == x else edges[j][0]
            k = len(edges)
            edges.append((ui, vj))
            walks.append(wi + wj)
            origin.append(oi + oj)
            dead_edge.append(False)
            dead_edge[i] = dead_edge[j] = True
            alive[x] = False
            inc[x].clear()
            for y in (ui, vj):
                inc[y].discard(i)
                inc[y].discard(j)
                inc[y].add(k)
            queue.extend([ui, vj])
    keep = [i for i in range(len(edges)) if not dead_edge[i]]
    inst = _Instance(d.host, d.n_vertices, [edges[i] for i in keep], [walks[i] for i in keep],
                     list(d.vertex_image), [origin[i] for i in keep], alive,
                     [len(w) for w in d.edge_image])
    return inst


def _identity_instance(d: Drawing) -> _Instance:
    return _Instance(d.host, d.n_vertices, [tuple(e) for e in d.edges],
                     [list(w) for w in d.edge_image], list(d.vertex_image),
                     [[(i, 1)] for i in range(len(d.edges))], [True] * d.n_vertices,
                     [len(w) for w in d.edge_image])


class _Pieces:
    """Terminals on each disk segment and the graph pieces inside each disk."""

    def __init__(self, inst: _Instance, ps: PatchSystem):
        self.inst = inst
        self.ps = ps
        host = inst.host
        self.occurrences: dict[int, list] = {}  # strip -> occurrence ids
        self.occ_dart: dict = {}
        self.terminal_segment: dict = {}  # terminal -> dart of its segment
        self.disk_terminals: dict[int, list] = {v: [] for v in range(host.n_vertices)}
        self.disk_edges: dict[int, list] = {v: [] for v in range(host.n_vertices)}
        self.disk_gvertices: dict[int, list] = {v: [] for v in range(host.n_vertices)}
        self.chords: dict[int, list] = {v: [] for v in range(host.n_vertices)}
        for u in range(inst.n_vertices):
            if inst.alive[u]:
                self.disk_gvertices[inst.vimg[u]].append(("g", u))
        for i, ((u, v), walk) in enumerate(zip(inst.edges, inst.walks)):
            if not walk:
                x = inst.vimg[u]
                a, b = ("m", i, 0), ("m", i, 1)
                self.disk_edges[x] += [(("g", u), a), (a, b), (b, ("g", v))]
                continue
            for p, dart in enumerate(walk):
                occ = (i, p)
                self.occurrences.setdefault(dart >> 1, []).append(occ)
                self.occ_dart[occ] = dart
                t0, t1 = (i, p, 0), (i, p, 1)
                self.terminal_segment[t0] = dart
                self.terminal_segment[t1] = dart ^ 1
                self.disk_terminals[host.vertex_of[dart]].append(t0)
                self.disk_terminals[host.vertex_of[dart ^ 1]].append(t1)
            first, last = (i, 0, 0), (i, len(walk) - 1, 1)
            self.disk_edges[inst.vimg[u]].append((("g", u), first))
            self.disk_edges[inst.vimg[v]].append((last, ("g", v)))
            for p in range(1, len(walk)):
                x = host.vertex_of[walk[p]]
                a, b = (i, p - 1, 1), (i, p, 0)
                self.disk_edges[x].append((a, b))
                self.chords[x].append((a, b))

    def occurrence(self, terminal):
        return terminal[0], terminal[1]


# ---------------------------------------------------------------------------
# order variables and propagation


class _Conflict(Exception):
    pass


class _Solver:
    def __init__(self, pieces: _Pieces, budget: int):
        self.pc = pieces
        self.budget = budget
        self.nodes = 0
        self.value: dict = {}  # (strip, a, b) with a < b -> True iff a left of b
        self.trail: list = []
        self.constraints: list = []
        self.watch: dict = {}
        self.strip_members = {e: list(occs) for e, occs in pieces.occurrences.items()}
        self.disk_strips = {}
        host = pieces.inst.host
        for v in range(host.n_vertices):
            self.disk_strips[v] = {d >> 1 for d in host.rotations[v]
                                   if (d >> 1) in self.strip_members}
        self._build_constraints()
        # branch on the most constrained variables first
        keys = [self.var(e, a, b) for e, members in self.strip_members.items()
                for a, b in itertools.combinations(members, 2)]
        self.branch_order = sorted(keys, key=lambda k: -len(self.watch.get(k, ())))

    # variables ----------------------------------------------------------
    @staticmethod
    def var(e, a, b):
        return (e, a, b) if a < b else (e, b, a)

    def left_of(self, e, a, b):
        """True/False/None: is occurrence a left of b in strip e."""
        key = (e, a, b) if a < b else (e, b, a)
        val = self.value.get(key)
        if val is None:
            return None
        return val if a < b else not val

    def set_left(self, e, a, b, truth, queue):
        key = (e, a, b) if a < b else (e, b, a)
        val = truth if a < b else not truth
        cur = self.value.get(key)
        if cur is not None:
            if cur != val:
                raise _Conflict()
            return
        self.value[key] = val
        self.trail.append(key)
        queue.append(key)

    def ccw_before(self, t1, t2):
        """Order of two terminals on one segment, counterclockwise along the disk."""
        pc = self.pc
        d = pc.terminal_segment[t1]
        e = d >> 1
        a, b = pc.occurrence(t1), pc.occurrence(t2)
        lo = self.left_of(e, a, b)
        if lo is None:
            return None
        # along an even dart the segment is read right to left
        return (not lo) if d % 2 == 0 else lo

    # constraints --------------------------------------------------------
    def _build_constraints(self):
        pc = self.pc
        ps = pc.ps
        for v, chords in pc.chords.items():
            if not chords:
                continue
            deg = len(ps.segments[v])
            types: dict = {}
            by_segment: dict = {}
            for c in chords:
                sa = pc.terminal_segment[c[0]]
                sb = pc.terminal_segment[c[1]]
                pa, pb = ps.position[sa][1], ps.position[sb][1]
                types.setdefault((min(pa, pb), max(pa, pb)), []).append(c)
                for s in {sa, sb}:
                    by_segment.setdefault(s, []).append(c)
            # chords on four distinct segments: crossing is forced by the rotation
            keys = list(types)
            for x in range(len(keys)):
                a1, b1 = keys[x]
                if a1 == b1:
                    continue
                for y in range(x + 1, len(keys)):
                    a2, b2 = keys[y]
                    if len({a1, b1, a2, b2}) < 4:
                        continue
                    if (a1 < a2 < b1) != (a1 < b2 < b1):
                        raise _Conflict()
            seen = set()
            for s, group in by_segment.items():
                for c1, c2 in itertools.combinations(group, 2):
                    key = (c1, c2) if c1 < c2 else (c2, c1)
                    if key in seen:
                        continue
                    seen.add(key)
                    self._chord_pair(v, deg, c1, c2)

    def _chord_pair(self, v, deg, c1, c2):
        pc = self.pc
        ps = pc.ps
        terms = [c1[0], c1[1], c2[0], c2[1]]
        segs = [pc.terminal_segment[t] for t in terms]
        pos = [ps.position[s][1] for s in segs]
        pairs = []
        for x, y in itertools.combinations(range(4), 2):
            if segs[x] == segs[y] and pc.occurrence(terms[x]) != pc.occurrence(terms[y]):
                pairs.append((x, y))
        variables = []
        for x, y in pairs:
            e = segs[x] >> 1
            variables.append(self.var(e, pc.occurrence(terms[x]), pc.occurrence(terms[y])))
        uniq = sorted(set(variables))
        allowed = set()
        for bits in itertools.product((False, True), repeat=len(uniq)):
            assign = dict(zip(uniq, bits))
            # rank terminals within each segment
            before = {}
            for (x, y), key in zip(pairs, variables):
                e, a, b = key
                lo_ab = assign[key]
                ta = pc.occurrence(terms[x])
                lo = lo_ab if ta == a else not lo_ab
                ccw = (not lo) if segs[x] % 2 == 0 else lo
                before[(x, y)] = ccw
                before[(y, x)] = not ccw
            order = _local_order(pos, before)
            if order is None:
                continue
            rank = {t: r for r, t in enumerate(order)}
            p, q, p2, q2 = rank[0], rank[1], rank[2], rank[3]
            lo, hi = min(p, q), max(p, q)
            if (lo < p2 < hi) != (lo < q2 < hi):
                continue
            allowed.add(bits)
        if not allowed:
            raise _Conflict()
        if len(allowed) == 2 ** len(uniq):
            return
        con = (tuple(uniq), frozenset(allowed))
        idx = len(self.constraints)
        self.constraints.append(con)
        for key in uniq:
            self.watch.setdefault(key, []).append(idx)

    # propagation --------------------------------------------------------
    def propagate(self, queue):
        while queue:
            key = queue.pop()
            e, a, b = key
            # transitivity inside the strip
            left, right = (a, b) if self.value[key] else (b, a)
            for c in self.strip_members[e]:
                if c == left or c == right:
                    continue
                if self.left_of(e, right, c):
                    self.set_left(e, left, c, True, queue)
                if self.left_of(e, c, left):
                    self.set_left(e, c, right, True, queue)
            for idx in self.watch.get(key, ()):
                uniq, allowed = self.constraints[idx]
                known = [self.value.get(k) for k in uniq]
                options = [bits for bits in allowed
                           if all(kv is None or kv == bv for kv, bv in zip(known, bits))]
                if not options:
                    raise _Conflict()
                for j, k in enumerate(uniq):
                    if known[j] is None and all(o[j] == options[0][j] for o in options):
                        val = options[0][j]
                        if self.value.get(k) is None:
                            self.value[k] = val
                            self.trail.append(k)
                            queue.append(k)

    def undo(self, mark):
        while len(self.trail) > mark:
            del self.value[self.trail.pop()]

    # search -------------------------------------------------------------
    def strip_order(self, e):
        members = self.strip_members[e]
        # a total order: sort by number of members to the left
        count = {m: 0 for m in members}
        for a, b in itertools.combinations(members, 2):
            if self.left_of(e, a, b):
                count[b] += 1
            else:
                count[a] += 1
        return sorted(members, key=lambda m: count[m])

    def complete(self, e) -> bool:
        members = self.strip_members[e]
        for a, b in itertools.combinations(members, 2):
            if self.left_of(e, a, b) is None:
                return False
        return True

    def pick(self):
        for key in self.branch_order:
            if key not in self.value:
                return key
        return None

    def solve(self):
        try:
            self.propagate(list(self.value))
        except _Conflict:
            return None
        checked: dict = {}
        return self._search(checked)

    def _node(self, checked):
        """Count a node, check settled disks, and return a result, ``_FAIL`` or a branch variable."""
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"weak embedding search exceeded {self.budget} nodes")
        for v, strips in self.disk_strips.items():
            if v in checked:
                continue
            if all(self.complete(e) for e in strips):
                orders = {e: self.strip_order(e) for e in strips}
                emb = _disk_embedding(self.pc, v, orders)
                if emb is None:
                    return _FAIL
                checked[v] = emb
        key = self.pick()
        if key is not None:
            return key
        for v, strips in self.disk_strips.items():
            if v not in checked:
                emb = _disk_embedding(self.pc, v, {e: self.strip_order(e) for e in strips})
                if emb is None:
                    return _FAIL
                checked[v] = emb
        return _Found(({e: self.strip_order(e) for e in self.strip_members}, dict(checked)))

    def _assign(self, key, truth, checked):
        try:
            self.value[key] = truth
            self.trail.append(key)
            self.propagate([key])
        except _Conflict:
            return _FAIL
        return self._node(checked)

    def _search(self, checked):
        # depth-first over branch variables, True first; frames hold
        # [variable, trail mark, disks checked before, False tried]
        frames = []
        outcome = self._node(checked)
        while True:
            if isinstance(outcome, _Found):
                return outcome.value
            if outcome is not _FAIL:
                frames.append([outcome, len(self.trail), dict(checked), False])
                outcome = self._assign(outcome, True, checked)
                continue
            while frames:
                key, mark, saved, tried_false = frames[-1]
                self.undo(mark)
                checked.clear()
                checked.update(saved)
                if not tried_false:
                    frames[-1][3] = True
                    outcome = self._assign(key, False, checked)
                    break
                frames.pop()
            else:
                return None


_FAIL = object()


@dataclass
class _Found:
    value: tuple


def _local_order(pos, before):
    """Counterclockwise order of up to four terminals, or None if the ranks are inconsistent."""

    def cmp(a, b):
        if pos[a] != pos[b]:
            return -1 if pos[a] < pos[b] else 1
        if (a, b) in before:
            return -1 if before[(a, b)] else 1
        return 0

    order = sorted(range(4), key=functools.cmp_to_key(cmp))
    rank = {t: r for r, t in enumerate(order)}
    for (a, b), ccw in before.items():
        if (rank[a] < rank[b]) != ccw:
            return None
    return order


# ---------------------------------------------------------------------------
# disk verification


def _disk_terminal_order(pc: _Pieces, v: int, orders: dict) -> list:
    """Terminals of disk ``v`` counterclockwise, given left-to-right strip orders."""
    out = []
    for d in pc.ps.segments[v]:
        e = d >> 1
        occs = orders.get(e)
        if not occs:
            continue
        # the tail end of an occurrence along dart d sits on segment d
        here = []
        for occ in occs:
            od = pc.occ_dart[occ]
            if od == d:
                here.append((occ[0], occ[1], 0))
            elif od == d ^ 1:
                here.append((occ[0], occ[1], 1))
        # segment of an even dart is read right to left
        if d % 2 == 0:
            here.reverse()
        out.extend(here)
    return out


def _disk_embedding(pc: _Pieces, v: int, orders: dict):
    """Planar embedding of the disk graph with its terminals on a boundary wheel, or None."""
    graph = nx.Graph()
    for node in pc.disk_gvertices[v]:
        graph.add_node(node)
    for a, b in pc.disk_edges[v]:
        graph.add_edge(a, b)
    terms = _disk_terminal_order(pc, v, orders)
    apex = ("apex",)
    graph.add_node(apex)
    for t in terms:
        graph.add_edge(apex, t)
    if len(terms) >= 3:
        for a, b in zip(terms, terms[1:] + terms[:1]):
            graph.add_edge(a, b)
    planar, emb = nx.check_planarity(graph)
    if not planar:
        return None
    return (emb, terms)


def _rotations(pc: _Pieces, checked: dict) -> dict:
    """Counterclockwise edge ends at every surviving G-vertex, in original edge ids."""
    inst = pc.inst
    out = {}
    for v, (emb, terms) in checked.items():
        apex = ("apex",)
        flip = False
        if len(terms) >= 3:
            around = list(emb.neighbors_cw_order(apex))
            # apex sits outside; seen from outside, ccw boundary order runs clockwise
            start = around.index(terms[0])
            seq = around[start:] + around[:start]
            flip = seq[1] != terms[1]
        for node in pc.disk_gvertices[v]:
            u = node[1]
            nbrs = list(emb.neighbors_cw_order(node)) if emb.has_node(node) else []
            nbrs.reverse()  # counterclockwise
            if flip:
                nbrs.reverse()
            ends = []
            for nb in nbrs:
                ends.append(_edge_end(inst, u, nb))
            out[u] = ends
    return out


def _edge_end(inst: _Instance, u, nb):
    if nb[0] == "m":
        i, side = nb[1], nb[2]
    else:
        i, p, end = nb
        side = 0 if (p == 0 and end == 0) else 1
    chain = inst.origin[i]
    old, sign = chain[0] if side == 0 else chain[-1]
    if side == 0:
        return (old, 0 if sign > 0 else 1)
    return (old, 1 if sign > 0 else 0)


# ---------------------------------------------------------------------------
# public API


def is_weak_embedding(drawing: Drawing, budget: int = 200_000, simplify: bool = True
                      ) -> WeakEmbeddingResult:
    """Decide whether the drawing can be perturbed into an embedding of the patch system."""
    drawing.validate()
    ps = build_patch_system(drawing.host)
    inst = _simplify(drawing) if simplify else _identity_instance(drawing)
    pc = _Pieces(inst, ps)
    try:
        solver = _Solver(pc, budget)
    except _Conflict:
        return WeakEmbeddingResult(False, None, 0)
    found = solver.solve()
    if found is None:
        return WeakEmbeddingResult(False, None, solver.nodes)
    orders, checked = found
    disks = {v: terms for v, (emb, terms) in checked.items()}
    cert = StrandOrdering(
        strips={e: [_original_occ(inst, occ) for occ in occs] for e, occs in orders.items()},
        disks={v: [_original_terminal(inst, t) for t in ts] for v, ts in disks.items()},
        rotations=_rotations(pc, checked),
    )
    cert._solver_orders = orders
    cert._instance = inst
    return WeakEmbeddingResult(True, cert, solver.nodes)


def _split_position(inst: _Instance, i: int, p: int):
    """Map position ``p`` on simplified edge ``i`` to (original edge, position, reversed)."""
    offset = p
    for old, sign in inst.origin[i]:
        length = inst.original_lengths[old]
        if offset < length:
            return old, (offset if sign > 0 else length - 1 - offset), sign < 0
        offset -= length
    raise ValueError("position beyond the edge")


def _original_occ(inst, occ):
    i, p = occ
    old, q, _ = _split_position(inst, i, p)
    return (old, q)


def _original_terminal(inst, t):
    i, p, end = t
    old, q, rev = _split_position(inst, i, p)
    return (old, q, (1 - end) if rev else end)


def check_certificate(drawing: Drawing, cert: StrandOrdering) -> bool:
    """Local soundness: the strip orders make every disk planar."""
    inst = cert._instance
    ps = build_patch_system(drawing.host)
    pc = _Pieces(inst, ps)
    orders = cert._solver_orders
    for e, occs in orders.items():
        if sorted(occs) != sorted(pc.occurrences.get(e, [])):
            return False
    for v in range(drawing.host.n_vertices):
        strips = {d >> 1 for d in ps.segments[v] if (d >> 1) in pc.occurrences}
        if _disk_embedding(pc, v, {e: orders[e] for e in strips}) is None:
            return False
    return True


def exhaustive_weak_embed_oracle(drawing: Drawing, max_strands: int = 10, max_edges: int = 12,
                                 budget: int = 2_000_000) -> bool:
    """Try every strand order of every strip and test each disk for planarity."""
    if len(drawing.edges) > max_edges:
        raise BudgetExceeded("too many edges for the exhaustive oracle")
    ps = build_patch_system(drawing.host)
    inst = _identity_instance(drawing)
    pc = _Pieces(inst, ps)
    strips = sorted(pc.occurrences)
    total = 1
    for e in strips:
        k = len(pc.occurrences[e])
        if k > max_strands:
            raise BudgetExceeded("too many strands in one strip for the exhaustive oracle")
        for j in range(2, k + 1):
            total *= j
    if total > budget:
        raise BudgetExceeded(f"{total} strand orderings exceed the budget")
    disks_of = {}
    for v in range(drawing.host.n_vertices):
        disks_of[v] = sorted({d >> 1 for d in ps.segments[v] if (d >> 1) in pc.occurrences})
    for choice in itertools.product(*(itertools.permutations(pc.occurrences[e]) for e in strips)):
        orders = dict(zip(strips, (list(c) for c in choice)))
        if all(_disk_embedding(pc, v, {e: orders[e] for e in disks_of[v]}) is not None
               for v in disks_of):
            return True
    if not strips:
        return all(_disk_embedding(pc, v, {}) is not None for v in disks_of)
    return False
