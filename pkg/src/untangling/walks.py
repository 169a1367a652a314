"""Turn sequences, reduced walks, and the linear-time reduction of (closed) walks.

A move replaces a subwalk by the other boundary of the strip of triangles on
one of its sides.  The walk is kept in a doubly linked chain of dart
occurrences; after each move only the vertices whose pattern window touches
the modified region are rechecked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ContractibleInput, EmptyWalk, NotIncident, OverlapViolation
from .reducing_tri import RED, BLUE, Turn, TurnTable

LEFT = 0
RIGHT = 1

RUN3 = "RUN3"
RUN_NEG3 = "RUN-3"
SINGLE = "SINGLE"


# ---------------------------------------------------------------------------
# turn sequences and predicates


def check_walk(tri: TurnTable, walk: Sequence[int], closed: bool = False) -> None:
    vo = tri.vertex_of
    n = len(walk)
    for i in range(n - 1):
        if vo[walk[i] ^ 1] != vo[walk[i + 1]]:
            raise NotIncident(f"darts {walk[i]} and {walk[i + 1]} are not consecutive")
    if closed and n and vo[walk[-1] ^ 1] != vo[walk[0]]:
        raise NotIncident("closed walk does not close up")


def turn_sequence(tri: TurnTable, walk: Sequence[int], closed: bool = False) -> list[Turn]:
    if closed:
        if not walk:
            raise EmptyWalk("closed walks need at least one dart")
        return [tri.turn(walk[i - 1], walk[i]) for i in range(len(walk))]
    return [tri.turn(walk[i - 1], walk[i]) for i in range(1, len(walk))]


def is_bad(t: Turn) -> bool:
    return t.value in (0, 1, -1) or (t.value in (2, -2) and t.tag == RED)


def is_reduced(tri: TurnTable, walk: Sequence[int]) -> bool:
    return not any(is_bad(t) for t in turn_sequence(tri, walk))


def is_reduced_closed(tri: TurnTable, cycle: Sequence[int]) -> bool:
    turns = turn_sequence(tri, cycle, closed=True)
    if any(is_bad(t) for t in turns):
        return False
    if all(t.value == 3 and t.tag == RED for t in turns):
        return False
    if all(t.value == -3 and t.tag == BLUE for t in turns):
        return False
    return True


def potential(tri: TurnTable, walk: Sequence[int], closed: bool = False) -> int:
    """Three times the length plus the number of bad turns."""
    if closed and not walk:
        return 0
    turns = turn_sequence(tri, walk, closed) if (closed or len(walk) > 1) else []
    return 3 * len(walk) + sum(1 for t in turns if is_bad(t))


def reverse(walk: Sequence[int]) -> list[int]:
    return [d ^ 1 for d in reversed(walk)]


def canonical_rotation(cycle: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least rotation, for comparing cyclic dart sequences."""
    n = len(cycle)
    if n == 0:
        return ()
    best = min(range(n), key=lambda s: tuple(cycle[s:]) + tuple(cycle[:s]))
    return tuple(cycle[best:]) + tuple(cycle[:best])


# ---------------------------------------------------------------------------
# strip geometry


def left_links(tri: TurnTable, e_in: int, e_out: int) -> list[int]:
    """Outer sides of the triangles on the left of ``e_in e_out``, in walk order."""
    v = tri.vertex_of[e_out]
    A, deg = tri.A[v], tri.deg[v]
    base = tri.idx[e_in ^ 1]
    k = (tri.idx[e_out] - base) % deg
    sinv = tri.sigma_inv
    return [sinv[A[(base + j) % deg] ^ 1] ^ 1 for j in range(1, k + 1)]


def outer_path(tri: TurnTable, darts: Sequence[int], side: int) -> list[int]:
    """Replacement for a subwalk: the far boundary of its strip on ``side``."""
    if side == RIGHT:
        return reverse(outer_path(tri, reverse(darts), LEFT))
    m = len(darts) - 1
    if m == 1:
        return left_links(tri, darts[0], darts[1])
    out: list[int] = []
    for i in range(1, m + 1):
        links = left_links(tri, darts[i - 1], darts[i])
        lo = 0 if i == 1 else 1
        hi = len(links) if i == m else len(links) - 1
        out.extend(links[lo:hi])
    return out


# ---------------------------------------------------------------------------
# the chain and the reducer


@dataclass
class ReductionStats:
    moves: int = 0
    spur: int = 0
    spike: int = 0
    bracket: int = 0
    flip: int = 0
    heart: int = 0
    final: int = 0
    turn_evals: int = 0


class _Chain:
    def __init__(self, tri: TurnTable, darts: Sequence[int], closed: bool, stats: ReductionStats):
        self.tri = tri
        self.closed = closed
        self.stats = stats
        n = len(darts)
        self.d = list(darts)
        self.nxt = list(range(1, n + 1))
        self.prv = list(range(-1, n - 1))
        if n:
            if closed:
                self.nxt[-1] = 0
                self.prv[0] = n - 1
            else:
                self.nxt[-1] = -1
        self.alive = [True] * n
        self.head = 0 if n else -1
        self.size = n
        self.base = 0 if n else -1
        self.transport: list[int] = []
        # cache of turn values at the vertex before a node
        self.cache: dict[int, int] = {}

    # turn at the vertex before node x (x must have a predecessor)
    def value(self, x: int) -> int:
        c = self.cache.get(x)
        if c is None:
            tri = self.tri
            ein, eout = self.d[self.prv[x]], self.d[x]
            v = tri.vertex_of[eout]
            deg = tri.deg[v]
            k = (tri.idx[eout] - tri.idx[ein ^ 1]) % deg
            c = k if k <= 3 else (k - deg if deg - k <= 3 else k)
            self.cache[x] = c
            self.stats.turn_evals += 1
        return c

    def has_vertex(self, x: int) -> bool:
        return x != -1 and self.prv[x] != -1

    def tag(self, x: int, side: int) -> str:
        if side == LEFT:
            return self.tri.left_color[self.d[self.prv[x]]]
        return self.tri.left_color[self.d[x] ^ 1]

    def nodes_from(self, start: int):
        out = []
        x = start
        for _ in range(self.size):
            out.append(x)
            x = self.nxt[x]
            if x == -1 or x == start:
                break
        return out

    def darts(self, start=None) -> list[int]:
        if self.size == 0:
            return []
        s = self.head if start is None else start
        return [self.d[x] for x in self.nodes_from(s)]

    def segment(self, first: int, last: int) -> list[int]:
        out = [first]
        x = first
        while x != last:
            x = self.nxt[x]
            out.append(x)
        return out

    def _new(self, dart: int) -> int:
        self.d.append(dart)
        self.nxt.append(-1)
        self.prv.append(-1)
        self.alive.append(True)
        return len(self.d) - 1

    def replace(self, first: int, last: int, new_darts: Sequence[int]):
        """Swap nodes first..last for fresh nodes; returns (new nodes, start node, after)."""
        seg = self.segment(first, last)
        before, after = self.prv[first], self.nxt[last]
        whole = self.closed and len(seg) == self.size
        seg_set = set(seg)
        # basepoint bookkeeping for closed walks
        base_inside = self.closed and self.base in seg_set
        base_offset = seg.index(self.base) if base_inside else -1
        if base_offset > 0:
            self.transport.extend(reverse([self.d[y] for y in seg[:base_offset]]))
        for y in seg:
            self.alive[y] = False
            self.cache.pop(y, None)
        new_nodes = [self._new(dd) for dd in new_darts]
        for a, b in zip(new_nodes, new_nodes[1:]):
            self.nxt[a] = b
            self.prv[b] = a
        self.size += len(new_nodes) - len(seg)
        if whole:
            if not new_nodes:
                self.size = 0
                self.head = self.base = -1
                return [], -1, -1
            self.nxt[new_nodes[-1]] = new_nodes[0]
            self.prv[new_nodes[0]] = new_nodes[-1]
            self.head = new_nodes[0]
            if base_inside:
                self.base = new_nodes[0]
            return new_nodes, new_nodes[0], new_nodes[0]
        if new_nodes:
            self.prv[new_nodes[0]] = before
            self.nxt[new_nodes[-1]] = after
            if before != -1:
                self.nxt[before] = new_nodes[0]
            if after != -1:
                self.prv[after] = new_nodes[-1]
            start = new_nodes[0]
        else:
            if before != -1:
                self.nxt[before] = after
            if after != -1:
                self.prv[after] = before
            start = after
        if self.head in seg_set:
            self.head = new_nodes[0] if new_nodes else after
            if self.head == -1 and self.size > 0:
                self.head = before
        if base_inside:
            self.base = start if start != -1 else before
        if after != -1:
            self.cache.pop(after, None)
        if self.size == 0:
            self.head = -1
        return new_nodes, start, after


class Reducer:
    """Applies spur, spike, bracket and flip moves until none applies."""

    def __init__(self, tri: TurnTable, darts: Sequence[int], closed: bool,
                 stats: ReductionStats | None = None):
        self.tri = tri
        self.stats = stats if stats is not None else ReductionStats()
        self.chain = _Chain(tri, darts, closed, self.stats)
        self.closed = closed

    def _sided(self, value: int, side: int) -> int:
        if side == LEFT or abs(value) > 3:
            return value
        return -value

    def find(self, x: int):
        ch = self.chain
        v = ch.value(x)
        if v == 0:
            return ("spur", ch.prv[x], x, LEFT)
        if v == 1:
            return ("spike", ch.prv[x], x, LEFT)
        if v == -1:
            return ("spike", ch.prv[x], x, RIGHT)
        if v != 2 and v != -2:
            return None
        side = LEFT if v == 2 else RIGHT
        s3 = 3 if side == LEFT else -3
        n = ch.size
        limit = n if self.closed else n + 1
        # forward over the run of sided 3s
        y = ch.nxt[x]
        steps = 1
        while y != -1 and steps < limit and ch.value(y) == s3:
            y = ch.nxt[y]
            steps += 1
        if self.closed and steps >= n:
            return None
        if y != -1 and ch.value(y) == v and (not self.closed or steps + 2 <= n):
            return ("bracket", ch.prv[x], y, side)
        if ch.tag(x, side) != RED:
            return None
        if y != -1 and self._sided(ch.value(y), side) in (-1, 0, 1, 2, 3):
            return None
        # backward over the run of sided 3s
        z = ch.prv[x]
        back = 1
        while ch.has_vertex(z) and back < limit and ch.value(z) == s3:
            z = ch.prv[z]
            back += 1
        if self.closed and back + steps > n:
            return None
        if ch.has_vertex(z):
            a = ch.value(z)
            if a == v:
                if not self.closed or back + 2 <= n:
                    return ("bracket", ch.prv[z], x, side)
                return None
            if self._sided(a, side) in (-1, 0, 1, 2, 3):
                return None
        last = ch.prv[y] if y != -1 else self._tail()
        kind = "heart" if self.closed and back + steps == n else "flip"
        return (kind, z, last, side)

    def _tail(self) -> int:
        ch = self.chain
        x = ch.head
        while ch.nxt[x] != -1:
            x = ch.nxt[x]
        return x

    def apply(self, move):
        kind, first, last, side = move
        ch = self.chain
        seg = ch.segment(first, last)
        darts = [ch.d[y] for y in seg]
        if kind == "spur":
            new = []
        else:
            new = outer_path(self.tri, darts, side)
        st = self.stats
        st.moves += 1
        setattr(st, kind, getattr(st, kind) + 1)
        if kind == "heart":
            st.flip += 1
        before = ch.prv[first]
        new_nodes, start, after = ch.replace(first, last, new)
        if ch.size == 0:
            return []
        touched = list(new_nodes)
        if after != -1:
            touched.append(after)
        anchor = start if start != -1 else before
        if anchor != -1:
            touched.append(anchor)
        # nearest non-3 vertices outside the modified region
        if anchor != -1:
            u = ch.prv[anchor] if ch.has_vertex(anchor) else -1
            steps = 0
            while u != -1 and ch.has_vertex(u) and abs(ch.value(u)) == 3 and steps < ch.size:
                u = ch.prv[u]
                steps += 1
            if u != -1:
                touched.append(u)
        if after != -1:
            w = ch.nxt[after]
            steps = 0
            while w != -1 and abs(ch.value(w)) == 3 and steps < ch.size:
                w = ch.nxt[w]
                steps += 1
            if w != -1:
                touched.append(w)
        return touched

    def run(self):
        ch = self.chain
        stack = [x for x in range(len(ch.d)) if ch.has_vertex(x)]
        stack.reverse()
        while stack:
            x = stack.pop()
            if not ch.alive[x] or not ch.has_vertex(x):
                continue
            if ch.size == 0:
                break
            move = self.find(x)
            if move is None:
                continue
            stack.extend(self.apply(move))
            if ch.size == 0:
                break
        return self


def reduce_walk(tri: TurnTable, walk: Sequence[int], stats: ReductionStats | None = None) -> list[int]:
    check_walk(tri, walk)
    if len(walk) < 2:
        return list(walk)
    r = Reducer(tri, walk, closed=False, stats=stats).run()
    return r.chain.darts()


@dataclass
class ClosedReduction:
    cycle: list[int]
    transport: list[int]
    stats: ReductionStats


def reduce_closed_walk_based(tri: TurnTable, cycle: Sequence[int],
                             stats: ReductionStats | None = None) -> ClosedReduction:
    """Reduce a closed walk, tracking its basepoint.

    ``cycle[0]`` leaves the basepoint.  The result's cycle starts at the new
    basepoint and ``transport`` is the walk followed by the basepoint, so that
    the input loop is homotopic to ``transport . result . reverse(transport)``.
    """
    if not cycle:
        raise EmptyWalk("closed walks need at least one dart")
    check_walk(tri, cycle, closed=True)
    r = Reducer(tri, cycle, closed=True, stats=stats).run()
    ch = r.chain
    if ch.size == 0:
        raise ContractibleInput("closed walk reduces to a point")
    darts = ch.darts(ch.base)
    transport = list(ch.transport)
    turns = [tri.turn(darts[i - 1], darts[i]) for i in range(len(darts))]
    if all(t.value == 3 and t.tag == RED for t in turns):
        darts, rung = _final_move(tri, darts)
        transport.append(rung)
        r.stats.moves += 1
        r.stats.final += 1
    elif all(t.value == -3 and t.tag == BLUE for t in turns):
        # the reversal starts at the same base and turns 3r everywhere
        new_rev, rung = _final_move(tri, reverse(darts))
        darts = reverse(new_rev)
        transport.append(rung)
        r.stats.moves += 1
        r.stats.final += 1
    return ClosedReduction(darts, transport, r.stats)


def _final_move(tri: TurnTable, darts: list[int]):
    """Push a cycle of left 3-turns across its strip; new cycle starts at the base rung."""
    n = len(darts)
    new = []
    for i in range(n):
        links = left_links(tri, darts[i - 1], darts[i])
        new.append(links[1])
    rung = tri.sigma_inv[darts[-1] ^ 1]
    return new, rung


def reduce_closed_walk(tri: TurnTable, cycle: Sequence[int],
                       stats: ReductionStats | None = None) -> list[int]:
    return reduce_closed_walk_based(tri, cycle, stats).cycle


# ---------------------------------------------------------------------------
# compressed turn sequences


@dataclass(frozen=True)
class ElementarySubwalk:
    first_dart: int
    last_dart: int
    kind: str
    k: int  # run length for RUN3 / RUN-3, the turn value for SINGLE

    @property
    def turns(self) -> list[int]:
        if self.kind == RUN3:
            return [3] * self.k
        if self.kind == RUN_NEG3:
            return [-3] * self.k
        return [self.k]


@dataclass
class CompressedTurnSequence:
    subwalks: list[ElementarySubwalk] = field(default_factory=list)
    start_vertex: int = -1
    short: tuple[int, ...] = ()  # explicit darts for walks of length 0 or 1

    def __len__(self):
        return len(self.subwalks)

    def turn_values(self) -> list[int]:
        out = []
        for s in self.subwalks:
            out.extend(s.turns)
        return out


def compress(tri: TurnTable, walk: Sequence[int]) -> CompressedTurnSequence:
    check_walk(tri, walk)
    if len(walk) < 2:
        sv = tri.vertex_of[walk[0]] if walk else -1
        return CompressedTurnSequence([], sv, tuple(walk))
    values = [tri.turn_value(walk[i - 1], walk[i]) for i in range(1, len(walk))]
    subs = []
    i = 0
    n = len(values)
    while i < n:
        v = values[i]
        if v in (3, -3):
            j = i
            while j < n and values[j] == v:
                j += 1
            subs.append(ElementarySubwalk(walk[i], walk[j], RUN3 if v == 3 else RUN_NEG3, j - i))
            i = j
        else:
            subs.append(ElementarySubwalk(walk[i], walk[i + 1], SINGLE, v))
            i += 1
    return CompressedTurnSequence(subs, tri.vertex_of[walk[0]], ())


def validate_compressed(seq: CompressedTurnSequence) -> None:
    subs = seq.subwalks
    for a, b in zip(subs, subs[1:]):
        if a.last_dart != b.first_dart:
            raise OverlapViolation("consecutive subwalks must share a dart")
        if a.kind == b.kind and a.kind != SINGLE:
            raise OverlapViolation("adjacent runs of the same kind are not maximal")
    for s in subs:
        if s.kind in (RUN3, RUN_NEG3) and s.k < 1:
            raise OverlapViolation("runs have positive length")
        if s.kind == SINGLE and s.k in (3, -3):
            raise OverlapViolation("a single symbol cannot be a 3-turn")


def expand_subwalk(tri: TurnTable, s: ElementarySubwalk) -> list[int]:
    """Darts of one elementary subwalk, regenerated from its first dart."""
    out = [s.first_dart]
    d = s.first_dart
    for t in s.turns:
        d = tri.dart_by_turn(d, t)
        out.append(d)
    if out[-1] != s.last_dart:
        raise OverlapViolation("subwalk turns do not reach its recorded last dart")
    return out


def uncompress(tri: TurnTable, seq: CompressedTurnSequence) -> list[int]:
    if not seq.subwalks:
        return list(seq.short)
    validate_compressed(seq)
    out = [seq.subwalks[0].first_dart]
    for s in seq.subwalks:
        out.extend(expand_subwalk(tri, s)[1:])
    return out
