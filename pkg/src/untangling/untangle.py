"""Deciding whether a drawing is homotopic to an embedding.

Loop graphs are handled per surface class.  General graphs go through the
pipeline: factorize, untangle the loop graph, then test the graph for a
weak embedding over the loop graph embedded with the rotation system found.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

import networkx as nx

from .config import UntangleConfig
from .errors import (
    HostNotLoopSystem,
    HostNotReducing,
    HostNotTorusSchema,
    NotSparse,
    UnsupportedSurface,
    UntanglingError,
)
from .factorize import (
    Factorization,
    NotUntangleable,
    factorize,
    factorize_boundary,
    factorize_torus,
    is_loop_system,
    is_torus_schema,
)
from .reducing_tri import ReducingTriangulation, validate_reducing
from .schema import PLDrawing, plane_to_combinatorial, to_loop_system, to_reducing, to_torus_schema
from .surface_map import Drawing, build_map, reverse_walk
from .walks import reduce_closed_walk, reduce_closed_walk_based, reduce_walk
from .weak_embed import StrandOrdering, check_certificate, is_weak_embedding


@dataclass
class UntangleVerdict:
    """Yes/No with the evidence behind it.

    ``rotation[v]`` is the counterclockwise list of loop ends ``(loop, side)``
    at loop-graph vertex ``v``.
    """

    answer: bool
    reason: str = ""
    stage: str = ""
    rotation: dict = field(default_factory=dict)
    loop_certificate: Optional[StrandOrdering] = None
    certificate: Optional[StrandOrdering] = None
    loop_drawing: Optional[Drawing] = None
    factorization: Optional[Factorization] = None
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.answer

    @property
    def word(self) -> str:
        return "yes" if self.answer else "no"


# ---------------------------------------------------------------------------
# sparsity


def _loop_components(lam: Drawing) -> dict:
    loops: dict = {v: [] for v in range(lam.n_vertices)}
    for i, (u, v) in enumerate(lam.edges):
        if u != v:
            raise NotSparse(f"edge {i} is not a loop")
        loops[u].append(i)
    return loops


def _check_sparse(lam: Drawing, key_of, inverse_key) -> dict:
    """Loops per vertex; raises NotSparse on a contractible or repeated class."""
    loops = _loop_components(lam)
    for v, ids in loops.items():
        seen = {}
        for i in ids:
            k = key_of(lam.edge_image[i])
            if k is None:
                raise NotSparse(f"loop {i} is contractible")
            for kk in (k, inverse_key(k)):
                if kk in seen:
                    raise NotSparse(f"loops {seen[kk]} and {i} are homotopic")
            seen[k] = i
    return loops


def check_sparse_reducing(lam: Drawing, tri: ReducingTriangulation) -> dict:
    def key(w):
        red = reduce_walk(tri, w)
        return tuple(red) if red else None
    return _check_sparse(lam, key, lambda k: tuple(reverse_walk(k)))


def signature(walk) -> tuple[int, int]:
    """Class of a closed walk on the torus schema in the (q1, q2) basis."""
    u1 = sum(1 for d in walk if d == 0) - sum(1 for d in walk if d == 1)
    u2 = sum(1 for d in walk if d == 2) - sum(1 for d in walk if d == 3)
    return (u1, u2)


def check_sparse_torus(lam: Drawing) -> dict:
    def key(w):
        s = signature(w)
        return s if s != (0, 0) else None
    return _check_sparse(lam, key, lambda k: (-k[0], -k[1]))


def _free_darts(walk):
    out = []
    for d in walk:
        if out and out[-1] == d ^ 1:
            out.pop()
        else:
            out.append(d)
    return out


def check_sparse_free(lam: Drawing) -> dict:
    def key(w):
        red = _free_darts(w)
        return tuple(red) if red else None
    return _check_sparse(lam, key, lambda k: tuple(reverse_walk(k)))


# ---------------------------------------------------------------------------
# straightening


def _major(lam: Drawing, ids):
    return min(ids, key=lambda i: (len(lam.edge_image[i]), i))


def straighten(lam: Drawing, tri: ReducingTriangulation) -> Drawing:
    """Major loop reduced as a closed walk, minor loops conjugated and reduced."""
    loops = check_sparse_reducing(lam, tri)
    images = [list(w) for w in lam.edge_image]
    vimg = list(lam.vertex_image)
    majors = {}
    for v, ids in loops.items():
        if not ids:
            continue
        e = _major(lam, ids)
        majors[v] = e
        res = reduce_closed_walk_based(tri, lam.edge_image[e])
        transport = res.transport
        images[e] = list(res.cycle)
        vimg[v] = tri.vertex_of[res.cycle[0]]
        back = reverse_walk(transport)
        for i in ids:
            if i != e:
                images[i] = reduce_walk(tri, back + list(lam.edge_image[i]) + transport)
    names = dict(lam.names)
    names["major"] = majors
    return Drawing(lam.host, lam.n_vertices, list(lam.edges), vimg, images, names)


def straighten_free(lam: Drawing) -> Drawing:
    """Cyclically reduce the major loop; conjugate and freely reduce the others."""
    loops = check_sparse_free(lam)
    images = [list(w) for w in lam.edge_image]
    majors = {}
    for v, ids in loops.items():
        if not ids:
            continue
        e = _major(lam, ids)
        majors[v] = e
        w = _free_darts(lam.edge_image[e])
        images[e] = _cyclically_reduced(w)
        transport = w[:(len(w) - len(images[e])) // 2]
        back = reverse_walk(transport)
        for i in ids:
            if i != e:
                images[i] = _free_darts(back + list(lam.edge_image[i]) + transport)
    names = dict(lam.names)
    names["major"] = majors
    return Drawing(lam.host, lam.n_vertices, list(lam.edges), list(lam.vertex_image),
                   images, names)


# ---------------------------------------------------------------------------
# loop graphs


def _from_weak(straight: Drawing, loops: dict, budget: int, stage: str) -> UntangleVerdict:
    res = is_weak_embedding(straight, budget=budget)
    if not res:
        return UntangleVerdict(False, "straightened loop graph is not a weak embedding",
                               stage, loop_drawing=straight, stats={"search_nodes": res.nodes})
    rotation = {}
    for v, ids in loops.items():
        ends = list(res.certificate.rotations.get(v, []))
        if not ends and len(ids) == 1:
            # a lone loop's vertex may be smoothed away by simplification
            ends = [(ids[0], 0), (ids[0], 1)]
        rotation[v] = ends
    return UntangleVerdict(True, "", stage, rotation, res.certificate, loop_drawing=straight,
                           stats={"search_nodes": res.nodes})


def is_proper_power(cycle) -> bool:
    """True when the cyclic sequence repeats a shorter block."""
    n = len(cycle)
    return any(n % p == 0 and list(cycle[p:]) + list(cycle[:p]) == list(cycle)
               for p in range(1, n // 2 + 1))


def _cyclically_reduced(walk):
    w = _free_darts(walk)
    k = 0
    while k < len(w) - 1 - k and w[k] == w[-1 - k] ^ 1:
        k += 1
    return w[k:len(w) - k]


def _power_verdict(straight: Drawing, cyclic_form):
    # a proper power of a loop is never homotopic to a simple loop
    for i, w in enumerate(straight.edge_image):
        if is_proper_power(cyclic_form(w)):
            return UntangleVerdict(False, f"loop {i} is a proper power", "loop graph",
                                   loop_drawing=straight)
    return None


def untangle_loop_graph(lam: Drawing, tri: ReducingTriangulation,
                        budget: int = 200_000) -> UntangleVerdict:
    if not isinstance(tri, ReducingTriangulation) or tri.map is not lam.host:
        raise HostNotReducing("the loop graph must be drawn on the given reducing triangulation")
    straight = straighten(lam, tri)
    power = _power_verdict(straight, lambda w: reduce_closed_walk(tri, w))
    if power is not None:
        return power
    return _from_weak(straight, _loop_components(straight), budget, "loop graph")


def untangle_loop_graph_boundary(lam: Drawing, budget: int = 200_000) -> UntangleVerdict:
    if not is_loop_system(lam.host):
        raise HostNotLoopSystem("host must be a loop system")
    straight = straighten_free(lam)
    power = _power_verdict(straight, _cyclically_reduced)
    if power is not None:
        return power
    return _from_weak(straight, _loop_components(straight), budget, "loop graph")


def _angle_cmp(a, b) -> int:
    def half(p):
        return 0 if (p[1] > 0 or (p[1] == 0 and p[0] > 0)) else 1
    ha, hb = half(a), half(b)
    if ha != hb:
        return ha - hb
    cross = a[0] * b[1] - a[1] * b[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def torus_rotation(signatures: dict) -> list:
    """Loop ends around the basepoint, counterclockwise by direction in the grid."""
    ends = []
    for i, (u1, u2) in signatures.items():
        ends.append(((u1, u2), (i, 0)))
        ends.append(((-u1, -u2), (i, 1)))
    ends.sort(key=functools.cmp_to_key(lambda x, y: _angle_cmp(x[0], y[0])))
    return [end for _, end in ends]


def _det(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def torus_loop_verdict(components: list) -> tuple[bool, str]:
    """Decide a sparse loop graph on the torus from its classes alone.

    ``components`` lists, per vertex, the signatures of its loops.
    """
    for sigs in components:
        for s in sigs:
            if gcd(abs(s[0]), abs(s[1])) != 1:
                return False, f"class {s} is not primitive"
    busy = [sigs for sigs in components if sigs]
    if len(busy) > 1:
        if any(len(sigs) > 1 for sigs in busy):
            return False, "a multi-loop component leaves no room for another component"
        first = busy[0][0]
        for sigs in busy[1:]:
            s = sigs[0]
            if s != first and s != (-first[0], -first[1]):
                return False, "single-loop components in different free classes"
        return True, ""
    if busy:
        sigs = busy[0]
        if len(sigs) > 3:
            return False, "more than three loops at one vertex"
        for a in range(len(sigs)):
            for b in range(a + 1, len(sigs)):
                crossings = abs(_det(sigs[a], sigs[b]))
                if crossings != 1:
                    return False, f"classes {sigs[a]} and {sigs[b]} meet {crossings} times"
    return True, ""


def untangle_loop_graph_torus(lam: Drawing) -> UntangleVerdict:
    if not is_torus_schema(lam.host):
        raise HostNotTorusSchema("host must be the two-loop torus schema")
    loops = check_sparse_torus(lam)
    sig = {i: signature(w) for i, w in enumerate(lam.edge_image)}
    ok, reason = torus_loop_verdict([[sig[i] for i in ids] for ids in loops.values()])
    if not ok:
        return UntangleVerdict(False, reason, "loop graph", loop_drawing=lam,
                               stats={"signatures": sig})
    rotation = {v: torus_rotation({i: sig[i] for i in ids}) for v, ids in loops.items()}
    return UntangleVerdict(True, "", "loop graph", rotation, loop_drawing=lam,
                           stats={"signatures": sig})


# ---------------------------------------------------------------------------
# the pipeline


def loop_graph_map(rotation: dict, n_loops: int):
    """The loop graph as a map: loop ``j`` has darts ``2j`` (start) and ``2j+1`` (end)."""
    rot_lists = []
    owner = []
    for v in sorted(rotation):
        ends = rotation[v]
        if not ends:
            continue
        rot_lists.append([2 * j + side for j, side in ends])
        owner.append(v)
    darts = sorted(d for r in rot_lists for d in r)
    if darts != list(range(2 * n_loops)):
        raise UntanglingError("rotation system does not list every loop end once")
    m = build_map(rot_lists, connected=False)
    vertex = {v: m.vertex_of[r[0]] for v, r in zip(owner, rot_lists)}
    return m, vertex


def _graph_over_loops(drawing: Drawing, fact: Factorization, rotation: dict):
    """G drawn on the embedded loop graph, plus the loop-free components."""
    m, vertex = loop_graph_map(rotation, fact.n_loops)
    keep = [u for u in range(drawing.n_vertices) if fact.gamma_vertex[u] in vertex]
    index = {u: k for k, u in enumerate(keep)}
    edges, images, origin = [], [], []
    flat = []
    for i, (u, v) in enumerate(drawing.edges):
        if u in index:
            g = fact.gamma_edge[i]
            walk = [] if g is None else [2 * g[0] if g[1] > 0 else 2 * g[0] + 1]
            edges.append((index[u], index[v]))
            images.append(walk)
            origin.append(i)
        else:
            flat.append(i)
    vimg = [vertex[fact.gamma_vertex[u]] for u in keep]
    over = None
    if keep:
        over = Drawing(m, len(keep), edges, vimg, images,
                       {"vertex_origin": keep, "edge_origin": origin})
    return over, flat


def _host_route(drawing: Drawing, tri: Optional[ReducingTriangulation]):
    h = drawing.host
    g, b = h.genus, h.boundary_count
    if g == 0 and b <= 1:
        raise UnsupportedSurface("sphere and disk reduce to planarity testing")
    if b >= 1:
        if is_loop_system(h):
            return "boundary", drawing, None
        return "boundary", to_loop_system(drawing).drawing, None
    if g == 1:
        if is_torus_schema(h):
            return "torus", drawing, None
        return "torus", to_torus_schema(drawing).drawing, None
    if tri is not None and tri.map is h:
        return "reducing", drawing, tri
    try:
        tri = validate_reducing(h)
        return "reducing", drawing, tri
    except UntanglingError:
        conv = to_reducing(drawing)
        return "reducing", conv.drawing, conv.target


def _operations(d: Drawing, fact: Factorization, stats: dict) -> int:
    """Counted work: input darts read, key extensions, and search nodes."""
    read = d.n_vertices + sum(len(w) + 1 for w in d.edge_image)
    over = stats.get("graph_over_loops")
    over_size = sum(len(w) for w in over.edge_image) if over is not None else 0
    return (read + fact.stats.extends + fact.size + over_size
            + stats.get("search_nodes", 0) + stats.get("search_nodes_graph", 0))


def untangle(drawing: Drawing, tri: Optional[ReducingTriangulation] = None,
             budget: Optional[int] = None, config: Optional[UntangleConfig] = None
             ) -> UntangleVerdict:
    """Full decision: factorize, untangle the loop graph, weak-embed G over it.

    An explicit ``budget`` overrides ``config.budget``.  Turning the cutoff
    off only matters on reducing hosts and makes large inputs slower.
    """
    config = config or UntangleConfig()
    if budget is None:
        budget = config.budget
    mode, d, tri = _host_route(drawing, tri)
    if mode == "reducing":
        fact = factorize(d, tri, cutoff=config.cutoff)
    elif mode == "torus":
        fact = factorize_torus(d)
    else:
        fact = factorize_boundary(d)
    if isinstance(fact, NotUntangleable):
        return UntangleVerdict(False, fact.reason, "factorize", stats={"mode": mode})
    lam = fact.loop_drawing()
    if mode == "reducing":
        lv = untangle_loop_graph(lam, tri, budget)
    elif mode == "torus":
        lv = untangle_loop_graph_torus(lam)
    else:
        lv = untangle_loop_graph_boundary(lam, budget)
    if not lv:
        lv.factorization = fact
        lv.stats["mode"] = mode
        return lv
    over, flat = _graph_over_loops(d, fact, lv.rotation)
    stats = {"mode": mode, "loops": fact.n_loops, **lv.stats}
    # components collapsing to a loop-free vertex must be planar on their own
    flat_graph = nx.MultiGraph()
    flat_graph.add_edges_from(d.edges[i] for i in flat)
    if flat and not nx.check_planarity(nx.Graph(flat_graph))[0]:
        return UntangleVerdict(False, "a null-homotopic component is not planar", "weak embedding",
                               lv.rotation, lv.loop_certificate, None, lv.loop_drawing, fact, stats)
    cert = None
    if over is not None:
        res = is_weak_embedding(over, budget=budget)
        stats["search_nodes_graph"] = res.nodes
        if not res:
            return UntangleVerdict(False, "graph is not a weak embedding over the loop graph",
                                   "weak embedding", lv.rotation, lv.loop_certificate, None,
                                   lv.loop_drawing, fact, stats)
        cert = res.certificate
        if not check_certificate(over, cert):
            raise UntanglingError("weak embedding certificate failed its local check")
        stats["graph_over_loops"] = over
    stats["operations"] = _operations(d, fact, stats)
    return UntangleVerdict(True, "", "done", lv.rotation, lv.loop_certificate, cert,
                           lv.loop_drawing, fact, stats)


def untangle_plane(pl: PLDrawing, budget: Optional[int] = None,
                   config: Optional[UntangleConfig] = None) -> UntangleVerdict:
    conv = plane_to_combinatorial(pl)
    verdict = untangle(conv.drawing, budget=budget, config=config)
    verdict.stats.update(conv.stats)
    return verdict
