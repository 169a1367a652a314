"""Text and JSON formats for maps, triangulations, drawings, walks and PL input.

Text formats are line oriented; ``#`` starts a comment.  Parsers raise
:class:`ParseError` with the 1-based line and column of the offending token.
"""

from __future__ import annotations

import json
import re
from typing import Optional

from .errors import ParseError, UntanglingError
from .reducing_tri import BLUE, RED, ReducingTriangulation, validate_reducing
from .schema import SCALE, PLDrawing
from .surface_map import CombinatorialMap, Drawing, build_map

MAP_HEADER = "surface-map v1"
DRAWING_HEADER = "drawing v1"
WALK_HEADER = "walks v1"
PL_HEADER = "pl-drawing v1"

_TOKEN = re.compile(r"[^\s:]+|:")
_DECIMAL = re.compile(r"([+-]?)(\d+)(?:\.(\d{1,9}))?$")
_COLORS = {"red": RED, "blue": BLUE}


class _Line:
    def __init__(self, number: int, text: str):
        self.number = number
        body = text.split("#", 1)[0]
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]

    def error(self, message, k=None):
        col = self.tokens[k][1] if k is not None and k < len(self.tokens) else 1
        return ParseError(message, self.number, col)

    def int_at(self, k, what="integer"):
        if k >= len(self.tokens):
            raise self.error(f"missing {what}", len(self.tokens) - 1)
        tok = self.tokens[k][0]
        try:
            return int(tok)
        except ValueError:
            raise self.error(f"expected {what}, got {tok!r}", k) from None

    def ints_from(self, k):
        return [self.int_at(i) for i in range(k, len(self.tokens))]

    def expect(self, k, word):
        if k >= len(self.tokens) or self.tokens[k][0] != word:
            raise self.error(f"expected {word!r}", k)


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = _Line(i, raw)
        if line.tokens:
            yield line


def _header(lines, header, required=True):
    """Strip the header line if present."""
    if lines and " ".join(t for t, _ in lines[0].tokens) == header:
        return lines[1:]
    if required:
        where = lines[0] if lines else _Line(1, "")
        raise where.error(f"expected header {header!r}", 0)
    return lines


# ---------------------------------------------------------------------------
# maps and triangulations


def _parse_map_lines(lines):
    rotations: dict[int, list[int]] = {}
    twins, boundary, colors, canonical = [], [], {}, {}
    for line in lines:
        kind = line.tokens[0][0]
        if kind == "vertex":
            v = line.int_at(1, "vertex index")
            line.expect(2, ":")
            if v in rotations:
                raise line.error(f"vertex {v} listed twice", 1)
            rotations[v] = line.ints_from(3)
        elif kind == "twin":
            twins.append((line.int_at(1, "dart"), line.int_at(2, "dart")))
        elif kind == "boundary":
            boundary.extend(line.ints_from(1))
        elif kind == "color":
            f = line.int_at(1, "face index")
            line.expect(2, ":")
            if len(line.tokens) < 4 or line.tokens[3][0] not in _COLORS:
                raise line.error("expected red or blue", 3)
            colors[f] = _COLORS[line.tokens[3][0]]
        elif kind == "canonical":
            toks = line.tokens[1:]
            if len(toks) % 2:
                raise line.error("canonical marks come in name/dart pairs", len(line.tokens) - 1)
            for k in range(0, len(toks), 2):
                canonical[toks[k][0]] = line.int_at(k + 2, "dart")
        else:
            raise line.error(f"unknown directive {kind!r}", 0)
    if sorted(rotations) != list(range(len(rotations))):
        raise ParseError("vertices must be numbered 0..n-1", lines[-1].number if lines else 1, 1)
    rot = [rotations[v] for v in range(len(rotations))]
    return rot, twins, boundary, colors, canonical


def _build(rot, twins, boundary, line_no):
    try:
        m = build_map(rot, twins or None)
        if boundary:
            relabel = m.relabel
            m = build_map([[_relabel(m, d) for d in r] for r in rot], boundary=boundary)
            m.relabel = relabel
    except UntanglingError as exc:
        raise ParseError(str(exc), line_no, 1) from exc
    return m


def _relabel(m, d):
    relabel = getattr(m, "relabel", None)
    return relabel[d] if relabel else d


def parse_map(text: str) -> CombinatorialMap:
    if text.lstrip().startswith("{"):
        return map_from_json(json.loads(text))
    lines = _header(list(_lines(text)), MAP_HEADER)
    rot, twins, boundary, colors, canonical = _parse_map_lines(lines)
    if colors or canonical:
        raise ParseError("colour and canonical marks belong in a triangulation file",
                         lines[-1].number, 1)
    return _build(rot, twins, boundary, lines[-1].number if lines else 1)


def parse_triangulation(text: str) -> ReducingTriangulation:
    lines = _header(list(_lines(text)), MAP_HEADER)
    rot, twins, boundary, colors, canonical = _parse_map_lines(lines)
    last = lines[-1].number if lines else 1
    m = _build(rot, twins, boundary, last)
    canonical = {k: _relabel(m, d) for k, d in canonical.items()}
    try:
        return validate_reducing(m, colors or None, canonical)
    except UntanglingError as exc:
        raise ParseError(str(exc), last, 1) from exc


def format_map(m: CombinatorialMap) -> str:
    out = [MAP_HEADER]
    for v, rot in enumerate(m.rotations):
        out.append(f"vertex {v}: " + " ".join(map(str, rot)))
    for f in sorted(m.boundary_faces):
        out.append(f"boundary {f}")
    return "\n".join(out) + "\n"


def format_triangulation(tri: ReducingTriangulation) -> str:
    text = format_map(tri.map).rstrip("\n").split("\n")
    names = {RED: "red", BLUE: "blue"}
    for f, c in enumerate(tri.color):
        text.append(f"color {f}: {names[c]}")
    if tri.canonical:
        text.append("canonical " + " ".join(f"{k} {d}" for k, d in sorted(tri.canonical.items())))
    return "\n".join(text) + "\n"


def map_to_json(m: CombinatorialMap) -> dict:
    return {"format": MAP_HEADER, "rotations": [list(r) for r in m.rotations],
            "boundary": sorted(m.boundary_faces)}


def map_from_json(data: dict) -> CombinatorialMap:
    if data.get("format") != MAP_HEADER:
        raise ParseError(f"expected format {MAP_HEADER!r}", 1, 1)
    try:
        return build_map(data["rotations"], boundary=data.get("boundary", ()))
    except (KeyError, TypeError, UntanglingError) as exc:
        raise ParseError(str(exc), 1, 1) from exc


# ---------------------------------------------------------------------------
# drawings and walks


def _walk_tokens(line, k, host):
    """Darts from token ``k`` on, or ``@w`` for an empty walk at host vertex ``w``."""
    toks = line.tokens[k:]
    if len(toks) == 1 and toks[0][0].startswith("@"):
        try:
            at = int(toks[0][0][1:])
        except ValueError:
            raise line.error("expected @vertex", k) from None
        if host is not None and not 0 <= at < host.n_vertices:
            raise line.error(f"host vertex {at} out of range", k)
        return [], at
    walk = line.ints_from(k)
    if host is not None:
        for i, d in enumerate(walk):
            d = _relabel(host, d)
            if not 0 <= d < host.n_darts:
                raise line.error(f"dart {walk[i]} out of range", k + i)
            walk[i] = d
        for i in range(len(walk) - 1):
            if host.vertex_of[walk[i] ^ 1] != host.vertex_of[walk[i + 1]]:
                raise line.error("walk is not connected", k + i + 1)
    return walk, None


def parse_drawing(text: str, host: CombinatorialMap) -> Drawing:
    lines = _header(list(_lines(text)), DRAWING_HEADER, required=False)
    vimg: dict[int, int] = {}
    edges, images = [], []
    for line in lines:
        kind = line.tokens[0][0]
        if kind == "gvertex":
            u = line.int_at(1, "vertex")
            line.expect(2, "->")
            k = 4 if len(line.tokens) > 3 and line.tokens[3][0] == "hvertex" else 3
            hv = line.int_at(k, "host vertex")
            if not 0 <= hv < host.n_vertices:
                raise line.error(f"host vertex {hv} out of range", k)
            if u in vimg:
                raise line.error(f"vertex {u} listed twice", 1)
            vimg[u] = hv
        elif kind == "gedge":
            u, v = line.int_at(1, "vertex"), line.int_at(2, "vertex")
            line.expect(3, ":")
            walk, at = _walk_tokens(line, 4, host)
            for z, k in ((u, 1), (v, 2)):
                if z not in vimg:
                    raise line.error(f"vertex {z} used before its gvertex line", k)
            start = host.vertex_of[walk[0]] if walk else at
            end = host.vertex_of[walk[-1] ^ 1] if walk else at
            if start is None:
                raise line.error("empty walk needs @vertex", 4)
            if start != vimg[u] or end != vimg[v]:
                raise line.error("walk does not join the images of its endpoints", 4)
            edges.append((u, v))
            images.append(walk)
        else:
            raise line.error(f"unknown directive {kind!r}", 0)
    if sorted(vimg) != list(range(len(vimg))):
        raise ParseError("graph vertices must be numbered 0..n-1", 1, 1)
    try:
        return Drawing(host, len(vimg), edges, [vimg[u] for u in range(len(vimg))], images)
    except UntanglingError as exc:
        raise ParseError(str(exc), lines[-1].number if lines else 1, 1) from exc


def format_drawing(d: Drawing) -> str:
    out = [DRAWING_HEADER]
    for u, hv in enumerate(d.vertex_image):
        out.append(f"gvertex {u} -> {hv}")
    for (u, v), walk in zip(d.edges, d.edge_image):
        body = " ".join(map(str, walk)) if walk else f"@{d.vertex_image[u]}"
        out.append(f"gedge {u} {v}: {body}")
    return "\n".join(out) + "\n"


def drawing_to_json(d: Drawing) -> dict:
    return {"format": DRAWING_HEADER, "vertex_image": list(d.vertex_image),
            "edges": [list(e) for e in d.edges], "edge_image": [list(w) for w in d.edge_image]}


def parse_walks(text: str, host: Optional[CombinatorialMap] = None) -> list[tuple[list[int], Optional[int]]]:
    """``walk: d0 d1 ...`` lines; each yields ``(darts, vertex)`` with vertex set for ``@w``."""
    out = []
    for line in _header(list(_lines(text)), WALK_HEADER, required=False):
        if line.tokens[0][0] != "walk":
            raise line.error(f"unknown directive {line.tokens[0][0]!r}", 0)
        line.expect(1, ":")
        out.append(_walk_tokens(line, 2, host))
    return out


def format_walk(walk, at: Optional[int] = None) -> str:
    return "walk: " + (" ".join(map(str, walk)) if walk else f"@{at if at is not None else 0}")


def format_walks(walks) -> str:
    return WALK_HEADER + "\n" + "".join(format_walk(w, at) + "\n" for w, at in walks)


# ---------------------------------------------------------------------------
# piecewise-linear plane drawings


def parse_decimal(token: str) -> int:
    """Exact fixed-point value of a decimal with at most 9 fractional digits."""
    m = _DECIMAL.match(token)
    if not m:
        raise ValueError(token)
    sign, whole, frac = m.groups()
    value = int(whole) * SCALE + int((frac or "").ljust(9, "0"))
    return -value if sign == "-" else value


def format_decimal(value: int) -> str:
    sign = "-" if value < 0 else ""
    whole, frac = divmod(abs(value), SCALE)
    tail = f"{frac:09d}".rstrip("0")
    return f"{sign}{whole}.{tail}" if tail else f"{sign}{whole}"


def _point(line, k):
    pts = []
    for i in (k, k + 1):
        if i >= len(line.tokens):
            raise line.error("missing coordinate", len(line.tokens) - 1)
        try:
            pts.append(parse_decimal(line.tokens[i][0]))
        except ValueError:
            raise line.error(f"bad decimal {line.tokens[i][0]!r}", i) from None
    return tuple(pts)


def parse_pl(text: str) -> PLDrawing:
    """Obstacles, vertices and polylines.

    Polyline coordinates may list the bends only or the full path including
    both endpoints; the endpoints are added when missing.
    """
    obstacles, points, ids, edges, lines_out = [], [], [], [], []
    index: dict[str, int] = {}
    for line in _header(list(_lines(text)), PL_HEADER, required=False):
        kind = line.tokens[0][0]
        if kind == "obstacle":
            obstacles.append(_point(line, 1))
        elif kind == "gvertex":
            if len(line.tokens) < 2:
                raise line.error("missing vertex id", 0)
            name = line.tokens[1][0]
            if name in index:
                raise line.error(f"vertex {name} listed twice", 1)
            index[name] = len(points)
            ids.append(name)
            points.append(_point(line, 2))
        elif kind == "gedge":
            ends = []
            for k in (1, 2):
                if k >= len(line.tokens) or line.tokens[k][0] not in index:
                    raise line.error("unknown vertex", k)
                ends.append(index[line.tokens[k][0]])
            line.expect(3, ":")
            if (len(line.tokens) - 4) % 2:
                raise line.error("odd number of coordinates", len(line.tokens) - 1)
            path = [_point(line, k) for k in range(4, len(line.tokens), 2)]
            a, b = points[ends[0]], points[ends[1]]
            if not path or path[0] != a:
                path.insert(0, a)
            if len(path) == 1 or path[-1] != b:
                path.append(b)
            edges.append(tuple(ends))
            lines_out.append(path)
        else:
            raise line.error(f"unknown directive {kind!r}", 0)
    pl = PLDrawing(obstacles, points, edges, lines_out, ids)
    pl.validate()
    return pl


def format_pl(pl: PLDrawing) -> str:
    out = [PL_HEADER]
    for x, y in pl.obstacles:
        out.append(f"obstacle {format_decimal(x)} {format_decimal(y)}")
    names = pl.vertex_ids or [str(i) for i in range(len(pl.points))]
    for name, (x, y) in zip(names, pl.points):
        out.append(f"gvertex {name} {format_decimal(x)} {format_decimal(y)}")
    for (u, v), path in zip(pl.edges, pl.polylines):
        coords = " ".join(f"{format_decimal(x)} {format_decimal(y)}" for x, y in path)
        out.append(f"gedge {names[u]} {names[v]}: {coords}")
    return "\n".join(out) + "\n"
