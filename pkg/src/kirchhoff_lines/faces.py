"""Face decomposition of a drawing and the face potential.

The box sides together with the drawing segments cut the unit square
into rectilinear faces.  Faces are traced with the usual half-edge
walk: arriving at a vertex, leave along the first incident direction
strictly clockwise from the reversed arrival direction.  Interior
faces come out counterclockwise (positive shoelace area); the single
clockwise cycle through the box corners is the outer face.  Closed
loops (possible when both turns and pair creation are active) produce
extra clockwise cycles, which are holes of whichever face surrounds
them.

The potential assigns a number to every face, zero at the face
touching the bottom-left corner: crossing a horizontal line of
intensity ``s`` northward adds ``s``, crossing a vertical line of
intensity ``s`` eastward subtracts ``s``.  Flow conservation at the
nodes makes the assignment path-independent; ``potentials`` exposes
the maximal disagreement it saw so callers can verify that.
"""

from collections import deque
from dataclasses import dataclass

from .drawing import Drawing
from .errors import MalformedDrawingError, ParameterError, PotentialError

_REV = {"N": "S", "S": "N", "E": "W", "W": "E"}
_CW_NEXT = {"N": "E", "E": "S", "S": "W", "W": "N"}
_CORNERS = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))


@dataclass(frozen=True)
class Face:
    """One bounded face: outer cycle, holes, and boundary statistics."""

    cycle: tuple[tuple[float, float], ...]
    holes: tuple[tuple[tuple[float, float], ...], ...]
    area: float
    vertex_count: int
    corner_count: int
    touches_ne: bool


class FaceSet:
    """Faces of a drawing plus the tables the potential walk needs."""

    def __init__(self, drawing: Drawing):
        self.drawing = drawing
        self._build_edges(drawing)
        self._trace_cycles()
        self._assemble_faces()

    # -- planar subdivision -------------------------------------------

    def _build_edges(self, drawing: Drawing) -> None:
        # edge i owns half-edges 2i (E or N travel) and 2i+1 (reverse);
        # the first len(segments) edges are the drawing segments
        tails: list[tuple[float, float]] = []
        heads: list[tuple[float, float]] = []
        dirs: list[str] = []
        out: dict[tuple[float, float], dict[str, int]] = {}

        def add_edge(p: tuple[float, float], q: tuple[float, float], d: str) -> None:
            h = len(dirs)
            tails.extend((p, q))
            heads.extend((q, p))
            dirs.extend((d, _REV[d]))
            for vertex, direction, idx in ((p, d, h), (q, _REV[d], h + 1)):
                slot = out.setdefault(vertex, {})
                if direction in slot:
                    raise MalformedDrawingError(
                        f"two edges leave ({vertex[0]:g}, {vertex[1]:g}) heading {direction}"
                    )
                slot[direction] = idx

        for seg in drawing.segments:
            if seg.orient == "v":
                add_edge((seg.x0, seg.y0), (seg.x0, seg.y1), "N")
            else:
                add_edge((seg.x0, seg.y0), (seg.x1, seg.y0), "E")

        bottom = sorted(n.x for n in drawing.nodes if n.y == 0.0)
        top = sorted(n.x for n in drawing.nodes if n.y == 1.0)
        left = sorted(n.y for n in drawing.nodes if n.x == 0.0)
        right = sorted(n.y for n in drawing.nodes if n.x == 1.0)
        for level, stops in ((0.0, bottom), (1.0, top)):
            xs = [0.0, *stops, 1.0]
            for x0, x1 in zip(xs, xs[1:]):
                add_edge((x0, level), (x1, level), "E")
        for level, stops in ((0.0, left), (1.0, right)):
            ys = [0.0, *stops, 1.0]
            for y0, y1 in zip(ys, ys[1:]):
                add_edge((level, y0), (level, y1), "N")

        self._tails = tails
        self._heads = heads
        self._dirs = dirs
        self._out = out

    def _next_halfedge(self, h: int) -> int:
        slot = self._out[self._heads[h]]
        d = _REV[self._dirs[h]]
        for _ in range(4):
            d = _CW_NEXT[d]
            if d in slot:
                return slot[d]
        raise MalformedDrawingError("isolated vertex in face walk")

    def _trace_cycles(self) -> None:
        n = len(self._dirs)
        cycle_of = [-1] * n
        cycles: list[list[int]] = []
        for start in range(n):
            if cycle_of[start] >= 0:
                continue
            idx = len(cycles)
            walk = []
            h = start
            while True:
                cycle_of[h] = idx
                walk.append(h)
                h = self._next_halfedge(h)
                if h == start:
                    break
                if cycle_of[h] >= 0:
                    raise MalformedDrawingError("face walk re-entered a traced cycle")
            cycles.append(walk)
        self._cycle_of_halfedge = cycle_of
        self._cycles = cycles

    # -- cycles to faces ------------------------------------------------

    def _assemble_faces(self) -> None:
        areas = []
        verts = []
        for walk in self._cycles:
            pts = [self._tails[h] for h in walk]
            areas.append(_shoelace(pts))
            verts.append(pts)

        positive = [i for i, a in enumerate(areas) if a > 0.0]
        negative = [i for i, a in enumerate(areas) if a <= 0.0]
        outer = [i for i in negative if (0.0, 0.0) in verts[i]]
        if len(outer) != 1:
            raise MalformedDrawingError("expected exactly one outer cycle")
        holes = [i for i in negative if i != outer[0]]

        # a hole's corner lies strictly inside the surrounding face, so
        # containment against outer cycles picks it up; nesting resolves
        # to the smallest containing face
        hole_host: dict[int, list[int]] = {i: [] for i in positive}
        for i in holes:
            pt = verts[i][0]
            hole_pts = set(verts[i])
            best = None
            for j in positive:
                # the host never touches the loop, so cycles sharing a
                # vertex (the loop's own inside) are not candidates
                if hole_pts & set(verts[j]):
                    continue
                if _contains(verts[j], pt):
                    if best is None or areas[j] < areas[best]:
                        best = j
            if best is None:
                raise MalformedDrawingError("hole cycle lies in no face")
            hole_host[best].append(i)

        face_of_cycle = {outer[0]: -1}
        faces = []
        for rank, j in enumerate(positive):
            face_of_cycle[j] = rank
            area = areas[j]
            vertex_count = len(verts[j])
            corner_count = _direction_changes([self._dirs[h] for h in self._cycles[j]])
            hole_cycles = []
            for i in hole_host[j]:
                face_of_cycle[i] = rank
                area += areas[i]
                vertex_count += len(verts[i])
                corner_count += _direction_changes([self._dirs[h] for h in self._cycles[i]])
                hole_cycles.append(tuple(verts[i]))
            faces.append(
                Face(
                    cycle=tuple(verts[j]),
                    holes=tuple(hole_cycles),
                    area=area,
                    vertex_count=vertex_count,
                    corner_count=corner_count,
                    touches_ne=any(x == 1.0 or y == 1.0 for x, y in verts[j]),
                )
            )

        base = [face_of_cycle[j] for j in positive if (0.0, 0.0) in verts[j]]
        if len(base) != 1:
            raise MalformedDrawingError("expected one face at the bottom-left corner")
        self.faces = tuple(faces)
        self.base_index = base[0]
        self._face_of_cycle = face_of_cycle

    def face_of_halfedge(self, h: int) -> int:
        """Face index for half-edge ``h``; -1 means the outer face."""
        return self._face_of_cycle[self._cycle_of_halfedge[h]]


def _shoelace(pts) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(pts, [*pts[1:], pts[0]]):
        total += x0 * y1 - x1 * y0
    return 0.5 * total


def _direction_changes(dirs) -> int:
    return sum(d != e for d, e in zip(dirs, [*dirs[1:], dirs[0]]))


def _contains(cycle, pt) -> bool:
    # even-odd ray cast east; vertical edges only, half-open in y
    x, y = pt
    inside = False
    for (x0, y0), (x1, y1) in zip(cycle, [*cycle[1:], cycle[0]]):
        if x0 != x1:
            continue
        ylo, yhi = (y0, y1) if y0 < y1 else (y1, y0)
        if x0 > x and ylo <= y < yhi:
            inside = not inside
    return inside


def build_faces(drawing: Drawing) -> FaceSet:
    """Decompose a drawing into faces."""
    return FaceSet(drawing)


def potentials(
    face_set: FaceSet, order: str = "breadth", tol: float = 1e-9
) -> tuple[tuple[float, ...], float]:
    """Potential value per face plus the largest closure defect seen.

    ``order`` chooses the traversal ("breadth" or "depth"); flow
    conservation makes the result independent of it, which is exactly
    what callers cross-check.  Raises when a face stays unreachable or
    the defect exceeds ``tol``.
    """
    if order not in ("breadth", "depth"):
        raise ParameterError(f"unknown traversal order {order!r}")
    drawing = face_set.drawing
    adjacency: dict[int, list[tuple[int, float]]] = {
        i: [] for i in range(len(face_set.faces))
    }
    for i, seg in enumerate(drawing.segments):
        fwd = face_set.face_of_halfedge(2 * i)
        bwd = face_set.face_of_halfedge(2 * i + 1)
        if seg.orient == "h":
            # forward travel is east, so its face sits to the north
            south, north = bwd, fwd
            adjacency[south].append((north, +seg.s))
            adjacency[north].append((south, -seg.s))
        else:
            # forward travel is north, so its face sits to the west
            west, east = fwd, bwd
            adjacency[west].append((east, -seg.s))
            adjacency[east].append((west, +seg.s))

    values: list[float | None] = [None] * len(face_set.faces)
    values[face_set.base_index] = 0.0
    frontier = deque([face_set.base_index])
    defect = 0.0
    while frontier:
        cur = frontier.popleft() if order == "breadth" else frontier.pop()
        base = values[cur]
        neighbours = adjacency[cur]
        if order == "depth":
            neighbours = list(reversed(neighbours))
        for nxt, delta in neighbours:
            proposed = base + delta
            if values[nxt] is None:
                values[nxt] = proposed
                frontier.append(nxt)
            else:
                defect = max(defect, abs(values[nxt] - proposed))
    if any(v is None for v in values):
        raise PotentialError("a face was unreachable in the potential walk")
    if defect > tol:
        raise PotentialError(f"potential closure defect {defect:g} exceeds {tol:g}")
    return tuple(values), defect


def transect(drawing: Drawing, *, y: float | None = None, x: float | None = None) -> list[float]:
    """Potential values met along one straight cut across the box.

    Exactly one of ``y`` (west-to-east cut) or ``x`` (south-to-north
    cut) must be given, strictly inside and clear of any parallel
    segment.  Values are absolute, anchored at the bottom-left face.
    """
    if (y is None) == (x is None):
        raise ParameterError("give exactly one of x or y")
    if y is not None:
        if not 0.0 < y < 1.0:
            raise ParameterError("transect height must be strictly inside the box")
        if any(seg.orient == "h" and seg.y0 == y for seg in drawing.segments):
            raise ParameterError("transect height collides with a horizontal line")
        start = sum(s for yy, s in _side_entries(drawing, "left") if yy < y)
        crossers = sorted(
            (seg.x0, seg.s)
            for seg in drawing.segments
            if seg.orient == "v" and seg.y0 < y < seg.y1
        )
        steps = [-s for _, s in crossers]
    else:
        if not 0.0 < x < 1.0:
            raise ParameterError("transect abscissa must be strictly inside the box")
        if any(seg.orient == "v" and seg.x0 == x for seg in drawing.segments):
            raise ParameterError("transect abscissa collides with a vertical line")
        start = -sum(s for xx, s in _side_entries(drawing, "bottom") if xx < x)
        crossers = sorted(
            (seg.y0, seg.s)
            for seg in drawing.segments
            if seg.orient == "h" and seg.x0 < x < seg.x1
        )
        steps = [s for _, s in crossers]
    values = [start]
    for step in steps:
        values.append(values[-1] + step)
    return values


def _side_entries(drawing: Drawing, side: str):
    if side == "left":
        return [
            (seg.y0, seg.s)
            for seg in drawing.segments
            if seg.orient == "h" and seg.x0 == 0.0
        ]
    return [
        (seg.x0, seg.s)
        for seg in drawing.segments
        if seg.orient == "v" and seg.y0 == 0.0
    ]
