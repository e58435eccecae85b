"""Drawings: weighted axis-parallel segments and their meeting nodes.

Coordinates are normalized to the unit square and snapped to a dyadic
grid of step 2**-48.  On that grid the reflection ``u -> 1 - u`` is an
exact float operation, so rotating a drawing by a half turn is a true
involution and preserves every length bit for bit.  Physical positions
are recovered by scaling with the box dimensions ``a`` and ``b``.

Nodes are not stored by the simulator; they are reconstructed from
segment endpoints.  The thirteen possible adjacency patterns are in
bijection with the node kinds, so classification needs no extra data:

===== ============== =========================================
kind  adjacency      meaning
===== ============== =========================================
VE    N              vertical enters through the bottom side
VS    S              vertical exits through the top side
HE    E              horizontal enters through the left side
HS    W              horizontal exits through the right side
HB    S N E          vertical sheds a horizontal line
VB    W N E          horizontal sheds a vertical line
HT    S E            vertical turns east
VT    W N            horizontal turns north
HA    W S N          horizontal absorbed by the vertical
VA    W S E          vertical absorbed by the horizontal
CC    W S N E        crossing, both lines continue
OB    N E            pair created in the bulk
OA    S W            pair annihilated in the bulk
===== ============== =========================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import MalformedDrawingError

__all__ = [
    "GRID",
    "snap",
    "snap_interior",
    "Segment",
    "Node",
    "Drawing",
    "NODE_KINDS",
    "classify_nodes",
    "census",
    "boundary",
    "rotate180",
    "kirchhoff_defects",
    "balance_identities",
    "serialize",
    "deserialize",
]

GRID = 2.0 ** -48
_SCALE = 2.0 ** 48


def snap(u: float) -> float:
    """Round to the dyadic grid; exact for inputs already on it."""
    return round(u * _SCALE) * GRID


def snap_interior(u: float) -> float:
    """Snap and keep strictly inside (0, 1)."""
    v = snap(u)
    if v <= 0.0:
        return GRID
    if v >= 1.0:
        return 1.0 - GRID
    return v


NODE_KINDS = (
    "VE", "VS", "HE", "HS", "HB", "VB", "HT", "VT", "HA", "VA", "CC", "OB", "OA",
)

_PATTERN_TO_KIND = {
    frozenset({"N"}): "VE",
    frozenset({"S"}): "VS",
    frozenset({"E"}): "HE",
    frozenset({"W"}): "HS",
    frozenset({"S", "N", "E"}): "HB",
    frozenset({"W", "N", "E"}): "VB",
    frozenset({"S", "E"}): "HT",
    frozenset({"W", "N"}): "VT",
    frozenset({"W", "S", "N"}): "HA",
    frozenset({"W", "S", "E"}): "VA",
    frozenset({"W", "S", "N", "E"}): "CC",
    frozenset({"N", "E"}): "OB",
    frozenset({"S", "W"}): "OA",
}

_ROTATE_KIND = {
    "VE": "VS", "VS": "VE", "HE": "HS", "HS": "HE",
    "HB": "HA", "HA": "HB", "VB": "VA", "VA": "VB",
    "HT": "VT", "VT": "HT", "CC": "CC", "OB": "OA", "OA": "OB",
}

_ROTATE_DIR = {"N": "S", "S": "N", "E": "W", "W": "E"}


@dataclass
class Segment:
    """One maximal straight piece between two nodes.

    Vertical: ``x0 == x1`` and ``y0 < y1``.  Horizontal: ``y0 == y1``
    and ``x0 < x1``.  ``s`` is the carried intensity.
    """

    orient: str  # "v" | "h"
    x0: float
    y0: float
    x1: float
    y1: float
    s: float


@dataclass
class Node:
    x: float
    y: float
    kind: str
    adj: dict[str, int]  # direction -> segment index


@dataclass
class Drawing:
    a: float
    b: float
    kind: str  # "continuous" | "atomic"
    step: Fraction | None
    seed: int
    replica: int
    digest: str
    segments: list[Segment]
    nodes: list[Node] = field(default_factory=list)
    diagnostics: dict[str, int] = field(default_factory=dict)


def classify_nodes(segments: list[Segment]) -> list[Node]:
    """Group segment endpoints by position and read off the node kinds.

    The direction letter names where the segment lies relative to the
    node: a vertical segment is N of its lower endpoint and S of its
    upper one.  Raises when two segments leave a point the same way or
    when a pattern matches no kind.
    """
    adj_at: dict[tuple[float, float], dict[str, int]] = {}
    for i, seg in enumerate(segments):
        if seg.orient == "v":
            ends = ((seg.x0, seg.y0, "N"), (seg.x0, seg.y1, "S"))
        elif seg.orient == "h":
            ends = ((seg.x0, seg.y0, "E"), (seg.x1, seg.y0, "W"))
        else:
            raise MalformedDrawingError(f"segment {i}: bad orientation {seg.orient!r}")
        for x, y, d in ends:
            slot = adj_at.setdefault((x, y), {})
            if d in slot:
                raise MalformedDrawingError(
                    f"segments {slot[d]} and {i} both lie {d} of ({x!r}, {y!r})"
                )
            slot[d] = i
    nodes = []
    for (x, y), adj in sorted(adj_at.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        kind = _PATTERN_TO_KIND.get(frozenset(adj))
        if kind is None:
            raise MalformedDrawingError(
                f"endpoint pattern {sorted(adj)} at ({x!r}, {y!r}) matches no node kind"
            )
        if kind == "VE" and y != 0.0:
            raise MalformedDrawingError(f"dangling vertical start at ({x!r}, {y!r})")
        if kind == "VS" and y != 1.0:
            raise MalformedDrawingError(f"dangling vertical end at ({x!r}, {y!r})")
        if kind == "HE" and x != 0.0:
            raise MalformedDrawingError(f"dangling horizontal start at ({x!r}, {y!r})")
        if kind == "HS" and x != 1.0:
            raise MalformedDrawingError(f"dangling horizontal end at ({x!r}, {y!r})")
        nodes.append(Node(x=x, y=y, kind=kind, adj=adj))
    return nodes


def census(drawing: Drawing) -> dict[str, int]:
    counts = {k: 0 for k in NODE_KINDS}
    for node in drawing.nodes:
        counts[node.kind] += 1
    return counts


def boundary(drawing: Drawing, side: str) -> list[tuple[float, float]]:
    """Boundary points on one side as (normalized coordinate, intensity).

    ``side`` is one of bottom/top/left/right; the coordinate is x for
    the horizontal sides and y for the vertical ones, sorted ascending.
    """
    kind_dir = {"bottom": ("VE", "N"), "top": ("VS", "S"),
                "left": ("HE", "E"), "right": ("HS", "W")}
    try:
        want, d = kind_dir[side]
    except KeyError:
        raise MalformedDrawingError(f"unknown side {side!r}") from None
    pts = []
    for node in drawing.nodes:
        if node.kind == want:
            coord = node.x if side in ("bottom", "top") else node.y
            pts.append((coord, drawing.segments[node.adj[d]].s))
    pts.sort()
    return pts


def rotate180(drawing: Drawing) -> Drawing:
    """Half-turn image: exact on the dyadic grid, kinds swap in pairs."""
    segs = []
    for seg in drawing.segments:
        segs.append(
            Segment(
                orient=seg.orient,
                x0=1.0 - seg.x1,
                y0=1.0 - seg.y1,
                x1=1.0 - seg.x0,
                y1=1.0 - seg.y0,
                s=seg.s,
            )
        )
    nodes = []
    for node in drawing.nodes:
        nodes.append(
            Node(
                x=1.0 - node.x,
                y=1.0 - node.y,
                kind=_ROTATE_KIND[node.kind],
                adj={_ROTATE_DIR[d]: i for d, i in node.adj.items()},
            )
        )
    nodes.sort(key=lambda n: (n.y, n.x))
    return Drawing(
        a=drawing.a,
        b=drawing.b,
        kind=drawing.kind,
        step=drawing.step,
        seed=drawing.seed,
        replica=drawing.replica,
        digest=drawing.digest,
        segments=segs,
        nodes=nodes,
        diagnostics=dict(drawing.diagnostics),
    )


def kirchhoff_defects(drawing: Drawing, tol: float = 1e-9) -> list[int]:
    """Indices of interior nodes where incoming and outgoing sums differ.

    Incoming means from the south and west, outgoing to the north and
    east; boundary entry and exit nodes are sources and sinks, so they
    are skipped.  Pass ``tol=0.0`` for integer-lattice models.
    """
    bad = []
    for i, node in enumerate(drawing.nodes):
        if node.kind in ("VE", "VS", "HE", "HS"):
            continue
        into = sum(drawing.segments[j].s for d, j in node.adj.items() if d in ("S", "W"))
        out = sum(drawing.segments[j].s for d, j in node.adj.items() if d in ("N", "E"))
        if abs(into - out) > tol:
            bad.append(i)
    return bad


def balance_identities(drawing: Drawing) -> dict[str, tuple[int, int]]:
    """Exact counting identities every drawing must satisfy.

    Each maximal vertical path is created exactly once (entry, shed,
    turn, or bulk birth) and destroyed exactly once (exit, absorption,
    turn, or bulk death); same for horizontal paths.  The degree
    identity says every segment has exactly two endpoints.
    """
    c = census(drawing)
    return {
        "vertical": (c["VE"] + c["VB"] + c["VT"] + c["OB"],
                     c["VS"] + c["VA"] + c["HT"] + c["OA"]),
        "horizontal": (c["HE"] + c["HB"] + c["HT"] + c["OB"],
                       c["HS"] + c["HA"] + c["VT"] + c["OA"]),
        "degree": (2 * len(drawing.segments),
                   sum(len(n.adj) for n in drawing.nodes)),
    }


# ---------------------------------------------------------------------------
# serialization

_FORMAT = "klines-drawing 1"


def serialize(drawing: Drawing) -> str:
    """Plain-text form; floats use repr so the round trip is bit exact.

    Coordinates are stored normalized to the unit square; multiply by
    a and b from the header to recover physical positions.
    """
    step = "-" if drawing.step is None else str(drawing.step)
    out = [
        _FORMAT,
        f"a={drawing.a!r} b={drawing.b!r} kind={drawing.kind} step={step} "
        f"seed={drawing.seed} replica={drawing.replica} digest={drawing.digest}",
        "diag " + " ".join(f"{k}={v}" for k, v in sorted(drawing.diagnostics.items())),
        f"segments {len(drawing.segments)}",
    ]
    for seg in drawing.segments:
        if seg.orient == "v":
            out.append(f"v {seg.x0!r} {seg.y0!r} {seg.y1!r} {seg.s!r}")
        else:
            out.append(f"h {seg.y0!r} {seg.x0!r} {seg.x1!r} {seg.s!r}")
    out.append(f"nodes {len(drawing.nodes)}")
    for node in drawing.nodes:
        adj = " ".join(f"{d}={i}" for d, i in sorted(node.adj.items()))
        out.append(f"{node.kind} {node.x!r} {node.y!r} {adj}")
    out.append("end")
    return "\n".join(out) + "\n"


def _parse_kv(text: str, lineno: int) -> dict[str, str]:
    out = {}
    for tok in text.split():
        if "=" not in tok:
            raise MalformedDrawingError(f"line {lineno}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def deserialize(text: str) -> Drawing:
    """Parse and fully re-validate a serialized drawing.

    Nodes listed in the file must agree exactly with the ones derived
    from the segment endpoints, and interior nodes must conserve
    intensity to within 1e-9.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != _FORMAT:
        raise MalformedDrawingError(f"missing {_FORMAT!r} header")
    try:
        head = _parse_kv(lines[1], 2)
        a = float(head["a"])
        b = float(head["b"])
        kind = head["kind"]
        step = None if head["step"] == "-" else Fraction(head["step"])
        seed = int(head["seed"])
        replica = int(head["replica"])
        digest = head["digest"]
    except (KeyError, ValueError, IndexError) as exc:
        raise MalformedDrawingError(f"bad header: {exc}") from None
    if kind not in ("continuous", "atomic"):
        raise MalformedDrawingError(f"bad measure kind {kind!r}")
    if not lines[2].startswith("diag"):
        raise MalformedDrawingError("line 3: expected the diag line")
    diagnostics = {k: int(v) for k, v in _parse_kv(lines[2][4:], 3).items()}

    idx = 3
    if idx >= len(lines) or not lines[idx].startswith("segments "):
        raise MalformedDrawingError("missing segments section")
    n_seg = int(lines[idx].split()[1])
    idx += 1
    segments = []
    for i in range(n_seg):
        parts = lines[idx + i].split()
        if len(parts) != 5 or parts[0] not in ("v", "h"):
            raise MalformedDrawingError(f"line {idx + i + 1}: bad segment record")
        try:
            vals = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise MalformedDrawingError(f"line {idx + i + 1}: {exc}") from None
        if parts[0] == "v":
            x, y0, y1, s = vals
            if not y0 < y1:
                raise MalformedDrawingError(f"line {idx + i + 1}: vertical needs y0 < y1")
            segments.append(Segment("v", x, y0, x, y1, s))
        else:
            y, x0, x1, s = vals
            if not x0 < x1:
                raise MalformedDrawingError(f"line {idx + i + 1}: horizontal needs x0 < x1")
            segments.append(Segment("h", x0, y, x1, y, s))
    idx += n_seg
    if idx >= len(lines) or not lines[idx].startswith("nodes "):
        raise MalformedDrawingError("missing nodes section")
    n_node = int(lines[idx].split()[1])
    idx += 1
    listed = []
    for i in range(n_node):
        parts = lines[idx + i].split()
        if len(parts) < 3 or parts[0] not in NODE_KINDS:
            raise MalformedDrawingError(f"line {idx + i + 1}: bad node record")
        adj = {}
        for tok in parts[3:]:
            d, _, j = tok.partition("=")
            if d not in ("N", "S", "E", "W"):
                raise MalformedDrawingError(f"line {idx + i + 1}: bad direction {d!r}")
            adj[d] = int(j)
            if not 0 <= adj[d] < n_seg:
                raise MalformedDrawingError(f"line {idx + i + 1}: segment index out of range")
        listed.append(Node(float(parts[1]), float(parts[2]), parts[0], adj))
    idx += n_node
    if idx >= len(lines) or lines[idx].strip() != "end":
        raise MalformedDrawingError("missing end marker")

    drawing = Drawing(
        a=a, b=b, kind=kind, step=step, seed=seed, replica=replica,
        digest=digest, segments=segments, nodes=listed, diagnostics=diagnostics,
    )
    derived = classify_nodes(segments)
    if len(derived) != len(listed):
        raise MalformedDrawingError(
            f"file lists {len(listed)} nodes but the segments define {len(derived)}"
        )
    for mine, theirs in zip(derived, sorted(listed, key=lambda n: (n.y, n.x))):
        if (mine.x, mine.y, mine.kind, mine.adj) != (theirs.x, theirs.y, theirs.kind, theirs.adj):
            raise MalformedDrawingError(
                f"node at ({theirs.x!r}, {theirs.y!r}) disagrees with the geometry"
            )
    bad = kirchhoff_defects(drawing, tol=1e-9)
    if bad:
        node = drawing.nodes[bad[0]]
        raise MalformedDrawingError(
            f"{len(bad)} nodes break conservation, first at ({node.x!r}, {node.y!r})"
        )
    return drawing
