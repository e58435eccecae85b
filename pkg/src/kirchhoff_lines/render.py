"""Hand-rolled SVG pictures of drawings.

Two modes: ``lines`` draws every segment with stroke width scaled by
intensity magnitude (red positive, blue negative, gray zero); and
``potential`` fills each face with a diverging color for its potential
value, holes punched out with the even-odd rule, segments drawn thin
on top.
"""

from .drawing import Drawing
from .errors import ParameterError
from .faces import build_faces, potentials

_MARGIN = 24.0
_POS = (198, 40, 40)
_NEG = (21, 101, 192)


def _blend(rgb: tuple[int, int, int], t: float) -> str:
    # t=0 gives white, t=1 the full color
    r = round(255 + (rgb[0] - 255) * t)
    g = round(255 + (rgb[1] - 255) * t)
    b = round(255 + (rgb[2] - 255) * t)
    return f"rgb({r},{g},{b})"


def _stroke(s: float) -> str:
    if s > 0:
        return "#c62828"
    if s < 0:
        return "#1565c0"
    return "#757575"


def render_svg(drawing: Drawing, mode: str = "lines", width: int = 640) -> str:
    """Render one drawing as an SVG document string."""
    if mode not in ("lines", "potential"):
        raise ParameterError(f"unknown render mode {mode!r}")
    if width < 80:
        raise ParameterError("width below 80 pixels is unreadable")
    inner = width - 2.0 * _MARGIN
    ratio = drawing.b / drawing.a
    inner_h = inner * min(max(ratio, 0.2), 5.0)
    height = inner_h + 2.0 * _MARGIN

    def px(u: float) -> float:
        return _MARGIN + u * inner

    def py(v: float) -> float:
        return _MARGIN + (1.0 - v) * inner_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}"'
        f' height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>',
    ]

    if mode == "potential":
        face_set = build_faces(drawing)
        values, _ = potentials(face_set)
        vmax = max((abs(v) for v in values), default=0.0) or 1.0
        for face, value in zip(face_set.faces, values):
            rings = [face.cycle, *face.holes]
            d = []
            for ring in rings:
                step = [f"M {px(ring[0][0]):.2f} {py(ring[0][1]):.2f}"]
                step += [f"L {px(x):.2f} {py(y):.2f}" for x, y in ring[1:]]
                step.append("Z")
                d.append(" ".join(step))
            color = _blend(_POS if value >= 0 else _NEG, abs(value) / vmax)
            parts.append(
                f'<path d="{" ".join(d)}" fill="{color}" fill-rule="evenodd"'
                ' stroke="none"/>'
            )

    smax = max((abs(seg.s) for seg in drawing.segments), default=0.0)
    for seg in drawing.segments:
        if mode == "lines":
            w = 0.8 + (4.2 * abs(seg.s) / smax if smax > 0 else 0.0)
            color = _stroke(seg.s)
        else:
            w = 0.8
            color = "#333333"
        parts.append(
            f'<line x1="{px(seg.x0):.2f}" y1="{py(seg.y0):.2f}"'
            f' x2="{px(seg.x1):.2f}" y2="{py(seg.y1):.2f}"'
            f' stroke="{color}" stroke-width="{w:.2f}" stroke-linecap="round"/>'
        )

    parts.append(
        f'<rect x="{px(0.0):.2f}" y="{py(1.0):.2f}" width="{inner:.2f}"'
        f' height="{inner_h:.2f}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
