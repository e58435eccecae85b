"""Face decomposition, potentials, and transects."""

from __future__ import annotations

import pytest

from kirchhoff_lines.catalog import preset
from kirchhoff_lines.drawing import Drawing, Segment, classify_nodes
from kirchhoff_lines.errors import ParameterError
from kirchhoff_lines.faces import build_faces, potentials, transect
from kirchhoff_lines.simulate import simulate


def make_drawing(segs, kind="continuous", step=None) -> Drawing:
    return Drawing(
        a=1.0, b=1.0, kind=kind, step=step, seed=0, replica=0,
        digest="0" * 12, segments=list(segs), nodes=classify_nodes(segs),
        diagnostics={},
    )


def single_crossing() -> Drawing:
    return make_drawing([
        Segment("v", 0.5, 0.0, 0.5, 0.5, 2.0),
        Segment("v", 0.5, 0.5, 0.5, 1.0, 1.5),
        Segment("h", 0.0, 0.5, 0.5, 0.5, 1.0),
        Segment("h", 0.5, 0.5, 1.0, 0.5, 1.5),
    ])


def closed_loop() -> Drawing:
    # rectangle born at (0.3, 0.3) and annihilated at (0.7, 0.7):
    # intensities -1 up / +1 east keep every node conservative
    return make_drawing([
        Segment("v", 0.3, 0.3, 0.3, 0.7, -1.0),
        Segment("h", 0.3, 0.3, 0.7, 0.3, 1.0),
        Segment("v", 0.7, 0.3, 0.7, 0.7, 1.0),
        Segment("h", 0.3, 0.7, 0.7, 0.7, -1.0),
    ])


def test_empty_box_is_one_face():
    d = make_drawing([])
    fs = build_faces(d)
    assert len(fs.faces) == 1
    face = fs.faces[0]
    assert face.area == pytest.approx(1.0)
    assert face.vertex_count == 4
    assert face.corner_count == 4
    assert face.touches_ne
    values, defect = potentials(fs)
    assert values == (0.0,)
    assert defect == 0.0
    assert transect(d, y=0.5) == [0.0]


def test_single_line_splits_box():
    d = make_drawing([Segment("v", 0.5, 0.0, 0.5, 1.0, 2.0)])
    fs = build_faces(d)
    assert len(fs.faces) == 2
    assert sorted(f.area for f in fs.faces) == pytest.approx([0.5, 0.5])
    values, _ = potentials(fs)
    left = fs.base_index
    right = 1 - left
    assert values[left] == 0.0
    assert values[right] == pytest.approx(-2.0)
    assert transect(d, y=0.3) == pytest.approx([0.0, -2.0])
    with pytest.raises(ParameterError):
        transect(d, x=0.5)
    with pytest.raises(ParameterError):
        transect(d, x=0.2, y=0.3)


def test_crossing_gives_four_quadrants():
    d = single_crossing()
    fs = build_faces(d)
    assert len(fs.faces) == 4
    for face in fs.faces:
        assert face.area == pytest.approx(0.25)
        assert face.vertex_count == 4
        assert face.corner_count == 4
        assert not face.holes
    assert sum(not f.touches_ne for f in fs.faces) == 1

    by_corner = {}
    for idx, face in enumerate(fs.faces):
        xs = [p[0] for p in face.cycle]
        ys = [p[1] for p in face.cycle]
        by_corner[(min(xs) == 0.0, min(ys) == 0.0)] = idx
    values, defect = potentials(fs)
    assert defect <= 1e-12
    assert values[by_corner[(True, True)]] == 0.0
    assert values[by_corner[(True, False)]] == pytest.approx(1.0)
    assert values[by_corner[(False, True)]] == pytest.approx(-2.0)
    assert values[by_corner[(False, False)]] == pytest.approx(-0.5)

    deep = potentials(fs, order="depth")[0]
    assert deep == values

    assert transect(d, y=0.25) == pytest.approx([0.0, -2.0])
    assert transect(d, y=0.75) == pytest.approx([1.0, -0.5])
    assert transect(d, x=0.25) == pytest.approx([0.0, 1.0])
    assert transect(d, x=0.75) == pytest.approx([-2.0, -0.5])


def test_closed_loop_becomes_hole():
    d = closed_loop()
    fs = build_faces(d)
    assert len(fs.faces) == 2
    outer = next(f for f in fs.faces if f.holes)
    inner = next(f for f in fs.faces if not f.holes)
    assert inner.area == pytest.approx(0.16)
    assert outer.area == pytest.approx(0.84)
    assert outer.vertex_count == 8
    assert outer.corner_count == 8
    values, _ = potentials(fs)
    assert values[fs.faces.index(outer)] == 0.0
    assert values[fs.faces.index(inner)] == pytest.approx(1.0)
    assert transect(d, y=0.5) == pytest.approx([0.0, 1.0, 0.0])
    assert transect(d, x=0.5) == pytest.approx([0.0, 1.0, 0.0])


def test_simulated_drawing_decomposes_cleanly():
    params = preset("gaussian").params
    d = simulate(params, a=6.0, b=6.0, seed=77)
    fs = build_faces(d)
    total = sum(f.area for f in fs.faces)
    assert total == pytest.approx(1.0, abs=1e-9)
    for face in fs.faces:
        assert face.vertex_count >= 4
        assert face.corner_count >= 4
        assert face.corner_count % 2 == 0
    breadth, defect_b = potentials(fs, order="breadth")
    depth, defect_d = potentials(fs, order="depth")
    assert max(defect_b, defect_d) <= 1e-9
    assert max(abs(u - v) for u, v in zip(breadth, depth)) <= 1e-9


def test_monotone_transects_for_positive_flow():
    # negated vertical measure plus positive horizontal measure makes
    # the potential increase both northward and eastward
    params = preset("exponential-lpp").params
    d = simulate(params, a=5.0, b=5.0, seed=3)
    for y in (0.21237, 0.5421, 0.8323):
        vals = transect(d, y=y)
        assert all(u <= v + 1e-12 for u, v in zip(vals, vals[1:]))
    for x in (0.1931, 0.477, 0.913):
        vals = transect(d, x=x)
        assert all(u <= v + 1e-12 for u, v in zip(vals, vals[1:]))


def test_transect_agrees_with_face_potentials():
    d = single_crossing()
    fs = build_faces(d)
    values, _ = potentials(fs)
    assert sorted(set(transect(d, y=0.25) + transect(d, y=0.75))) == sorted(values)
