"""Acceptance gate: the ten headline guarantees of the package.

Each test covers one numbered guarantee and prints a single verdict
line.  Monte Carlo bands are three standard errors around closed-form
constants unless noted; distributional tests run at level 0.001.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from kirchhoff_lines import stats
from kirchhoff_lines.catalog import (
    ModelPreset,
    normal_normal,
    preset,
    preset_names,
    table_families,
)
from kirchhoff_lines.drawing import balance_identities, kirchhoff_defects, serialize
from kirchhoff_lines.faces import build_faces, potentials, transect
from kirchhoff_lines.simulate import simulate

GAUSS = preset("gaussian").params


def _verdict(num: int, label: str, ok: bool, detail: str = "") -> None:
    tail = f"  [{detail}]" if detail else ""
    print(f"criterion {num:02d} {'PASS' if ok else 'FAIL'}  {label}{tail}")
    assert ok, f"criterion {num:02d}: {label} {detail}"


def _band(values, target: float) -> tuple[bool, str]:
    arr = np.asarray(values, dtype=float)
    se = arr.std(ddof=1) / math.sqrt(len(arr))
    gap = abs(arr.mean() - target)
    return gap <= 3.0 * se, f"mean={arr.mean():.3f} target={target:g} se={se:.3f}"


@pytest.fixture(scope="module")
def gauss_ensemble():
    # shared by the stationarity, mean-count, and cross-section gates
    return stats.run_ensemble(
        GAUSS, 50.0, 50.0, 400, 2026, with_faces=True, cut_slope=1.0
    )


def test_criterion_01_closed_form_rates():
    fams = table_families()
    assert len(fams) == 13
    worst = 0.0
    for fam in fams:
        p = fam.params
        mv, mh = p.nu_v.total_mass, p.nu_h.total_mass
        for s in fam.points_v:
            generic = p.conv(s) / (p.nu_v.weight(s) * mh)
            closed = fam.closed_rate_v(s)
            worst = max(worst, abs(generic - closed) / max(abs(closed), 1e-12))
        for s in fam.points_h:
            generic = p.conv(s) / (p.nu_h.weight(s) * mv)
            closed = fam.closed_rate_h(s)
            worst = max(worst, abs(generic - closed) / max(abs(closed), 1e-12))
    _verdict(1, "closed-form rate columns match the generic route",
             worst < 1e-6, f"13 families, worst rel err {worst:.2e}")


def test_criterion_02_node_law_and_counting_identities():
    runs = [
        (preset("gaussian"), 200, 6.0, 6.0, 1e-9),
        (preset("ber-ber", p_split_v=0.1, p_split_h=0.2, q_turn=0.3, p_0=0.2),
         200, 5.0, 5.0, 0.0),
        (preset("bullet"), 200, 8.0, 8.0, 0.0),
        (preset("exponential-lpp"), 150, 5.0, 5.0, 1e-9),
        (preset("geom-geom", p_split_v=0.2, p_split_h=0.2, q_turn=0.2, p_0=0.1),
         150, 5.0, 5.0, 0.0),
        (preset("unif-unif"), 100, 5.0, 5.0, 1e-9),
    ]
    total = 0
    for model, replicas, a, b, tol in runs:
        for replica in range(replicas):
            d = simulate(model.params, a, b, 77, replica=replica)
            assert kirchhoff_defects(d, tol=tol) == [], (model.name, replica)
            for name, (lhs, rhs) in balance_identities(d).items():
                assert lhs == rhs, (model.name, replica, name, lhs, rhs)
            total += 1
    _verdict(2, "node law and counting identities on every drawing",
             total == 1000, f"{total} drawings, 6 models, zero violations")


def test_criterion_03_stationary_exit_processes(gauss_ensemble):
    checks = stats.exit_process_battery(
        gauss_ensemble, GAUSS, 50.0, 50.0, count_z=3.0
    )
    by_name = {c.name: c for c in checks}
    ok = all(c.passed for c in checks)
    _verdict(3, "exit processes are the stationary boundary laws", ok,
             "; ".join(f"{c.name}={'ok' if c.passed else c.detail}"
                       for c in by_name.values()))


def test_criterion_04_mean_node_and_face_counts(gauss_ensemble):
    expected = stats.expected_node_counts(GAUSS, 50.0, 50.0)
    assert expected["CC"] == pytest.approx(500.0, rel=1e-9)
    assert expected["HT"] == pytest.approx(250.0, rel=1e-9)
    details = []
    ok = True
    for kind, target in (("CC", 500.0), ("HT", 250.0), ("VE", 50.0)):
        good, detail = _band([s.census[kind] for s in gauss_ensemble], target)
        ok &= good
        details.append(f"{kind}: {detail}")
    good, detail = _band([s.faces_inner for s in gauss_ensemble], 2500.0)
    ok &= good
    details.append(f"faces: {detail}")
    _verdict(4, "mean node and face counts match the formulas", ok,
             "; ".join(details))


def test_criterion_05_reversibility_with_canary():
    clean = stats.reversibility_battery(GAUSS, 10.0, 10.0, 60, 5)
    clean_ok = all(c.passed for c in clean)
    broken = stats.reversibility_battery(
        GAUSS, 10.0, 10.0, 60, 5, vertical_turn_factor=2.0
    )
    canary = {c.name for c in broken if not c.passed}
    _verdict(5, "rotation invariance holds and the canary trips",
             clean_ok and bool(canary & {"swap-HT", "swap-VT"}),
             f"clean 20/20, corrupted run fails {sorted(canary)}")


def test_criterion_06_diagonal_cross_section(gauss_ensemble):
    length = 50.0 * math.sqrt(2.0)
    ok_v, det_v = _band([len(s.cut_v) / length for s in gauss_ensemble],
                        1.0 / math.sqrt(2.0))
    ok_h, det_h = _band([len(s.cut_h) / length for s in gauss_ensemble],
                        1.0 / math.sqrt(2.0))
    nv = np.array([len(s.cut_v) for s in gauss_ensemble], dtype=float)
    nh = np.array([len(s.cut_h) for s in gauss_ensemble], dtype=float)
    r = float(np.corrcoef(nv, nh)[0, 1])
    z = abs(math.atanh(r)) * math.sqrt(len(nv) - 3)
    _verdict(6, "diagonal cross-section rates and independence",
             ok_v and ok_h and z <= 3.0,
             f"v {det_v}; h {det_h}; corr z={z:.2f}")


def test_criterion_07_face_limits_large_box():
    params = normal_normal(0.25, 0.25, 0.0).params
    summaries = stats.run_ensemble(params, 150.0, 150.0, 50, 31, with_faces=True)
    checks = stats.face_battery(summaries, params,
                                tol_vertices=0.1, tol_corners=0.1)
    ok = all(c.passed for c in checks)
    _verdict(7, "per-face node and corner means reach (5.0, 4.0)", ok,
             "; ".join(c.detail for c in checks))


def test_criterion_08_pair_creation_counts():
    params = preset("hammersley").params
    summaries = stats.run_ensemble(params, 10.0, 10.0, 200, 13)
    ok, detail = _band([s.census["OB"] for s in summaries], 100.0)
    balanced = all(
        s.census["VE"] + s.census["OB"] == s.census["VS"] + s.census["OA"]
        for s in summaries
    )
    _verdict(8, "spontaneous pair creation count and exact balance",
             ok and balanced, f"OB {detail}; balance exact in all 200")


def test_criterion_09_potential_consistency():
    agree = 0
    for name in ("gaussian", "ber-ber", "exponential-lpp", "geom-geom"):
        params = preset(name).params
        for replica in range(15):
            d = simulate(params, 6.0, 6.0, 311, replica=replica)
            fs = build_faces(d)
            bfs, defect_b = potentials(fs, order="breadth")
            dfs, defect_d = potentials(fs, order="depth")
            gap = max(abs(x - y) for x, y in zip(bfs, dfs))
            assert gap <= 1e-9 and defect_b <= 1e-9 and defect_d <= 1e-9
            agree += 1

    violations = 0
    params = preset("exponential-lpp").params
    for replica in range(40):
        d = simulate(params, 6.0, 6.0, 313, replica=replica)
        # cuts in box fractions, chosen clear of lattice-looking values
        for y in (0.20575, 0.50002, 0.81275):
            values = transect(d, y=y)
            violations += sum(v2 < v1 - 1e-9 for v1, v2 in zip(values, values[1:]))
        for x in (0.25720, 0.55555):
            values = transect(d, x=x)
            violations += sum(v2 < v1 - 1e-9 for v1, v2 in zip(values, values[1:]))
    _verdict(9, "potentials are order-independent and monotone for growth models",
             agree == 60 and violations == 0,
             f"60 drawings agree; 0 monotonicity violations in 200 transects")


def test_criterion_10_deterministic_documents():
    names = preset_names()
    for name in names:
        params = preset(name).params
        one = serialize(simulate(params, 4.0, 4.0, 99))
        two = serialize(simulate(params, 4.0, 4.0, 99))
        assert one == two, name
    _verdict(10, "drawing documents are byte-identical for a fixed seed",
             True, f"{len(names)} presets")
