"""Command line behaviour, driven through main() with explicit argv."""

import pytest

from kirchhoff_lines.cli import main
from kirchhoff_lines.drawing import deserialize


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_catalog_lists_presets(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    names = [line.split()[0] for line in out.strip().splitlines()]
    assert "gaussian" in names
    assert "bullet" in names
    assert len(names) >= 15


def test_simulate_roundtrip_and_determinism(capsys, tmp_path):
    out = tmp_path / "d.klines"
    code, _, _ = run(capsys, "simulate", "--preset", "bullet",
                     "--a", "6", "--b", "6", "--seed", "11",
                     "--out", str(out))
    assert code == 0
    first = out.read_text()
    drawing = deserialize(first)
    assert drawing.a == 6.0 and drawing.seed == 11

    code, _, _ = run(capsys, "simulate", "--preset", "bullet",
                     "--a", "6", "--b", "6", "--seed", "11",
                     "--out", str(out))
    assert code == 0
    assert out.read_text() == first


def test_simulate_to_stdout(capsys):
    code, out, _ = run(capsys, "simulate", "--preset", "gaussian",
                       "--a", "4", "--b", "4", "--seed", "1")
    assert code == 0
    assert out.startswith("klines-drawing 1")


def test_render_svg_from_file(capsys, tmp_path):
    drawing_path = tmp_path / "d.klines"
    run(capsys, "simulate", "--preset", "gaussian", "--a", "5", "--b", "5",
        "--seed", "2", "--out", str(drawing_path))
    svg_path = tmp_path / "d.svg"
    code, _, _ = run(capsys, "render", "--drawing", str(drawing_path),
                     "--mode", "potential", "--out", str(svg_path))
    assert code == 0
    text = svg_path.read_text()
    assert text.startswith("<svg")
    assert "</svg>" in text


def test_verify_writes_report_and_figures(capsys, tmp_path):
    report = tmp_path / "report.tsv"
    code, _, err = run(capsys, "verify", "--preset", "gaussian",
                       "--a", "8", "--b", "8", "--replicas", "30",
                       "--seed", "6", "--no-reversibility",
                       "--out", str(report), "--figures", str(tmp_path))
    assert code == 0
    text = report.read_text()
    assert text.startswith("klines-report 1")
    assert "verdict\tpass" in text
    pngs = sorted(p.name for p in tmp_path.glob("*.png"))
    assert pngs == ["report-census.png", "report-exits.png"]
    assert "report-exits.png" in err


def test_verify_fails_on_broken_turn_rates(capsys, tmp_path):
    code, _, _ = run(capsys, "verify", "--preset", "gaussian",
                     "--a", "8", "--b", "8", "--replicas", "40",
                     "--seed", "6", "--turn-factor", "2.5",
                     "--out", str(tmp_path / "r.tsv"))
    assert code == 1
    assert "verdict\tfail" in (tmp_path / "r.tsv").read_text()


def test_config_file_supplies_run_defaults(capsys, tmp_path):
    cfg = tmp_path / "m.ini"
    cfg.write_text(
        "[model]\npreset = exponential-lpp\n\n"
        "[run]\na = 5\nb = 5\nreplicas = 25\nseed = 3\nreversibility = no\n"
    )
    report = tmp_path / "out.tsv"
    code, _, _ = run(capsys, "verify", "--config", str(cfg),
                     "--out", str(report))
    assert code == 0
    assert "box\ta=5\tb=5\treplicas=25\tseed=3" in report.read_text()


def test_errors_exit_with_two(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--preset", "no-such-model")
    assert code == 2
    assert "no-such-model" in err

    code, _, err = run(capsys, "render", "--drawing", str(tmp_path / "missing"))
    assert code == 2

    code, _, err = run(capsys, "verify", "--config", str(tmp_path / "missing.ini"))
    assert code == 2


def test_model_option_is_required():
    with pytest.raises(SystemExit) as info:
        main(["simulate"])
    assert info.value.code == 2
