"""Command line front end.

Four subcommands: ``catalog`` lists the built-in models, ``simulate``
samples one drawing and writes the serialized document, ``render``
turns a drawing document into an SVG picture, and ``verify`` runs the
statistical batteries, writing a delimited report plus diagnostic
figures next to it.

Exit codes: 0 on success (and a passing report), 1 when verification
ran but a check failed, 2 for usage, configuration, or model errors.
"""

import argparse
import os
import sys

from . import __version__
from .catalog import preset, preset_names
from .config import RunOptions, load_config
from .drawing import deserialize, serialize
from .errors import KirchhoffLinesError
from .render import render_svg
from .simulate import simulate
from .stats import ALPHA, render_report, standard_battery


def _add_model_options(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", help="name of a built-in model")
    group.add_argument("--config", help="INI file with [model] and [run] sections")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="klines",
        description="Sample, draw, and statistically verify random line systems.",
    )
    parser.add_argument("--version", action="version", version=f"klines {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    cat = subs.add_parser("catalog", help="list built-in models")
    cat.set_defaults(func=_cmd_catalog)

    sim = subs.add_parser("simulate", help="sample one drawing")
    _add_model_options(sim)
    sim.add_argument("--a", type=float, help="box width (default 10 or config)")
    sim.add_argument("--b", type=float, help="box height (default 10 or config)")
    sim.add_argument("--seed", type=int, help="random seed (default 0 or config)")
    sim.add_argument("--replica", type=int, default=0, help="replica index (default 0)")
    sim.add_argument("--turn-factor", type=float, default=1.0,
                     help="scale the vertical turn rate (diagnostic knob)")
    sim.add_argument("--out", default="-", help="output path, - for stdout")
    sim.set_defaults(func=_cmd_simulate)

    ren = subs.add_parser("render", help="render a drawing document as SVG")
    ren.add_argument("--drawing", required=True, help="serialized drawing path")
    ren.add_argument("--mode", choices=("lines", "potential"), default="lines")
    ren.add_argument("--width", type=int, default=640)
    ren.add_argument("--out", default="-", help="output path, - for stdout")
    ren.set_defaults(func=_cmd_render)

    ver = subs.add_parser("verify", help="run the statistical batteries")
    _add_model_options(ver)
    ver.add_argument("--a", type=float, help="box width")
    ver.add_argument("--b", type=float, help="box height")
    ver.add_argument("--replicas", type=int, help="ensemble size")
    ver.add_argument("--seed", type=int, help="random seed")
    ver.add_argument("--slope", type=float,
                     help="also test the cross section of this slope")
    ver.add_argument("--faces", action="store_true",
                     help="also test face counts and per-face means")
    ver.add_argument("--no-reversibility", action="store_true",
                     help="skip the rotation battery")
    ver.add_argument("--alpha", type=float, default=ALPHA,
                     help=f"significance level per check (default {ALPHA})")
    ver.add_argument("--turn-factor", type=float, default=1.0,
                     help="scale the vertical turn rate (diagnostic knob)")
    ver.add_argument("--out", default="-", help="report path, - for stdout")
    ver.add_argument("--figures",
                     help="directory for the figures (default: next to the report)")
    ver.set_defaults(func=_cmd_verify)

    return parser


def _load_model(args) -> tuple:
    if args.config:
        return load_config(args.config)
    return preset(args.preset).params, RunOptions()


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_catalog(args) -> int:
    for name in preset_names():
        model = preset(name)
        print(f"{name:20s} {model.params.kind:10s} {model.summary}")
    return 0


def _cmd_simulate(args) -> int:
    params, run = _load_model(args)
    a = run.a if args.a is None else args.a
    b = run.b if args.b is None else args.b
    seed = run.seed if args.seed is None else args.seed
    drawing = simulate(params, a, b, seed, replica=args.replica,
                       vertical_turn_factor=args.turn_factor)
    _write(serialize(drawing), args.out)
    return 0


def _cmd_render(args) -> int:
    with open(args.drawing, encoding="utf-8") as fh:
        drawing = deserialize(fh.read())
    _write(render_svg(drawing, mode=args.mode, width=args.width), args.out)
    return 0


def _cmd_verify(args) -> int:
    params, run = _load_model(args)
    a = run.a if args.a is None else args.a
    b = run.b if args.b is None else args.b
    replicas = run.replicas if args.replicas is None else args.replicas
    seed = run.seed if args.seed is None else args.seed
    slope = run.slope if args.slope is None else args.slope
    faces = run.faces or args.faces
    reversibility = run.reversibility and not args.no_reversibility
    report, summaries = standard_battery(
        params, a, b, replicas, seed,
        with_faces=faces, cut_slope=slope, reversibility=reversibility,
        vertical_turn_factor=args.turn_factor, alpha=args.alpha,
    )
    _write(render_report(report), args.out)

    prefix = None
    if args.figures is not None:
        os.makedirs(args.figures, exist_ok=True)
        stem = "report" if args.out == "-" else os.path.splitext(
            os.path.basename(args.out))[0]
        prefix = os.path.join(args.figures, stem)
    elif args.out != "-":
        prefix = os.path.splitext(args.out)[0]
    if prefix is not None:
        from .figures import report_figures

        for path in report_figures(summaries, params, a, b, prefix):
            print(f"figure: {path}", file=sys.stderr)
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KirchhoffLinesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())
