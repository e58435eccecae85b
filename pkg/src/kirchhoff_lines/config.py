"""INI configuration for models and runs.

A config file has a ``[model]`` section naming a catalog preset or
spelling out a model, and an optional ``[run]`` section with box and
ensemble settings::

    [model]
    nu_v = gaussian(mass=1, mean=0, sd=1)
    nu_h = gaussian(mass=1)
    p_v = 0.25
    p_h = 0.25 * 1{s < 4}
    q = 0.1 * exp(-abs(s))
    p_0 = 0

    [run]
    a = 20
    b = 20
    replicas = 100
    seed = 7

Measures are constructor calls with numeric arguments: ``gaussian``,
``exponential``, ``uniform``, ``gamma``, ``dirac``, ``bernoulli``,
``geometric``, ``poisson``, and ``neg(...)`` to flip a measure's sign.
Scalar functions of ``s`` allow numbers, arithmetic, parentheses, the
indicator ``1{<comparison>}``, and ``min``/``max``/``exp``/``sqrt``/
``abs``.
"""

import ast
import configparser
import math
import os
from dataclasses import dataclass

from . import measures
from .catalog import preset
from .errors import ConfigError
from .measures import IntensityMeasure, SystemParams, validate

_MEASURE_BUILDERS = {
    "gaussian": measures.gaussian,
    "exponential": measures.exponential_measure,
    "uniform": measures.uniform_measure,
    "gamma": measures.gamma_measure,
    "dirac": measures.dirac,
    "bernoulli": measures.bernoulli,
    "geometric": measures.geometric,
    "poisson": measures.poisson_measure,
}

_SCALAR_FUNCS = {
    "exp": math.exp,
    "sqrt": math.sqrt,
    "abs": abs,
    "min": min,
    "max": max,
    "ind": lambda cond: 1.0 if cond else 0.0,
}

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_CMPOPS = (ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Eq, ast.NotEq)


def _number(node: ast.AST, text: str) -> float:
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _number(node.operand, text)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    raise ConfigError(f"expected a number in {text!r}")


def parse_measure(text: str) -> IntensityMeasure:
    """Build an intensity measure from a constructor expression."""
    try:
        node = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ConfigError(f"bad measure expression {text!r}: {exc.msg}") from None
    return _eval_measure(node, text)


def _eval_measure(node: ast.AST, text: str) -> IntensityMeasure:
    if not (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)):
        raise ConfigError(f"measure expression {text!r} must be a constructor call")
    name = node.func.id
    if name == "neg":
        if len(node.args) != 1 or node.keywords:
            raise ConfigError("neg takes exactly one measure")
        return _eval_measure(node.args[0], text).negate()
    builder = _MEASURE_BUILDERS.get(name)
    if builder is None:
        known = ", ".join(sorted([*_MEASURE_BUILDERS, "neg"]))
        raise ConfigError(f"unknown measure {name!r}; known: {known}")
    args = [_number(a, text) for a in node.args]
    kwargs = {}
    for kw in node.keywords:
        if kw.arg is None:
            raise ConfigError(f"no ** expansion in measure expression {text!r}")
        kwargs[kw.arg] = _number(kw.value, text)
    try:
        return builder(*args, **kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad arguments for {name}: {exc}") from None


def _check_scalar(node: ast.AST, text: str) -> None:
    if isinstance(node, ast.Expression):
        _check_scalar(node.body, text)
    elif isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        _check_scalar(node.left, text)
        _check_scalar(node.right, text)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _check_scalar(node.operand, text)
    elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        pass
    elif isinstance(node, ast.Name) and node.id == "s":
        pass
    elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        if node.func.id not in _SCALAR_FUNCS:
            raise ConfigError(f"unknown function {node.func.id!r} in {text!r}")
        if node.keywords:
            raise ConfigError(f"no keyword arguments in {text!r}")
        for a in node.args:
            _check_scalar(a, text)
    elif isinstance(node, ast.Compare):
        if not all(isinstance(op, _CMPOPS) for op in node.ops):
            raise ConfigError(f"unsupported comparison in {text!r}")
        _check_scalar(node.left, text)
        for c in node.comparators:
            _check_scalar(c, text)
    else:
        raise ConfigError(f"unsupported syntax in scalar expression {text!r}")


def parse_scalar_function(text: str):
    """Compile an expression in ``s`` to a plain float function."""
    # the indicator 1{...} is sugar for a 0/1 call; braces appear
    # nowhere else in the grammar
    src = text.replace("1{", "ind(").replace("}", ")")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad scalar expression {text!r}: {exc.msg}") from None
    _check_scalar(tree, text)
    code = compile(tree, "<config>", "eval")

    def fn(s: float) -> float:
        return float(eval(code, {"__builtins__": {}}, {**_SCALAR_FUNCS, "s": s}))

    return fn


@dataclass(frozen=True)
class RunOptions:
    a: float = 10.0
    b: float = 10.0
    replicas: int = 100
    seed: int = 0
    slope: float | None = None
    faces: bool = False
    reversibility: bool = True


_MODEL_KEYS = {"preset", "nu_v", "nu_h", "p_v", "p_h", "q", "p_0"}
_RUN_KEYS = {"a", "b", "replicas", "seed", "slope", "faces", "reversibility"}


def _model_from_section(section) -> SystemParams:
    unknown = set(section) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown [model] keys: {', '.join(sorted(unknown))}")
    if "preset" in section:
        extras = set(section) - {"preset"}
        if extras:
            raise ConfigError("a preset model takes no other [model] keys")
        return preset(section["preset"]).params
    missing = {"nu_v", "nu_h", "p_v", "p_h", "q"} - set(section)
    if missing:
        raise ConfigError(f"missing [model] keys: {', '.join(sorted(missing))}")
    try:
        p_0 = float(section.get("p_0", "0"))
    except ValueError:
        raise ConfigError(f"p_0 must be a number, got {section['p_0']!r}") from None
    description = "; ".join(f"{k}={section[k]}" for k in sorted(section))
    params = SystemParams(
        nu_v=parse_measure(section["nu_v"]),
        nu_h=parse_measure(section["nu_h"]),
        p_v=parse_scalar_function(section["p_v"]),
        p_h=parse_scalar_function(section["p_h"]),
        q=parse_scalar_function(section["q"]),
        p_0=p_0,
        description=description,
    )
    validate(params)
    return params


def _run_from_section(section) -> RunOptions:
    unknown = set(section) - _RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown [run] keys: {', '.join(sorted(unknown))}")
    base = RunOptions()
    try:
        return RunOptions(
            a=float(section.get("a", base.a)),
            b=float(section.get("b", base.b)),
            replicas=int(section.get("replicas", base.replicas)),
            seed=int(section.get("seed", base.seed)),
            slope=float(section["slope"]) if "slope" in section else None,
            faces=section.getboolean("faces", base.faces),
            reversibility=section.getboolean("reversibility", base.reversibility),
        )
    except ValueError as exc:
        raise ConfigError(f"bad [run] value: {exc}") from None


def load_config(path: str) -> tuple[SystemParams, RunOptions]:
    """Read a config file into model parameters and run options."""
    if not os.path.exists(path):
        raise ConfigError(f"config file {path!r} does not exist")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path!r}: {exc}") from None
    if "model" not in cp:
        raise ConfigError(f"{path!r} has no [model] section")
    params = _model_from_section(cp["model"])
    run = _run_from_section(cp["run"]) if "run" in cp else RunOptions()
    return params, run
