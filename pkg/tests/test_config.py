"""Config grammar: measure expressions, scalar functions, full files."""

import pytest

from kirchhoff_lines.config import (
    RunOptions,
    load_config,
    parse_measure,
    parse_scalar_function,
)
from kirchhoff_lines.errors import ConfigError


class TestMeasureGrammar:
    def test_gaussian_with_keywords(self):
        nu = parse_measure("gaussian(mass=2, mean=1, sd=0.5)")
        assert nu.kind == "continuous"
        assert nu.total_mass == pytest.approx(2.0)
        assert nu.mean() == pytest.approx(1.0)

    def test_positional_arguments(self):
        nu = parse_measure("uniform(0, 4, 3)")
        assert nu.total_mass == pytest.approx(3.0)
        assert nu.density_at(2.0) == pytest.approx(0.75)

    def test_negation_wrapper(self):
        nu = parse_measure("neg(exponential(1.5))")
        assert nu.density_at(-1.0) > 0.0
        assert nu.density_at(1.0) == 0.0

    def test_atomic_constructors(self):
        nu = parse_measure("bernoulli(0.3, mass=2)")
        assert nu.kind == "atomic"
        assert nu.mass_at(1.0) == pytest.approx(0.6)
        assert parse_measure("dirac(5)").mass_at(5.0) == pytest.approx(1.0)
        assert parse_measure("geometric(0.4)").kind == "atomic"

    def test_negative_number_literal(self):
        nu = parse_measure("dirac(-2, mass=0.5)")
        assert nu.mass_at(-2.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("text", [
        "magic(1)",
        "gaussian",
        "gaussian(mean='x')",
        "gaussian(sd=exp(1))",
        "neg(gaussian(), gaussian())",
        "gaussian(1; 2)",
    ])
    def test_rejects_bad_expressions(self, text):
        with pytest.raises(ConfigError):
            parse_measure(text)

    def test_rejects_wrong_arity(self):
        with pytest.raises(ConfigError, match="bad arguments"):
            parse_measure("dirac()")


class TestScalarGrammar:
    def test_constant(self):
        f = parse_scalar_function("0.25")
        assert f(-3.0) == 0.25

    def test_arithmetic_in_s(self):
        f = parse_scalar_function("0.5 * s ** 2 - 1 / (s + 4)")
        assert f(2.0) == pytest.approx(0.5 * 4 - 1 / 6)

    def test_indicator_sugar(self):
        f = parse_scalar_function("0.3 * 1{s < 2}")
        assert f(1.0) == pytest.approx(0.3)
        assert f(3.0) == 0.0

    def test_named_functions(self):
        f = parse_scalar_function("min(0.5, exp(-abs(s))) + sqrt(4) * 0")
        assert f(0.0) == pytest.approx(0.5)
        assert f(2.0) == pytest.approx(pytest.approx(0.1353352832366127))

    @pytest.mark.parametrize("text", [
        "t + 1",
        "sin(s)",
        "exp(x=s)",
        "s.real",
        "lambda s: s",
        "s if s > 0 else 0",
        "__import__('os')",
    ])
    def test_rejects_unknown_syntax(self, text):
        with pytest.raises(ConfigError):
            parse_scalar_function(text)


def _write(tmp_path, text):
    path = tmp_path / "model.ini"
    path.write_text(text)
    return str(path)


class TestLoadConfig:
    def test_preset_model(self, tmp_path):
        path = _write(tmp_path, "[model]\npreset = gaussian\n")
        params, run = load_config(path)
        assert params.kind == "continuous"
        assert run == RunOptions()

    def test_explicit_model_with_run(self, tmp_path):
        path = _write(tmp_path, """
[model]
nu_v = gaussian()
nu_h = gaussian()
p_v = 0.25
p_h = 0.25 * 1{s < 4}
q = 0.1 * exp(-abs(s))
p_0 = 0

[run]
a = 5
b = 8
replicas = 33
seed = 4
slope = 1.5
faces = yes
reversibility = no
""")
        params, run = load_config(path)
        assert params.p_v(0.0) == pytest.approx(0.25)
        assert params.p_h(5.0) == 0.0
        assert params.q(0.0) == pytest.approx(0.1)
        assert run.a == 5.0 and run.b == 8.0
        assert run.replicas == 33 and run.seed == 4
        assert run.slope == 1.5
        assert run.faces is True
        assert run.reversibility is False

    def test_inline_comments(self, tmp_path):
        path = _write(tmp_path, "[model]\npreset = bullet  # the droplet one\n")
        params, _ = load_config(path)
        assert params.kind == "atomic"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="does not exist"):
            load_config(str(tmp_path / "nope.ini"))

    def test_requires_model_section(self, tmp_path):
        path = _write(tmp_path, "[run]\na = 2\n")
        with pytest.raises(ConfigError, match="no \\[model\\]"):
            load_config(path)

    def test_preset_takes_no_extras(self, tmp_path):
        path = _write(tmp_path, "[model]\npreset = gaussian\np_0 = 0.5\n")
        with pytest.raises(ConfigError, match="no other"):
            load_config(path)

    def test_unknown_model_key(self, tmp_path):
        path = _write(tmp_path, "[model]\npreset = gaussian\ncolour = red\n")
        with pytest.raises(ConfigError, match="unknown \\[model\\] keys: colour"):
            load_config(path)

    def test_missing_explicit_keys(self, tmp_path):
        path = _write(tmp_path, "[model]\nnu_v = gaussian()\n")
        with pytest.raises(ConfigError, match="missing \\[model\\] keys"):
            load_config(path)

    def test_unknown_run_key(self, tmp_path):
        path = _write(tmp_path, "[model]\npreset = gaussian\n\n[run]\nspeed = 9\n")
        with pytest.raises(ConfigError, match="unknown \\[run\\] keys: speed"):
            load_config(path)

    def test_bad_run_value(self, tmp_path):
        path = _write(tmp_path, "[model]\npreset = gaussian\n\n[run]\nreplicas = few\n")
        with pytest.raises(ConfigError, match="bad \\[run\\] value"):
            load_config(path)

    def test_invalid_model_rejected(self, tmp_path):
        # splits must leave room: p_v + p_h > 1 somewhere
        path = _write(tmp_path, """
[model]
nu_v = gaussian()
nu_h = gaussian()
p_v = 0.7
p_h = 0.7
q = 0
""")
        with pytest.raises(Exception):
            load_config(path)
