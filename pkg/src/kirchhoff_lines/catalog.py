"""Catalog of ready-made line systems.

Each family builder returns a :class:`ModelPreset` bundling the
parameter set with closed forms for the split-ratio columns (the
unnormalized convolution divided by the respective density, stated for
probability-normalized measures) and a fast sampler for the crossing
kernel.  The closed forms were derived by hand and double as oracles:
tests compare them against quadrature or lattice sums.

``preset(name)`` looks up named models; a couple of classical names map
to family instances (last-passage models, the broken-stick showcase,
annihilating flights).  Mixed families pairing a density with a lattice
law are recognized by name and rejected explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import ImpossibleEventError, ParameterError, UnsupportedModelError
from .measures import (
    IntensityMeasure,
    SystemParams,
    atomic_measure,
    bernoulli,
    dirac,
    exponential_measure,
    gamma_measure,
    gaussian,
    geometric,
    poisson_measure,
    uniform_measure,
    validate,
)

__all__ = [
    "ModelPreset",
    "bullet",
    "dirac_pair",
    "ber_ber",
    "negber_ber",
    "unif_unif",
    "negunif_unif",
    "geom_geom",
    "exp_exp",
    "gamma_gamma",
    "negber_geom",
    "neggeom_geom",
    "negexp_exp",
    "normal_normal",
    "poisson_poisson",
    "geom_geom_shifted",
    "generalized_lpp",
    "table_families",
    "preset",
    "preset_names",
    "six_vertex_types",
    "six_vertex_weights",
]

_TOL = 1e-9


def _int_at(s: float) -> int | None:
    k = round(s)
    return k if abs(s - k) <= _TOL * max(1.0, abs(s)) else None


def _const(v: float) -> Callable[[float], float]:
    return lambda s: v


def _clipped(p: float, nu: IntensityMeasure) -> Callable[[float], float]:
    # crossing totals can exceed the reach of a single line's measure;
    # a split may only leave behind an intensity the measure supports,
    # so the constant knob is zeroed off-support
    if p == 0.0:
        return _const(0.0)
    if nu.kind == "atomic":
        return lambda s: p if nu.weight(s) > 0.0 else 0.0
    lo, hi = nu.support
    return lambda s: p if lo <= s <= hi else 0.0


@dataclass(frozen=True, eq=False)
class ModelPreset:
    """A named parameter bundle plus its reference closed forms.

    ``closed_rate_v``/``closed_rate_h`` are the split-ratio columns for
    mass-one measures (multiply by the opposite total mass to get the
    unnormalized ratio).  ``points_v``/``points_h`` are support points
    on which the closed forms are numerically trustworthy given pmf
    truncation.  They are empty for degenerate or formula-free models.
    """

    name: str
    params: SystemParams
    summary: str
    kernel_label: str = ""
    closed_rate_v: Callable[[float], float] | None = None
    closed_rate_h: Callable[[float], float] | None = None
    points_v: tuple[float, ...] = field(default=())
    points_h: tuple[float, ...] = field(default=())


def _finish(
    name: str,
    nu_v: IntensityMeasure,
    nu_h: IntensityMeasure,
    *,
    p_split_v: float,
    p_split_h: float,
    q_turn: float,
    p_0: float,
    summary: str,
    kernel_label: str,
    rate_v: Callable[[float], float] | None,
    rate_h: Callable[[float], float] | None,
    kernel: Callable[[float, np.random.Generator], float] | None,
    points_v,
    points_h,
    description: str,
) -> ModelPreset:
    mv, mh = nu_v.total_mass, nu_h.total_mass
    params = SystemParams(
        nu_v=nu_v,
        nu_h=nu_h,
        p_v=_clipped(p_split_v, nu_v),
        p_h=_clipped(p_split_h, nu_h),
        q=_const(q_turn),
        p_0=p_0,
        description=description,
        ratio_v=None if rate_v is None else (lambda s: mh * rate_v(s)),
        ratio_h=None if rate_h is None else (lambda s: mv * rate_h(s)),
        kernel=kernel,
    )
    validate(params)
    return ModelPreset(
        name=name,
        params=params,
        summary=summary,
        kernel_label=kernel_label,
        closed_rate_v=rate_v,
        closed_rate_h=rate_h,
        points_v=tuple(float(x) for x in points_v),
        points_h=tuple(float(x) for x in points_h),
    )


def _atomic_points(nu: IntensityMeasure, floor: float = 1e-7, cap: int = 100):
    """Support values whose mass is large enough for truncation-safe sums."""
    pts = [nu.value_of(k) for k in nu._indices if nu.pmf[k] >= floor * nu.total_mass]
    return pts[:cap]


# ---------------------------------------------------------------------------
# family builders


def bullet(p_0: float = 1.0, p_split_v: float = 0.0, p_split_h: float = 0.0,
           q_turn: float = 0.0) -> ModelPreset:
    """Unit point masses at zero on both axes: annihilating flights."""

    def kern(s, rng):
        if _int_at(s) != 0:
            raise ImpossibleEventError(f"total {s!r} impossible for point masses at 0")
        return 0.0

    one_at_zero = lambda s: 1.0 if abs(s) <= _TOL else 0.0
    return _finish(
        "bullet", dirac(0), dirac(0),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=p_0,
        summary="point mass at 0 on both axes; crossings may annihilate",
        kernel_label="point mass at 0",
        rate_v=one_at_zero, rate_h=one_at_zero, kernel=kern,
        points_v=[0.0], points_h=[0.0],
        description=f"bullet p0={p_0:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g}",
    )


def dirac_pair(value_v, value_h, p_0: float = 0.0) -> ModelPreset:
    """Point masses at arbitrary lattice values; splits are degenerate."""
    nu_v, nu_h = dirac(value_v), dirac(value_h)
    av, ah = float(nu_v.lo), float(nu_h.lo)

    def kern(s, rng):
        if abs(s - (av + ah)) > _TOL * max(1.0, abs(s)):
            raise ImpossibleEventError(f"total {s!r} impossible for this point-mass pair")
        return ah

    # the split ratio vanishes unless the opposite atom sits at 0
    rate_v = lambda s: 1.0 if (ah == 0.0 and abs(s - av) <= _TOL) else 0.0
    rate_h = lambda s: 1.0 if (av == 0.0 and abs(s - ah) <= _TOL) else 0.0
    return _finish(
        f"dirac({av:g},{ah:g})", nu_v, nu_h,
        p_split_v=0.0, p_split_h=0.0, q_turn=0.0, p_0=p_0,
        summary="one point mass per axis; only rigid crossings",
        kernel_label=f"point mass at {ah:g}",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=[av] if ah == 0.0 else [],
        points_h=[ah] if av == 0.0 else [],
        description=f"dirac {av:g}/{ah:g} p0={p_0:g}",
    )


def ber_ber(q_v: float = 0.35, q_h: float = 0.6, p_split_v: float = 0.0,
            p_split_h: float = 0.0, q_turn: float = 0.0, p_0: float = 0.0) -> ModelPreset:
    """Two-point laws on {0, 1} with masses q at 1."""
    if not (0.0 < q_v < 1.0 and 0.0 < q_h < 1.0):
        raise ParameterError("two-point parameters must lie strictly inside (0, 1)")
    pi1 = q_h * (1.0 - q_v) / (q_v + q_h - 2.0 * q_v * q_h)

    def rate_v(s):
        k = _int_at(s)
        if k == 0:
            return 1.0 - q_h
        if k == 1:
            return 1.0 + q_h * (1.0 / q_v - 2.0)
        return 0.0

    def rate_h(s):
        k = _int_at(s)
        if k == 0:
            return 1.0 - q_v
        if k == 1:
            return 1.0 + q_v * (1.0 / q_h - 2.0)
        return 0.0

    def kern(s, rng):
        k = _int_at(s)
        if k == 0:
            return 0.0
        if k == 1:
            return float(rng.random() < pi1)
        if k == 2:
            return 1.0
        raise ImpossibleEventError(f"total {s!r} outside {{0,1,2}}")

    return _finish(
        "ber-ber", bernoulli(q_v), bernoulli(q_h),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=p_0,
        summary="two-point laws on {0,1}; crossings shuffle a single unit",
        kernel_label="0 / coin / 1 by total",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=[0.0, 1.0], points_h=[0.0, 1.0],
        description=f"ber-ber qv={q_v:g} qh={q_h:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g} p0={p_0:g}",
    )


def negber_ber(q_v: float = 0.35, q_h: float = 0.6, p_split_v: float = 0.0,
               p_split_h: float = 0.0, q_turn: float = 0.0, p_0: float = 0.0) -> ModelPreset:
    """Two-point laws on {-1, 0} (vertical) and {0, 1} (horizontal)."""
    if not (0.0 < q_v < 1.0 and 0.0 < q_h < 1.0):
        raise ParameterError("two-point parameters must lie strictly inside (0, 1)")
    g0 = (1.0 - q_v) * (1.0 - q_h) + q_v * q_h
    pi1 = q_v * q_h / g0

    def rate_v(s):
        k = _int_at(s)
        if k == -1:
            return 1.0 - q_h
        if k == 0:
            return 1.0 + q_h * (2.0 * q_v - 1.0) / (1.0 - q_v)
        return 0.0

    def rate_h(s):
        k = _int_at(s)
        if k == 1:
            return 1.0 - q_v
        if k == 0:
            return 1.0 + q_v * (2.0 * q_h - 1.0) / (1.0 - q_h)
        return 0.0

    def kern(s, rng):
        k = _int_at(s)
        if k == -1:
            return 0.0
        if k == 0:
            return float(rng.random() < pi1)
        if k == 1:
            return 1.0
        raise ImpossibleEventError(f"total {s!r} outside {{-1,0,1}}")

    return _finish(
        "negber-ber", bernoulli(q_v).negate(), bernoulli(q_h),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=p_0,
        summary="two-point laws on {-1,0} and {0,1}; the square-ice companion",
        kernel_label="0 / coin / 1 by total",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=[-1.0, 0.0], points_h=[0.0, 1.0],
        description=f"negber-ber qv={q_v:g} qh={q_h:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g} p0={p_0:g}",
    )


def unif_unif(width_v: float = 1.5, width_h: float = 1.0, p_split_v: float = 0.0,
              p_split_h: float = 0.0, q_turn: float = 0.0) -> ModelPreset:
    """Uniform densities on [0, a] and [0, b]."""
    a, b = float(width_v), float(width_h)

    def kern(s, rng):
        lo, hi = max(0.0, s - a), min(b, s)
        if hi <= lo:
            raise ImpossibleEventError(f"total {s!r} outside (0, {a + b:g})")
        return float(rng.uniform(lo, hi))

    rate_v = lambda s: min(s / b, 1.0) if 0.0 < s < a else 0.0
    rate_h = lambda s: min(s / a, 1.0) if 0.0 < s < b else 0.0
    eps_a, eps_b = a / 200.0, b / 200.0
    return _finish(
        "unif-unif", uniform_measure(0.0, a), uniform_measure(0.0, b),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=0.0,
        summary=f"uniform densities on [0,{a:g}] and [0,{b:g}]",
        kernel_label="uniform on the feasible slab",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=np.linspace(eps_a, a - eps_a, 100),
        points_h=np.linspace(eps_b, b - eps_b, 100),
        description=f"unif-unif a={a:g} b={b:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g}",
    )


def negunif_unif(width_v: float = 1.5, width_h: float = 1.0, p_split_v: float = 0.0,
                 p_split_h: float = 0.0, q_turn: float = 0.0) -> ModelPreset:
    """Uniform densities on [-a, 0] and [0, b]."""
    a, b = float(width_v), float(width_h)

    def kern(s, rng):
        lo, hi = max(0.0, s), min(b, s + a)
        if hi <= lo:
            raise ImpossibleEventError(f"total {s!r} outside (-{a:g}, {b:g})")
        return float(rng.uniform(lo, hi))

    rate_v = lambda s: min((a + s) / b, 1.0) if -a < s < 0.0 else 0.0
    rate_h = lambda s: min((b - s) / a, 1.0) if 0.0 < s < b else 0.0
    eps_a, eps_b = a / 200.0, b / 200.0
    return _finish(
        "negunif-unif", uniform_measure(-a, 0.0), uniform_measure(0.0, b),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=0.0,
        summary=f"uniform densities on [-{a:g},0] and [0,{b:g}]",
        kernel_label="uniform on the feasible slab",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=np.linspace(-a + eps_a, -eps_a, 100),
        points_h=np.linspace(eps_b, b - eps_b, 100),
        description=f"negunif-unif a={a:g} b={b:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g}",
    )


def geom_geom(q: float = 0.4, p_split_v: float = 0.0, p_split_h: float = 0.0,
              q_turn: float = 0.0, p_0: float = 0.0) -> ModelPreset:
    """Geometric laws on {0,1,...} with the same parameter on both axes."""
    if not 0.0 < q < 1.0:
        raise ParameterError("geometric parameter must lie strictly inside (0, 1)")

    def rate(s):
        k = _int_at(s)
        return (k + 1.0) * q if k is not None and k >= 0 else 0.0

    def kern(s, rng):
        k = _int_at(s)
        if k is None or k < 0:
            raise ImpossibleEventError(f"total {s!r} is not a nonnegative integer")
        return float(rng.integers(0, k + 1))

    nu = geometric(q)
    pts = _atomic_points(nu)
    return _finish(
        "geom-geom", nu, geometric(q),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=p_0,
        summary="matched geometric laws; totals split uniformly",
        kernel_label="uniform on {0..total}",
        rate_v=rate, rate_h=rate, kernel=kern,
        points_v=pts, points_h=pts,
        description=f"geom-geom q={q:g} pv={p_split_v:g} ph={p_split_h:g} qt={q_turn:g} p0={p_0:g}",
    )


def exp_exp(gamma: float = 1.3, p_split_v: float = 0.0, p_split_h: float = 0.0,
            q_turn: float = 0.0) -> ModelPreset:
    """Exponential densities with the same rate on both axes."""

    def kern(s, rng):
        if s <= 0.0:
            raise ImpossibleEventError(f"total {s!r} must be positive")
        return float(rng.uniform(0.0, s))

    rate = lambda s: gamma * s if s > 0.0 else 0.0
    pts = np.linspace(0.05, 8.0 / gamma, 100)
    return _finish(
        "exp-exp", exponential_measure(gamma), exponential_measure(gamma),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=0.0,
        summary="matched exponential densities; totals split uniformly",
        kernel_label="uniform on (0, total)",
        rate_v=rate, rate_h=rate, kernel=kern,
        points_v=pts, points_h=pts,
        description=f"exp-exp gamma={gamma:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g}",
    )


def gamma_gamma(shape_v: float = 2.0, shape_h: float = 3.0, scale: float = 0.7,
                p_split_v: float = 0.0, p_split_h: float = 0.0,
                q_turn: float = 0.0) -> ModelPreset:
    """Gamma densities with a shared scale; totals split by a beta draw."""
    cv = math.gamma(shape_v) / math.gamma(shape_v + shape_h)
    ch = math.gamma(shape_h) / math.gamma(shape_v + shape_h)

    def kern(s, rng):
        if s <= 0.0:
            raise ImpossibleEventError(f"total {s!r} must be positive")
        return float(s * rng.beta(shape_h, shape_v))

    rate_v = lambda s: cv * (s / scale) ** shape_h if s > 0.0 else 0.0
    rate_h = lambda s: ch * (s / scale) ** shape_v if s > 0.0 else 0.0
    pts = np.linspace(0.1 * scale, scale * (6.0 + 2.0 * (shape_v + shape_h)), 100)
    return _finish(
        "gamma-gamma", gamma_measure(shape_v, scale), gamma_measure(shape_h, scale),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=0.0,
        summary="gamma densities with shared scale; beta-split totals",
        kernel_label="total scaled by a beta draw",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=pts, points_h=pts,
        description=f"gamma-gamma kv={shape_v:g} kh={shape_h:g} scale={scale:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g}",
    )


def negber_geom(q_v: float = 0.35, q_h: float = 0.6, p_split_v: float = 0.0,
                p_split_h: float = 0.0, q_turn: float = 0.0, p_0: float = 0.0) -> ModelPreset:
    """Two-point law on {-1, 0} against a geometric law on {0, 1, ...}."""
    if not (0.0 < q_v < 1.0 and 0.0 < q_h < 1.0):
        raise ParameterError("parameters must lie strictly inside (0, 1)")
    pi_up = q_v * (1.0 - q_h) / (1.0 - q_v * q_h)

    def rate_v(s):
        k = _int_at(s)
        if k == -1:
            return q_h
        if k == 0:
            return q_h * (1.0 - q_v * q_h) / (1.0 - q_v)
        return 0.0

    def rate_h(s):
        k = _int_at(s)
        return (1.0 - q_v * q_h) if k is not None and k >= 0 else 0.0

    def kern(s, rng):
        k = _int_at(s)
        if k == -1:
            return 0.0
        if k is None or k < -1:
            raise ImpossibleEventError(f"total {s!r} below -1")
        return float(k + (rng.random() < pi_up))

    nu_h = geometric(q_h)
    return _finish(
        "negber-geom", bernoulli(q_v).negate(), nu_h,
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=p_0,
        summary="a unit-or-nothing vertical law against a geometric horizontal one",
        kernel_label="total plus a coin",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=[-1.0, 0.0],
        points_h=[v for v in _atomic_points(nu_h) if v + 1 <= nu_h.hi],
        description=f"negber-geom qv={q_v:g} qh={q_h:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g} p0={p_0:g}",
    )


def neggeom_geom(q_v: float = 0.4, q_h: float = 0.3, p_split_v: float = 0.0,
                 p_split_h: float = 0.0, q_turn: float = 0.0, p_0: float = 0.0) -> ModelPreset:
    """Geometric laws on the negative and positive lattice halves."""
    if not (0.0 < q_v < 1.0 and 0.0 < q_h < 1.0):
        raise ParameterError("parameters must lie strictly inside (0, 1)")
    beta = q_v + q_h - q_v * q_h

    def rate_v(s):
        k = _int_at(s)
        return q_h / beta if k is not None and k <= 0 else 0.0

    def rate_h(s):
        k = _int_at(s)
        return q_v / beta if k is not None and k >= 0 else 0.0

    def kern(s, rng):
        k = _int_at(s)
        if k is None:
            raise ImpossibleEventError(f"total {s!r} is not an integer")
        return float(max(0, k) + rng.geometric(beta) - 1)

    nu_v = geometric(q_v).negate()
    nu_h = geometric(q_h)
    margin = 20  # keep truncated tails negligible in the lattice sums
    pts_v = [v for v in _atomic_points(nu_v) if v >= nu_v.lo + margin]
    pts_h = [v for v in _atomic_points(nu_h) if v <= nu_h.hi - margin]
    return _finish(
        "neggeom-geom", nu_v, nu_h,
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=p_0,
        summary="opposite-sign geometric laws; constant ratio columns",
        kernel_label="max(0,total) plus a geometric draw",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=pts_v, points_h=pts_h,
        description=f"neggeom-geom qv={q_v:g} qh={q_h:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g} p0={p_0:g}",
    )


def negexp_exp(gamma_v: float = 1.2, gamma_h: float = 0.8, p_split_v: float = 0.0,
               p_split_h: float = 0.0, q_turn: float = 0.0) -> ModelPreset:
    """Exponential densities on opposite half lines."""
    gsum = gamma_v + gamma_h

    def kern(s, rng):
        return float(max(0.0, s) + rng.exponential(1.0 / gsum))

    rate_v = lambda s: gamma_h / gsum if s <= 0.0 else 0.0
    rate_h = lambda s: gamma_v / gsum if s >= 0.0 else 0.0
    return _finish(
        "negexp-exp", exponential_measure(gamma_v).negate(), exponential_measure(gamma_h),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=0.0,
        summary="opposite-sign exponential densities; constant ratio columns",
        kernel_label="max(0,total) plus an exponential draw",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=np.linspace(-8.0 / gamma_v, -0.05, 100),
        points_h=np.linspace(0.05, 8.0 / gamma_h, 100),
        description=f"negexp-exp gv={gamma_v:g} gh={gamma_h:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g}",
    )


def normal_normal(p_split_v: float = 0.0, p_split_h: float = 0.0, q_turn: float = 0.0,
                  mass_v: float = 1.0, mass_h: float = 1.0) -> ModelPreset:
    """Standard normal densities on both axes."""
    sqrt_half = math.sqrt(0.5)

    def kern(s, rng):
        return float(rng.normal(0.5 * s, sqrt_half))

    rate = lambda s: math.exp(0.25 * s * s) / math.sqrt(2.0)
    pts = np.linspace(-3.5, 3.5, 100)
    return _finish(
        "normal", gaussian(mass=mass_v), gaussian(mass=mass_h),
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=0.0,
        summary="standard normal densities on both axes",
        kernel_label="normal(total/2, 1/2)",
        rate_v=rate, rate_h=rate, kernel=kern,
        points_v=pts, points_h=pts,
        description=f"normal pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g} mv={mass_v:g} mh={mass_h:g}",
    )


def poisson_poisson(gamma_v: float = 1.5, gamma_h: float = 0.8, p_split_v: float = 0.0,
                    p_split_h: float = 0.0, q_turn: float = 0.0, p_0: float = 0.0) -> ModelPreset:
    """Poisson laws on {0,1,...}; totals split binomially."""
    frac = gamma_h / (gamma_v + gamma_h)

    def rate_v(s):
        k = _int_at(s)
        return math.exp(-gamma_h) * (1.0 + gamma_h / gamma_v) ** k if k is not None and k >= 0 else 0.0

    def rate_h(s):
        k = _int_at(s)
        return math.exp(-gamma_v) * (1.0 + gamma_v / gamma_h) ** k if k is not None and k >= 0 else 0.0

    def kern(s, rng):
        k = _int_at(s)
        if k is None or k < 0:
            raise ImpossibleEventError(f"total {s!r} is not a nonnegative integer")
        return float(rng.binomial(k, frac))

    nu_v, nu_h = poisson_measure(gamma_v), poisson_measure(gamma_h)
    return _finish(
        "poisson", nu_v, nu_h,
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=p_0,
        summary="poisson laws on both axes; binomial splitting",
        kernel_label="binomial(total, rate fraction)",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=_atomic_points(nu_v), points_h=_atomic_points(nu_h),
        description=f"poisson gv={gamma_v:g} gh={gamma_h:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g} p0={p_0:g}",
    )


def geom_geom_shifted(q_v: float = 0.4, q_h: float = 0.3, p_split_v: float = 0.0,
                      p_split_h: float = 0.0, q_turn: float = 0.0) -> ModelPreset:
    """Geometric laws shifted to start at 1, opposite signs."""
    if not (0.0 < q_v < 1.0 and 0.0 < q_h < 1.0):
        raise ParameterError("parameters must lie strictly inside (0, 1)")
    beta = q_v + q_h - q_v * q_h
    kmax = int(math.ceil(math.log(1e-15) / math.log(1.0 - q_v)))
    pmf_v = {-(k + 1): (1.0 - q_v) ** k * q_v for k in range(kmax + 1)}
    kmax_h = int(math.ceil(math.log(1e-15) / math.log(1.0 - q_h)))
    pmf_h = {k + 1: (1.0 - q_h) ** k * q_h for k in range(kmax_h + 1)}
    nu_v = atomic_measure(1, pmf_v, label=f"neg-shifted-geometric({q_v:g})")
    nu_h = atomic_measure(1, pmf_h, label=f"shifted-geometric({q_h:g})")

    def rate_v(s):
        k = _int_at(s)
        return q_h * (1.0 - q_v) / beta if k is not None and k <= -1 else 0.0

    def rate_h(s):
        k = _int_at(s)
        return q_v * (1.0 - q_h) / beta if k is not None and k >= 1 else 0.0

    def kern(s, rng):
        k = _int_at(s)
        if k is None:
            raise ImpossibleEventError(f"total {s!r} is not an integer")
        return float(max(1, k + 1) + rng.geometric(beta) - 1)

    margin = 20
    return _finish(
        "geometric-lpp1", nu_v, nu_h,
        p_split_v=p_split_v, p_split_h=p_split_h, q_turn=q_turn, p_0=0.0,
        summary="opposite-sign geometric laws started at one",
        kernel_label="max(1,total+1) plus a geometric draw",
        rate_v=rate_v, rate_h=rate_h, kernel=kern,
        points_v=[v for v in _atomic_points(nu_v) if v >= nu_v.lo + margin],
        points_h=[v for v in _atomic_points(nu_h) if v <= nu_h.hi - margin],
        description=f"geometric-lpp1 qv={q_v:g} qh={q_h:g} pv={p_split_v:g} ph={p_split_h:g} q={q_turn:g}",
    )


def generalized_lpp(weights: Mapping[int, float] | None = None, p_0: float = 1.0) -> ModelPreset:
    """Horizontal atoms at positive integers with square-root reweighting.

    ``weights[i]`` must be positive; the horizontal measure puts mass
    proportional to ``sqrt(weights[i])`` at ``i`` and the vertical
    measure is its mirror image.  All crossings have negative or zero
    totals; annihilation happens at zero totals with probability p_0.
    """
    if weights is None:
        weights = {1: 1.0, 2: 1.0, 3: 1.0}
    if not weights or any(w <= 0 for w in weights.values()) or any(int(i) <= 0 for i in weights):
        raise ParameterError("weights must map positive integers to positive values")
    root = {int(i): math.sqrt(w) for i, w in weights.items()}
    z = sum(root.values())
    pmf = {i: r / z for i, r in root.items()}
    nu_h = atomic_measure(1, pmf, label="root-weighted-atoms")
    return _finish(
        "generalized-lpp", nu_h.negate(), nu_h,
        p_split_v=0.0, p_split_h=0.0, q_turn=0.0, p_0=p_0,
        summary="mirrored root-weighted atoms with annihilation at zero totals",
        kernel_label="lattice decomposition of the total",
        rate_v=None, rate_h=None, kernel=None,
        points_v=[], points_h=[],
        description=f"generalized-lpp weights={sorted(weights.items())!r} p0={p_0:g}",
    )


# ---------------------------------------------------------------------------
# registry


def table_families() -> list[ModelPreset]:
    """The non-degenerate closed-form rows, with default parameters."""
    return [
        bullet(),
        ber_ber(),
        negber_ber(),
        unif_unif(),
        negunif_unif(),
        geom_geom(),
        exp_exp(),
        gamma_gamma(),
        negber_geom(),
        neggeom_geom(),
        negexp_exp(),
        normal_normal(),
        poisson_poisson(),
    ]


_UNSUPPORTED = {
    "exp-geom": "pairs a density with a lattice law",
    "negexp-geom": "pairs a density with a lattice law",
}


def _hammersley(value_v=-1, value_h=1, p_0: float = 1.0) -> ModelPreset:
    return dirac_pair(value_v, value_h, p_0=p_0)


def _gaussian_showcase(p_split_v: float = 0.4, p_split_h: float = 0.4,
                       q_turn: float = 0.1, mass_v: float = 1.0,
                       mass_h: float = 1.0) -> ModelPreset:
    return normal_normal(p_split_v=p_split_v, p_split_h=p_split_h,
                         q_turn=q_turn, mass_v=mass_v, mass_h=mass_h)


def _discrete_hammersley(q_v: float = 0.35, q_h: float = 0.6,
                         p_0: float = 1.0) -> ModelPreset:
    return negber_geom(q_v=q_v, q_h=q_h, p_0=p_0)


_PRESETS: dict[str, Callable[..., ModelPreset]] = {
    "bullet": bullet,
    "hammersley": _hammersley,
    "gaussian": _gaussian_showcase,
    "exponential-lpp": negexp_exp,
    "geometric-lpp": neggeom_geom,
    "geometric-lpp1": geom_geom_shifted,
    "discrete-hammersley": _discrete_hammersley,
    "generalized-lpp": generalized_lpp,
    "ber-ber": ber_ber,
    "negber-ber": negber_ber,
    "unif-unif": unif_unif,
    "negunif-unif": negunif_unif,
    "geom-geom": geom_geom,
    "exp-exp": exp_exp,
    "gamma-gamma": gamma_gamma,
    "negber-geom": negber_geom,
    "neggeom-geom": neggeom_geom,
    "negexp-exp": negexp_exp,
    "normal": normal_normal,
    "poisson": poisson_poisson,
}


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def preset(name: str, **kwargs) -> ModelPreset:
    """Look up a named model, applying keyword overrides to its builder."""
    key = name.strip().lower()
    if key in _UNSUPPORTED:
        raise UnsupportedModelError(
            f"model {name!r} is not supported: it {_UNSUPPORTED[key]}, and mixed "
            "continuous and atomic intensity measures are not supported"
        )
    try:
        builder = _PRESETS[key]
    except KeyError:
        raise UnsupportedModelError(
            f"unknown model {name!r}; available: {', '.join(preset_names())}"
        ) from None
    try:
        got = builder(**kwargs)
    except TypeError as exc:
        raise ParameterError(f"bad arguments for model {name!r}: {exc}") from None
    if key != got.name:
        got = ModelPreset(
            name=key,
            params=got.params,
            summary=got.summary,
            kernel_label=got.kernel_label,
            closed_rate_v=got.closed_rate_v,
            closed_rate_h=got.closed_rate_h,
            points_v=got.points_v,
            points_h=got.points_h,
        )
    return got


# ---------------------------------------------------------------------------
# square-ice export for the two-atom models


_ARROW_TO_TYPE = {
    # (south edge, west edge, north edge, east edge) arrow directions
    ("N", "E", "N", "E"): 1,
    ("S", "W", "S", "W"): 2,
    ("S", "E", "S", "E"): 3,
    ("N", "W", "N", "W"): 4,
    ("S", "E", "N", "W"): 5,
    ("N", "W", "S", "E"): 6,
}


def _two_atom_high(nu: IntensityMeasure) -> float:
    vals = [nu.value_of(k) for k in nu._indices]
    if len(vals) != 2:
        raise UnsupportedModelError(
            "square-ice export needs exactly two atoms per measure"
        )
    return max(vals)


def six_vertex_types(drawing, params: SystemParams) -> list[tuple[float, float, int]]:
    """Classify every four-way crossing of a two-atom drawing.

    The edge carrying the larger atom gets the north (vertical) or east
    (horizontal) arrow.  Returns ``(x, y, type)`` triples with the
    conventional numbering: 1/2 both lines keep their class, 3/4 both
    edges point with/against the axes, 5/6 the classes trade places.
    """
    high_v = _two_atom_high(params.nu_v)
    high_h = _two_atom_high(params.nu_h)
    out = []
    for node in drawing.nodes:
        if node.kind != "CC":
            continue
        seg = {d: drawing.segments[i] for d, i in node.adj.items()}
        arrows = (
            "N" if abs(seg["S"].s - high_v) <= _TOL else "S",
            "E" if abs(seg["W"].s - high_h) <= _TOL else "W",
            "N" if abs(seg["N"].s - high_v) <= _TOL else "S",
            "E" if abs(seg["E"].s - high_h) <= _TOL else "W",
        )
        try:
            out.append((node.x, node.y, _ARROW_TO_TYPE[arrows]))
        except KeyError:
            raise ImpossibleEventError(
                f"crossing at ({node.x:g},{node.y:g}) violates arrow conservation"
            ) from None
    return out


def six_vertex_weights(params: SystemParams) -> tuple[float, ...]:
    """Vertex weights (w1..w6) of the square-ice measure matching ``params``.

    Only the two flavors of two-atom models have this correspondence:
    atoms {0,1}/{0,1} and atoms {-1,0}/{0,1}.
    """
    if params.kind != "atomic":
        raise UnsupportedModelError("square-ice weights need atomic measures")
    vals_v = sorted(params.nu_v.value_of(k) for k in params.nu_v._indices)
    vals_h = sorted(params.nu_h.value_of(k) for k in params.nu_h._indices)
    if len(vals_v) != 2 or len(vals_h) != 2 or vals_h != [0.0, 1.0]:
        raise UnsupportedModelError("square-ice weights need two atoms per axis")
    q_h = params.nu_h.mass_at(1.0) / params.nu_h.total_mass
    if vals_v == [0.0, 1.0]:
        q_v = params.nu_v.mass_at(1.0) / params.nu_v.total_mass
        w12 = q_v + q_h - 2.0 * q_v * q_h
        return (w12, w12, q_h * (1.0 - q_v), q_v * (1.0 - q_h),
                q_v * (1.0 - q_h), q_h * (1.0 - q_v))
    if vals_v == [-1.0, 0.0]:
        q_v = params.nu_v.mass_at(-1.0) / params.nu_v.total_mass
        w12 = 1.0 - q_v - q_h + 2.0 * q_v * q_h
        w45 = (1.0 - q_v) * (1.0 - q_h)
        return (w12, w12, q_v * q_h, w45, w45, q_v * q_h)
    raise UnsupportedModelError("square-ice weights need atoms {0,1} or {-1,0}")
