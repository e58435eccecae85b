"""Statistical verification of the line-system distribution theory.

The theory makes sharp, testable claims about a sampled system:

* exit processes: the lines leaving through the top side form a
  Poisson process with intensity ``Leb x nu_V`` (and the right side
  the same with ``nu_H``), the two independent of each other;
* mean node counts: every node kind has a closed-form expectation
  built from the split, turn, and annihilation parameters;
* cross sections: a straight cut of slope ``-alpha`` meets vertical
  and horizontal lines in two independent Poisson processes whose
  rates carry the factor ``1/sqrt(1 + alpha^2)``;
* reversibility: the drawing rotated by 180 degrees has the same law
  as the original, with node kinds swapped entry-for-exit;
* face limits: the per-face mean number of boundary vertices and of
  corners converge to explicit constants in the large-box limit.

Each battery turns one claim into a list of `CheckResult` rows, using
two-sided z tests for means, Kolmogorov-Smirnov for continuous laws,
chi-square with bin pooling for atomic laws, and a Fisher z test for
independence.  The default significance level is ``ALPHA = 0.001`` per
check; callers may override thresholds where an ensemble's size calls
for it.  All simulation inside a battery is seeded, so a battery run
is reproducible end to end.
"""

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _st
from scipy.integrate import quad

from .drawing import NODE_KINDS, Drawing, boundary, census, rotate180
from .errors import ParameterError
from .faces import build_faces
from .measures import QUAD_OPTS, IntensityMeasure, SystemParams
from .simulate import simulate

ALPHA = 0.001


def _z_crit(alpha: float) -> float:
    return float(_st.norm.isf(alpha / 2.0))


# ---------------------------------------------------------------------------
# closed-form expectations


def _integral_against_conv(params: SystemParams, f) -> float:
    conv = params.conv
    if params.kind == "atomic":
        return float(sum(f(v) * m for v, m in conv.items()))
    cuts = set()
    for nu in (params.nu_v, params.nu_h):
        for edge in nu.support:
            if math.isfinite(edge) and conv.lo < edge < conv.hi:
                cuts.add(edge)
    val, _err, *_ = quad(
        lambda u: f(u) * conv(u),
        conv.lo,
        conv.hi,
        points=sorted(cuts) or None,
        full_output=1,
        **QUAD_OPTS,
    )
    return float(val)


def _turn_integral(params: SystemParams) -> float:
    nu_v, nu_h = params.nu_v, params.nu_h
    if params.kind == "atomic":
        total = 0.0
        for s in nu_v.support_values():
            s = float(s)
            wv = nu_v.weight(s)
            wh = nu_h.weight(s)
            if wv > 0.0 and wh > 0.0:
                total += params.q(s) * math.sqrt(wv * wh)
        return total
    lo = max(nu_v.lo, nu_h.lo)
    hi = min(nu_v.hi, nu_h.hi)
    if hi <= lo:
        return 0.0
    val, _err, *_ = quad(
        lambda s: params.q(s) * math.sqrt(nu_v.weight(s) * nu_h.weight(s)),
        lo,
        hi,
        full_output=1,
        **QUAD_OPTS,
    )
    return float(val)


def expected_node_counts(params: SystemParams, a: float, b: float) -> dict[str, float]:
    """Mean number of each node kind on an ``a`` by ``b`` box."""
    mv, mh = params.nu_v.total_mass, params.nu_h.total_mass
    area = a * b
    ipv = _integral_against_conv(params, params.p_v)
    iph = _integral_against_conv(params, params.p_h)
    iq = _turn_integral(params)
    pairs = area * params.p_0 * params.conv(0.0) if params.kind == "atomic" else 0.0
    return {
        "VE": a * mv,
        "VS": a * mv,
        "HE": b * mh,
        "HS": b * mh,
        "HB": area * ipv,
        "HA": area * ipv,
        "VB": area * iph,
        "VA": area * iph,
        "HT": area * iq,
        "VT": area * iq,
        "OB": pairs,
        "OA": pairs,
        "CC": area * (mv * mh - ipv - iph) - pairs,
    }


def expected_face_count(params: SystemParams, a: float, b: float) -> float:
    """Mean number of faces whose closure avoids the north and east sides."""
    return a * b * params.nu_v.total_mass * params.nu_h.total_mass


def expected_face_limits(params: SystemParams) -> tuple[float, float]:
    """Large-box limits of the per-face mean vertex and corner counts."""
    mv, mh = params.nu_v.total_mass, params.nu_h.total_mass
    ipv = _integral_against_conv(params, params.p_v)
    iph = _integral_against_conv(params, params.p_h)
    iq = _turn_integral(params)
    vertices = 4.0 + (2.0 * ipv + 2.0 * iph + 4.0 * iq) / (mv * mh)
    corners = 4.0 + 4.0 * iq / (mv * mh)
    return vertices, corners


# ---------------------------------------------------------------------------
# replica summaries


@dataclass(frozen=True)
class ReplicaSummary:
    """Everything the batteries need from one sampled drawing."""

    census: dict[str, int]
    top: list[tuple[float, float]]
    right: list[tuple[float, float]]
    total_length: float
    faces_total: int | None = None
    faces_inner: int | None = None
    face_vertices: int | None = None
    face_corners: int | None = None
    cut_v: list[float] | None = None
    cut_h: list[float] | None = None


def summarize(
    drawing: Drawing,
    *,
    with_faces: bool = False,
    cut_slope: float | None = None,
) -> ReplicaSummary:
    length = 0.0
    for seg in drawing.segments:
        if seg.orient == "v":
            length += (seg.y1 - seg.y0) * drawing.b
        else:
            length += (seg.x1 - seg.x0) * drawing.a
    faces_total = faces_inner = face_vertices = face_corners = None
    if with_faces:
        face_set = build_faces(drawing)
        faces_total = len(face_set.faces)
        faces_inner = sum(not f.touches_ne for f in face_set.faces)
        face_vertices = sum(f.vertex_count for f in face_set.faces)
        face_corners = sum(f.corner_count for f in face_set.faces)
    cut_v = cut_h = None
    if cut_slope is not None:
        cut_v, cut_h = _cut_marks(drawing, cut_slope)
    return ReplicaSummary(
        census=census(drawing),
        top=boundary(drawing, "top"),
        right=boundary(drawing, "right"),
        total_length=length,
        faces_total=faces_total,
        faces_inner=faces_inner,
        face_vertices=face_vertices,
        face_corners=face_corners,
        cut_v=cut_v,
        cut_h=cut_h,
    )


def _cut_marks(drawing: Drawing, alpha: float) -> tuple[list[float], list[float]]:
    # physical cut from (0, c) falling at slope -alpha, c = min(b, alpha a)
    if alpha <= 0:
        raise ParameterError("cut slope must be positive")
    a, b = drawing.a, drawing.b
    c = min(b, alpha * a)
    hits_v = []
    hits_h = []
    for seg in drawing.segments:
        if seg.orient == "v":
            level = c - alpha * (seg.x0 * a)
            if seg.y0 * b < level < seg.y1 * b:
                hits_v.append(seg.s)
        else:
            x_star = (c - seg.y0 * b) / alpha
            if seg.x0 * a < x_star < seg.x1 * a:
                hits_h.append(seg.s)
    return hits_v, hits_h


def run_ensemble(
    params: SystemParams,
    a: float,
    b: float,
    replicas: int,
    seed: int,
    *,
    replica_offset: int = 0,
    rotate: bool = False,
    with_faces: bool = False,
    cut_slope: float | None = None,
    vertical_turn_factor: float = 1.0,
) -> list[ReplicaSummary]:
    """Simulate ``replicas`` drawings and summarize each one."""
    out = []
    for r in range(replicas):
        d = simulate(
            params, a, b, seed,
            replica=replica_offset + r,
            vertical_turn_factor=vertical_turn_factor,
        )
        if rotate:
            d = rotate180(d)
        out.append(summarize(d, with_faces=with_faces, cut_slope=cut_slope))
    return out


# ---------------------------------------------------------------------------
# check plumbing


@dataclass(frozen=True)
class CheckResult:
    name: str
    method: str  # mean | ks | chi2 | corr | exact
    statistic: float
    p_value: float | None
    threshold: float
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class StatReport:
    title: str
    model: str
    a: float
    b: float
    replicas: int
    seed: int
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _mean_check(name: str, values, expected: float, z_threshold: float) -> CheckResult:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    if sd == 0.0:
        gap = abs(mean - expected)
        return CheckResult(
            name, "mean", math.inf if gap > 1e-12 else 0.0, None, z_threshold,
            gap <= 1e-12, f"mean={mean:.6g} expected={expected:.6g} (degenerate spread)",
        )
    z = (mean - expected) / (sd / math.sqrt(arr.size))
    return CheckResult(
        name, "mean", z, None, z_threshold, abs(z) <= z_threshold,
        f"mean={mean:.6g} expected={expected:.6g} se={sd / math.sqrt(arr.size):.3g}",
    )


def _exact_zero_check(name: str, values) -> CheckResult:
    total = float(np.sum(values))
    return CheckResult(
        name, "exact", total, None, 0.0, total == 0.0,
        "expected exactly zero occurrences",
    )


def _ks_check(name: str, values, cdf, alpha: float) -> CheckResult:
    if len(values) == 0:
        return CheckResult(name, "ks", math.inf, 0.0, alpha, False, "no samples")
    if callable(cdf):
        scalar = cdf
        cdf = lambda x: np.array([scalar(float(v)) for v in np.atleast_1d(x)])
    stat, p = _st.kstest(values, cdf)
    return CheckResult(name, "ks", float(stat), float(p), alpha, p >= alpha,
                       f"n={len(values)}")


def _pool_bins(observed: np.ndarray, expected: np.ndarray, floor: float = 5.0):
    obs_out, exp_out = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= floor:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0.0:
        if exp_out:
            obs_out[-1] += acc_o
            exp_out[-1] += acc_e
        else:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
    return np.asarray(obs_out), np.asarray(exp_out)


def _chi2_check(name: str, samples, nu: IntensityMeasure, alpha: float) -> CheckResult:
    if len(samples) == 0:
        return CheckResult(name, "chi2", math.inf, 0.0, alpha, False, "no samples")
    idx = [nu.index_of(s) for s in samples]
    if any(k is None for k in idx):
        return CheckResult(name, "chi2", math.inf, 0.0, alpha, False,
                           "sample off the lattice")
    counts = Counter(idx)
    keys = sorted(nu.pmf)
    observed = np.array([counts.pop(k, 0) for k in keys], dtype=float)
    if counts:
        return CheckResult(name, "chi2", math.inf, 0.0, alpha, False,
                           "sample outside the support")
    probs = np.array([nu.pmf[k] for k in keys], dtype=float)
    probs = probs / probs.sum()
    expected = probs * len(samples)
    observed, expected = _pool_bins(observed, expected)
    if len(observed) < 2:
        return CheckResult(name, "chi2", 0.0, 1.0, alpha, True, "single pooled bin")
    stat, p = _st.chisquare(observed, expected)
    return CheckResult(name, "chi2", float(stat), float(p), alpha, p >= alpha,
                       f"n={len(samples)} bins={len(observed)}")


def _mark_law_check(name: str, samples, nu: IntensityMeasure, alpha: float) -> CheckResult:
    if nu.kind == "atomic":
        return _chi2_check(name, samples, nu, alpha)
    if nu.cdf is None:
        raise ParameterError(f"{nu.label} has no distribution function to test against")
    return _ks_check(name, samples, nu.cdf, alpha)


def _independence_check(name: str, xs, ys, alpha: float) -> CheckResult:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = xs.size
    if n < 8 or xs.std() == 0.0 or ys.std() == 0.0:
        return CheckResult(name, "corr", 0.0, 1.0, alpha, True, "degenerate sample")
    r = float(np.corrcoef(xs, ys)[0, 1])
    z = math.atanh(max(-0.999999, min(0.999999, r))) * math.sqrt(n - 3)
    p = 2.0 * _st.norm.sf(abs(z))
    return CheckResult(name, "corr", r, p, alpha, p >= alpha, f"n={n}")


# ---------------------------------------------------------------------------
# batteries


def exit_process_battery(
    summaries: list[ReplicaSummary],
    params: SystemParams,
    a: float,
    b: float,
    *,
    alpha: float = ALPHA,
    count_z: float | None = None,
) -> list[CheckResult]:
    """Exit processes on the top and right sides against their law."""
    count_z = _z_crit(alpha) if count_z is None else count_z
    checks = []
    for side, nu, rate in (("top", params.nu_v, a * params.nu_v.total_mass),
                           ("right", params.nu_h, b * params.nu_h.total_mass)):
        exits = [s.top if side == "top" else s.right for s in summaries]
        counts = [len(e) for e in exits]
        positions = [pos for e in exits for pos, _ in e]
        marks = [mark for e in exits for _, mark in e]
        checks.append(_mean_check(f"{side}-exit-count", counts, rate, count_z))
        checks.append(_ks_check(f"{side}-exit-positions", positions, "uniform", alpha))
        checks.append(_mark_law_check(f"{side}-exit-intensities", marks, nu, alpha))
    checks.append(
        _independence_check(
            "top-right-independence",
            [len(s.top) for s in summaries],
            [len(s.right) for s in summaries],
            alpha,
        )
    )
    return checks


def mean_count_battery(
    summaries: list[ReplicaSummary],
    params: SystemParams,
    a: float,
    b: float,
    *,
    z_threshold: float | None = None,
    alpha: float = ALPHA,
) -> list[CheckResult]:
    """Observed node counts (and face counts, when collected) vs theory."""
    z_threshold = _z_crit(alpha) if z_threshold is None else z_threshold
    expected = expected_node_counts(params, a, b)
    checks = []
    for kind in NODE_KINDS:
        values = [s.census[kind] for s in summaries]
        if expected[kind] == 0.0:
            checks.append(_exact_zero_check(f"count-{kind}", values))
        else:
            checks.append(_mean_check(f"count-{kind}", values, expected[kind], z_threshold))
    if summaries and summaries[0].faces_inner is not None:
        checks.append(
            _mean_check(
                "faces-away-from-north-east",
                [s.faces_inner for s in summaries],
                expected_face_count(params, a, b),
                z_threshold,
            )
        )
    return checks


def cross_section_battery(
    summaries: list[ReplicaSummary],
    params: SystemParams,
    a: float,
    b: float,
    slope: float,
    *,
    alpha: float = ALPHA,
    count_z: float | None = None,
) -> list[CheckResult]:
    """Hits of a slope ``-slope`` cut: rates, mark laws, independence."""
    if any(s.cut_v is None for s in summaries):
        raise ParameterError("summaries were collected without a cut")
    count_z = _z_crit(alpha) if count_z is None else count_z
    c = min(b, slope * a)
    expected_v = params.nu_v.total_mass * c / slope
    expected_h = params.nu_h.total_mass * c
    marks_v = [m for s in summaries for m in s.cut_v]
    marks_h = [m for s in summaries for m in s.cut_h]
    return [
        _mean_check("cut-vertical-count", [len(s.cut_v) for s in summaries],
                    expected_v, count_z),
        _mean_check("cut-horizontal-count", [len(s.cut_h) for s in summaries],
                    expected_h, count_z),
        _mark_law_check("cut-vertical-intensities", marks_v, params.nu_v, alpha),
        _mark_law_check("cut-horizontal-intensities", marks_h, params.nu_h, alpha),
        _independence_check(
            "cut-independence",
            [len(s.cut_v) for s in summaries],
            [len(s.cut_h) for s in summaries],
            alpha,
        ),
    ]


_SWAP_COORDS = 20


def _swap_coordinates(s: ReplicaSummary) -> list[float]:
    coords = [float(s.census[k]) for k in NODE_KINDS]
    for exits in (s.top, s.right):
        if exits:
            qs = np.quantile([pos for pos, _ in exits], [0.25, 0.5, 0.75])
            coords.extend(float(v) for v in qs)
        else:
            coords.extend([0.5, 0.5, 0.5])
    coords.append(s.total_length)
    return coords


def reversibility_battery(
    params: SystemParams,
    a: float,
    b: float,
    replicas: int,
    seed: int,
    *,
    vertical_turn_factor: float = 1.0,
    alpha: float = ALPHA,
) -> list[CheckResult]:
    """Half the ensemble rotated 180 degrees against the untouched half.

    Under the stationary dynamics the rotation preserves the law, so
    every summary coordinate must agree in distribution; each of the
    20 coordinates gets a two-sample Kolmogorov-Smirnov test at a
    Bonferroni-corrected level.
    """
    if replicas < 16:
        raise ParameterError("reversibility needs at least 16 replicas")
    half = replicas // 2
    plain = run_ensemble(
        params, a, b, half, seed, vertical_turn_factor=vertical_turn_factor,
    )
    mirrored = run_ensemble(
        params, a, b, replicas - half, seed, replica_offset=half, rotate=True,
        vertical_turn_factor=vertical_turn_factor,
    )
    names = [f"swap-{k}" for k in NODE_KINDS]
    names += [f"swap-top-q{q}" for q in (25, 50, 75)]
    names += [f"swap-right-q{q}" for q in (25, 50, 75)]
    names += ["swap-length"]
    level = alpha / _SWAP_COORDS
    first = np.array([_swap_coordinates(s) for s in plain])
    second = np.array([_swap_coordinates(s) for s in mirrored])
    checks = []
    for i, name in enumerate(names):
        xs, ys = first[:, i], second[:, i]
        if xs.std() == 0.0 and ys.std() == 0.0 and xs[0] == ys[0]:
            checks.append(CheckResult(name, "ks", 0.0, 1.0, level, True, "degenerate"))
            continue
        stat, p = _st.ks_2samp(xs, ys)
        checks.append(
            CheckResult(name, "ks", float(stat), float(p), level, p >= level,
                        f"n={len(xs)}+{len(ys)}")
        )
    return checks


def face_battery(
    summaries: list[ReplicaSummary],
    params: SystemParams,
    *,
    tol_vertices: float = 0.15,
    tol_corners: float = 0.15,
) -> list[CheckResult]:
    """Pooled per-face means against the large-box limit constants."""
    if any(s.faces_total is None for s in summaries):
        raise ParameterError("summaries were collected without faces")
    limit_v, limit_c = expected_face_limits(params)
    n_faces = sum(s.faces_total for s in summaries)
    mean_v = sum(s.face_vertices for s in summaries) / n_faces
    mean_c = sum(s.face_corners for s in summaries) / n_faces
    return [
        CheckResult("face-mean-vertices", "mean", mean_v - limit_v, None,
                    tol_vertices, abs(mean_v - limit_v) <= tol_vertices,
                    f"mean={mean_v:.4f} limit={limit_v:.4f}"),
        CheckResult("face-mean-corners", "mean", mean_c - limit_c, None,
                    tol_corners, abs(mean_c - limit_c) <= tol_corners,
                    f"mean={mean_c:.4f} limit={limit_c:.4f}"),
    ]


# ---------------------------------------------------------------------------
# orchestration and reporting


def standard_battery(
    params: SystemParams,
    a: float,
    b: float,
    replicas: int,
    seed: int,
    *,
    title: str = "verification",
    with_faces: bool = False,
    cut_slope: float | None = None,
    reversibility: bool = True,
    vertical_turn_factor: float = 1.0,
    alpha: float = ALPHA,
) -> tuple[StatReport, list[ReplicaSummary]]:
    """Run the standard batteries and collect one report."""
    summaries = run_ensemble(
        params, a, b, replicas, seed,
        with_faces=with_faces, cut_slope=cut_slope,
        vertical_turn_factor=vertical_turn_factor,
    )
    checks = []
    checks += exit_process_battery(summaries, params, a, b, alpha=alpha)
    checks += mean_count_battery(summaries, params, a, b, alpha=alpha)
    if cut_slope is not None:
        checks += cross_section_battery(summaries, params, a, b, cut_slope, alpha=alpha)
    if with_faces:
        checks += face_battery(summaries, params)
    if reversibility:
        checks += reversibility_battery(
            params, a, b, replicas, seed + 1,
            vertical_turn_factor=vertical_turn_factor, alpha=alpha,
        )
    report = StatReport(
        title=title,
        model=params.description,
        a=a, b=b, replicas=replicas, seed=seed,
        checks=tuple(checks),
    )
    return report, summaries


def render_report(report: StatReport) -> str:
    """Serialize a report as a tab-delimited document."""
    lines = [
        "klines-report 1",
        f"title\t{report.title}",
        f"model\t{report.model}",
        f"box\ta={report.a:g}\tb={report.b:g}\treplicas={report.replicas}"
        f"\tseed={report.seed}",
        "check\tmethod\tstatistic\tp_value\tthreshold\tpassed\tdetail",
    ]
    for c in report.checks:
        p = "-" if c.p_value is None else f"{c.p_value:.6g}"
        lines.append(
            f"{c.name}\t{c.method}\t{c.statistic:.6g}\t{p}\t{c.threshold:g}"
            f"\t{'yes' if c.passed else 'no'}\t{c.detail}"
        )
    lines.append(f"verdict\t{'pass' if report.passed else 'fail'}")
    lines.append("end")
    return "\n".join(lines) + "\n"
