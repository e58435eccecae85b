"""Intensity measures and the local rates they induce.

A system is described by two finite measures on the real line (one for
vertical line intensities, one for horizontal), a pair of split
probability functions ``p_v``, ``p_h``, a turn rate function ``q`` and a
contact annihilation probability ``p_0``.  Both measures must be of the
same kind: either absolutely continuous with a density, or purely atomic
on a rational lattice.  Everything downstream (event rates, crossing
kernels, expected node counts) is derived from this data.

Densities and masses stored here are *unnormalized*: ``density``
integrates to ``total_mass`` and ``pmf`` values sum to it.  Samplers and
CDFs, by contrast, describe the normalized probability law.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Mapping

import numpy as np
from scipy import stats as _stats
from scipy.integrate import quad

from .errors import ImpossibleEventError, ParameterError, UnsupportedModelError

__all__ = [
    "IntensityMeasure",
    "SystemParams",
    "Convolution",
    "gaussian",
    "exponential_measure",
    "uniform_measure",
    "gamma_measure",
    "dirac",
    "bernoulli",
    "geometric",
    "poisson_measure",
    "atomic_measure",
    "convolution",
    "split_rate_vertical",
    "split_rate_horizontal",
    "turn_rate_vertical",
    "turn_rate_horizontal",
    "crossing_kernel_sample",
    "crossing_kernel_pmf",
    "crossing_kernel_table",
    "validate",
    "tilted",
]

# Quadrature accuracy used for every integral in the package.
QUAD_OPTS = {"epsabs": 1e-12, "epsrel": 1e-9, "limit": 200}

# Atoms are matched up to this absolute slack; all lattice values are
# floats obtained from exact fractions, so real mismatches are huge
# compared to this.
LATTICE_TOL = 1e-9

_TAIL_CUTOFF = 1e-15  # truncation level for infinite-support pmfs


def _as_batch(s) -> tuple[np.ndarray, bool]:
    arr = np.asarray(s, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1), True
    return arr, False


@dataclass(frozen=True, eq=False)
class IntensityMeasure:
    """A finite measure on the line, continuous or atomic.

    ``density`` (continuous case) must accept numpy arrays as well as
    scalars.  ``pmf`` (atomic case) maps lattice indices ``k`` to the
    mass at ``step * k``.  ``lo``/``hi`` bound the support; for
    unbounded densities they are a hull beyond which the density
    underflows to zero.
    """

    label: str
    kind: str  # "continuous" | "atomic"
    total_mass: float
    lo: float
    hi: float
    density: Callable[[np.ndarray], np.ndarray] | None = None
    cdf: Callable[[float], float] | None = None
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None
    step: Fraction | None = None
    pmf: Mapping[int, float] | None = field(default=None)
    # true interval support of a continuous measure; may reach infinity
    # where lo/hi are only a finite quadrature hull
    support: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("continuous", "atomic"):
            raise ParameterError(f"unknown measure kind {self.kind!r}")
        if not (math.isfinite(self.total_mass) and self.total_mass > 0):
            raise ParameterError(f"total mass must be positive, got {self.total_mass!r}")
        if self.kind == "continuous" and self.density is None:
            raise ParameterError("continuous measure needs a density")
        if self.kind == "continuous" and self.support is None:
            object.__setattr__(self, "support", (self.lo, self.hi))
        if self.kind == "atomic":
            if not self.pmf or self.step is None or self.step <= 0:
                raise ParameterError("atomic measure needs a positive step and atoms")
            if any(m < 0 for m in self.pmf.values()):
                raise ParameterError("atom masses must be nonnegative")

    # -- atomic support helpers ------------------------------------------

    @cached_property
    def _indices(self) -> tuple[int, ...]:
        return tuple(sorted(k for k, m in self.pmf.items() if m > 0))

    @cached_property
    def _values(self) -> np.ndarray:
        return np.array([self.value_of(k) for k in self._indices])

    @cached_property
    def _probs(self) -> np.ndarray:
        w = np.array([self.pmf[k] for k in self._indices], dtype=float)
        return w / w.sum()

    def value_of(self, k: int) -> float:
        return float(self.step * k)

    def index_of(self, s: float) -> int | None:
        """Lattice index of ``s``, or None when off-lattice."""
        step = float(self.step)
        k = round(s / step)
        if abs(s - k * step) <= LATTICE_TOL * max(1.0, abs(s)):
            return k
        return None

    def support_values(self) -> np.ndarray:
        return self._values

    # -- weights ----------------------------------------------------------

    def density_at(self, s: float) -> float:
        if self.kind != "continuous":
            raise ParameterError(f"{self.label}: density_at on an atomic measure")
        return float(self.density(s))

    def mass_at(self, s: float) -> float:
        if self.kind != "atomic":
            raise ParameterError(f"{self.label}: mass_at on a continuous measure")
        k = self.index_of(s)
        if k is None:
            return 0.0
        return float(self.pmf.get(k, 0.0))

    def weight(self, s: float) -> float:
        """Unnormalized density value or atom mass at ``s``."""
        if self.kind == "continuous":
            return float(self.density(s))
        return self.mass_at(s)

    # -- sampling and summaries -------------------------------------------

    def sample(self, rng: np.random.Generator, n: int | None = None):
        """Draw from the normalized law. Scalar float when ``n`` is None."""
        size = 1 if n is None else n
        if self.sampler is not None:
            out = np.asarray(self.sampler(rng, size), dtype=float)
        elif self.kind == "atomic":
            idx = rng.choice(len(self._values), size=size, p=self._probs)
            out = self._values[idx]
        else:
            raise ParameterError(f"{self.label}: no sampler available")
        return float(out[0]) if n is None else out

    def mean(self) -> float:
        if self.kind == "atomic":
            return float(np.dot(self._values, self._probs))
        val, _err, *_ = quad(
            lambda s: s * float(self.density(s)), self.lo, self.hi,
            full_output=1, **QUAD_OPTS,
        )
        return val / self.total_mass

    def negate(self) -> "IntensityMeasure":
        """Pushforward under ``s -> -s``."""
        if self.kind == "atomic":
            return IntensityMeasure(
                label=f"neg({self.label})",
                kind="atomic",
                total_mass=self.total_mass,
                lo=-self.hi,
                hi=-self.lo,
                step=self.step,
                pmf={-k: m for k, m in self.pmf.items()},
            )
        base_density = self.density
        base_cdf = self.cdf
        base_sampler = self.sampler
        return IntensityMeasure(
            label=f"neg({self.label})",
            kind="continuous",
            total_mass=self.total_mass,
            lo=-self.hi,
            hi=-self.lo,
            density=lambda s: base_density(-np.asarray(s, dtype=float)),
            cdf=None if base_cdf is None else (lambda s: 1.0 - base_cdf(-s)),
            sampler=None if base_sampler is None else (lambda rng, n: -base_sampler(rng, n)),
            support=(-self.support[1], -self.support[0]),
        )

    def __repr__(self) -> str:  # keep reprs short in assertion messages
        return f"IntensityMeasure({self.label}, {self.kind}, mass={self.total_mass:g})"


# ---------------------------------------------------------------------------
# constructors


def gaussian(mass: float = 1.0, mean: float = 0.0, sd: float = 1.0) -> IntensityMeasure:
    if sd <= 0:
        raise ParameterError("gaussian sd must be positive")
    c = mass / (sd * math.sqrt(2.0 * math.pi))

    def dens(s):
        arr = np.asarray(s, dtype=float)
        return c * np.exp(-0.5 * ((arr - mean) / sd) ** 2)

    frozen = _stats.norm(loc=mean, scale=sd)
    return IntensityMeasure(
        label=f"gaussian(mean={mean:g}, sd={sd:g})",
        kind="continuous",
        total_mass=mass,
        lo=mean - 40.0 * sd,
        hi=mean + 40.0 * sd,
        density=dens,
        cdf=frozen.cdf,
        sampler=lambda rng, n: rng.normal(mean, sd, size=n),
        support=(-math.inf, math.inf),
    )


def exponential_measure(rate: float, mass: float = 1.0) -> IntensityMeasure:
    """Exponential density ``rate * exp(-rate*s)`` on the positive half line."""
    if rate <= 0:
        raise ParameterError("exponential rate must be positive")

    def dens(s):
        arr, scalar = _as_batch(s)
        out = np.zeros_like(arr)
        pos = arr >= 0
        out[pos] = mass * rate * np.exp(-rate * arr[pos])
        return out[0] if scalar else out

    return IntensityMeasure(
        label=f"exponential(rate={rate:g})",
        kind="continuous",
        total_mass=mass,
        lo=0.0,
        hi=800.0 / rate,
        density=dens,
        cdf=lambda s: 0.0 if s < 0 else 1.0 - math.exp(-rate * s),
        sampler=lambda rng, n: rng.exponential(1.0 / rate, size=n),
        support=(0.0, math.inf),
    )


def uniform_measure(lo: float, hi: float, mass: float = 1.0) -> IntensityMeasure:
    if not hi > lo:
        raise ParameterError("uniform needs hi > lo")
    h = mass / (hi - lo)

    def dens(s):
        arr = np.asarray(s, dtype=float)
        return np.where((arr >= lo) & (arr <= hi), h, 0.0)

    return IntensityMeasure(
        label=f"uniform({lo:g}, {hi:g})",
        kind="continuous",
        total_mass=mass,
        lo=lo,
        hi=hi,
        density=dens,
        cdf=lambda s: min(1.0, max(0.0, (s - lo) / (hi - lo))),
        sampler=lambda rng, n: rng.uniform(lo, hi, size=n),
    )


def gamma_measure(shape: float, scale: float = 1.0, mass: float = 1.0) -> IntensityMeasure:
    if shape <= 0 or scale <= 0:
        raise ParameterError("gamma shape and scale must be positive")
    c = mass / (math.gamma(shape) * scale**shape)

    def dens(s):
        arr, scalar = _as_batch(s)
        out = np.zeros_like(arr)
        pos = arr > 0
        sp = arr[pos]
        out[pos] = c * sp ** (shape - 1.0) * np.exp(-sp / scale)
        return out[0] if scalar else out

    frozen = _stats.gamma(shape, scale=scale)
    return IntensityMeasure(
        label=f"gamma(shape={shape:g}, scale={scale:g})",
        kind="continuous",
        total_mass=mass,
        lo=0.0,
        hi=scale * (800.0 + 20.0 * shape),
        density=dens,
        cdf=frozen.cdf,
        sampler=lambda rng, n: rng.gamma(shape, scale, size=n),
        support=(0.0, math.inf),
    )


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # floats are exact binary fractions
    raise ParameterError(f"cannot place {value!r} on a rational lattice")


def dirac(value, mass: float = 1.0) -> IntensityMeasure:
    v = _fraction(value)
    step = abs(v) if v != 0 else Fraction(1)
    k = int(v / step)
    return IntensityMeasure(
        label=f"dirac({float(v):g})",
        kind="atomic",
        total_mass=mass,
        lo=float(v),
        hi=float(v),
        step=step,
        pmf={k: mass},
    )


def bernoulli(p: float, mass: float = 1.0) -> IntensityMeasure:
    """Mass ``p`` at 1 and ``1 - p`` at 0."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError("bernoulli parameter must lie in [0, 1]")
    pmf = {}
    if p < 1.0:
        pmf[0] = mass * (1.0 - p)
    if p > 0.0:
        pmf[1] = mass * p
    return IntensityMeasure(
        label=f"bernoulli({p:g})",
        kind="atomic",
        total_mass=mass,
        lo=min(pmf),
        hi=max(pmf),
        step=Fraction(1),
        pmf=pmf,
    )


def geometric(p: float, mass: float = 1.0) -> IntensityMeasure:
    """Geometric law on {0, 1, 2, ...} with success probability ``p``.

    The tail is truncated once it drops below 1e-15 of the mass; the
    stored total reflects the truncation so that sums stay consistent.
    """
    if not 0.0 < p <= 1.0:
        raise ParameterError("geometric parameter must lie in (0, 1]")
    if p == 1.0:
        pmf = {0: mass}
    else:
        kmax = int(math.ceil(math.log(_TAIL_CUTOFF) / math.log(1.0 - p)))
        pmf = {k: mass * (1.0 - p) ** k * p for k in range(kmax + 1)}
    return IntensityMeasure(
        label=f"geometric({p:g})",
        kind="atomic",
        total_mass=sum(pmf.values()),
        lo=0.0,
        hi=float(max(pmf)),
        step=Fraction(1),
        pmf=pmf,
    )


def poisson_measure(lam: float, mass: float = 1.0) -> IntensityMeasure:
    if lam <= 0:
        raise ParameterError("poisson parameter must be positive")
    pmf: dict[int, float] = {}
    term = math.exp(-lam)
    k = 0
    while True:
        pmf[k] = mass * term
        k += 1
        term *= lam / k
        if k > lam and term < _TAIL_CUTOFF:
            break
    return IntensityMeasure(
        label=f"poisson({lam:g})",
        kind="atomic",
        total_mass=sum(pmf.values()),
        lo=0.0,
        hi=float(max(pmf)),
        step=Fraction(1),
        pmf=pmf,
    )


def atomic_measure(step, masses: Mapping[int, float], label: str | None = None) -> IntensityMeasure:
    """Generic atomic measure: ``masses[k]`` sits at ``step * k``."""
    st = _fraction(step)
    if st <= 0:
        raise ParameterError("lattice step must be positive")
    pmf = {int(k): float(m) for k, m in masses.items() if m > 0}
    if not pmf:
        raise ParameterError("atomic measure needs at least one atom")
    return IntensityMeasure(
        label=label or f"atomic(step={float(st):g}, {len(pmf)} atoms)",
        kind="atomic",
        total_mass=sum(pmf.values()),
        lo=float(st * min(pmf)),
        hi=float(st * max(pmf)),
        step=st,
        pmf=pmf,
    )


def tilted(nu: IntensityMeasure, r: float) -> IntensityMeasure:
    """Exponential tilt: weight at ``s`` multiplied by ``r ** s``.

    Rates and crossing kernels are invariant under applying the same
    tilt to both measures; this constructor exists to test exactly that.
    The result has no sampler.
    """
    if r <= 0:
        raise ParameterError("tilt factor must be positive")
    if nu.kind == "atomic":
        pmf = {k: m * r ** nu.value_of(k) for k, m in nu.pmf.items()}
        return IntensityMeasure(
            label=f"tilt({r:g})*{nu.label}",
            kind="atomic",
            total_mass=sum(pmf.values()),
            lo=nu.lo,
            hi=nu.hi,
            step=nu.step,
            pmf=pmf,
        )
    base = nu.density
    lnr = math.log(r)

    def dens(s):
        arr = np.asarray(s, dtype=float)
        return np.exp(lnr * arr) * base(arr)

    mass, _err, *_ = quad(lambda s: float(dens(s)), nu.lo, nu.hi, full_output=1, **QUAD_OPTS)
    return IntensityMeasure(
        label=f"tilt({r:g})*{nu.label}",
        kind="continuous",
        total_mass=mass,
        lo=nu.lo,
        hi=nu.hi,
        density=dens,
        support=nu.support,
    )


# ---------------------------------------------------------------------------
# convolution


class Convolution:
    """Convolution of the two intensity measures, unnormalized.

    For continuous measures values are computed by quadrature on demand
    and cached.  For atomic measures the full table of atoms is built
    eagerly (supports are finite after truncation); lattice steps of the
    two factors need not agree.
    """

    def __init__(self, nu_v: IntensityMeasure, nu_h: IntensityMeasure):
        if nu_v.kind != nu_h.kind:
            raise UnsupportedModelError(
                "mixed continuous and atomic intensity measures are not supported"
            )
        self.nu_v = nu_v
        self.nu_h = nu_h
        self.kind = nu_v.kind
        self.total_mass = nu_v.total_mass * nu_h.total_mass
        self.lo = nu_v.lo + nu_h.lo
        self.hi = nu_v.hi + nu_h.hi
        self._cache: dict[float, float] = {}
        if self.kind == "atomic":
            table: dict[Fraction, float] = {}
            for kh, mh in nu_h.pmf.items():
                if mh <= 0:
                    continue
                th = nu_h.step * kh
                for kv, mv in nu_v.pmf.items():
                    if mv <= 0:
                        continue
                    key = th + nu_v.step * kv
                    table[key] = table.get(key, 0.0) + mh * mv
            pairs = sorted((float(v), m) for v, m in table.items())
            self._atom_values = np.array([v for v, _ in pairs])
            self._atom_masses = np.array([m for _, m in pairs])

    def items(self) -> list[tuple[float, float]]:
        """Atoms of the convolution as (value, mass) pairs, sorted."""
        if self.kind != "atomic":
            raise ParameterError("items() is only defined for atomic measures")
        return list(zip(self._atom_values.tolist(), self._atom_masses.tolist()))

    def __call__(self, s: float) -> float:
        if self.kind == "atomic":
            i = bisect_left(self._atom_values, s - LATTICE_TOL)
            if i < len(self._atom_values) and abs(self._atom_values[i] - s) <= LATTICE_TOL * max(1.0, abs(s)):
                return float(self._atom_masses[i])
            return 0.0
        hit = self._cache.get(s)
        if hit is not None:
            return hit
        gv, gh = self.nu_v, self.nu_h
        t_lo = max(gh.lo, s - gv.hi)
        t_hi = min(gh.hi, s - gv.lo)
        if t_hi <= t_lo:
            val = 0.0
        else:
            val, _err, *_ = quad(
                lambda t: float(gv.density(s - t)) * float(gh.density(t)),
                t_lo, t_hi, full_output=1, **QUAD_OPTS,
            )
            val = max(val, 0.0)
        self._cache[s] = val
        return val


def convolution(nu_v: IntensityMeasure, nu_h: IntensityMeasure) -> Convolution:
    return Convolution(nu_v, nu_h)


# ---------------------------------------------------------------------------
# system parameters


@dataclass(frozen=True, eq=False)
class SystemParams:
    """Full parameter bundle for one line system.

    ``p_v``, ``p_h`` and ``q`` take the real intensity value (sum of the
    two parts at a crossing for the split functions).  ``ratio_v`` and
    ``ratio_h``, when provided, are closed forms for the unnormalized
    convolution divided by the respective density; they bypass
    quadrature in the hot path.  ``kernel``, when provided, samples the
    horizontal part of a crossing with total intensity ``s``.
    """

    nu_v: IntensityMeasure
    nu_h: IntensityMeasure
    p_v: Callable[[float], float]
    p_h: Callable[[float], float]
    q: Callable[[float], float]
    p_0: float = 0.0
    description: str = ""
    ratio_v: Callable[[float], float] | None = None
    ratio_h: Callable[[float], float] | None = None
    kernel: Callable[[float, np.random.Generator], float] | None = None

    @cached_property
    def conv(self) -> Convolution:
        return Convolution(self.nu_v, self.nu_h)

    @cached_property
    def kind(self) -> str:
        return self.nu_v.kind

    @cached_property
    def digest(self) -> str:
        import hashlib

        return hashlib.sha256(self.description.encode()).hexdigest()[:12]

    @cached_property
    def _kernel_cache(self) -> dict:
        return {}


# ---------------------------------------------------------------------------
# rates


def split_rate_vertical(params: SystemParams, s: float) -> float:
    """Rate at which a vertical line of intensity ``s`` splits, per unit length."""
    w = params.nu_v.weight(s)
    if w <= 0.0:
        return 0.0
    p = params.p_v(s)
    if p <= 0.0:
        return 0.0
    ratio = params.ratio_v(s) if params.ratio_v is not None else params.conv(s) / w
    return p * ratio


def split_rate_horizontal(params: SystemParams, s: float) -> float:
    w = params.nu_h.weight(s)
    if w <= 0.0:
        return 0.0
    p = params.p_h(s)
    if p <= 0.0:
        return 0.0
    ratio = params.ratio_h(s) if params.ratio_h is not None else params.conv(s) / w
    return p * ratio


def turn_rate_vertical(params: SystemParams, s: float) -> float:
    """Rate at which a vertical line of intensity ``s`` turns east."""
    wv = params.nu_v.weight(s)
    if wv <= 0.0:
        return 0.0
    wh = params.nu_h.weight(s)
    if wh <= 0.0:
        return 0.0
    return params.q(s) * math.sqrt(wh / wv)


def turn_rate_horizontal(params: SystemParams, s: float) -> float:
    wh = params.nu_h.weight(s)
    if wh <= 0.0:
        return 0.0
    wv = params.nu_v.weight(s)
    if wv <= 0.0:
        return 0.0
    return params.q(s) * math.sqrt(wv / wh)


# ---------------------------------------------------------------------------
# crossing kernel: law of the horizontal part given the total intensity


def crossing_kernel_pmf(params: SystemParams, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Atomic kernel at total ``s``: possible horizontal parts and their probs."""
    if params.kind != "atomic":
        raise ParameterError("crossing_kernel_pmf needs atomic measures")
    key = round(s, 9)
    hit = params._kernel_cache.get(key)
    if hit is not None:
        return hit
    values = []
    weights = []
    for kh in params.nu_h._indices:
        t = params.nu_h.value_of(kh)
        wv = params.nu_v.weight(s - t)
        if wv > 0.0:
            values.append(t)
            weights.append(params.nu_h.pmf[kh] * wv)
    if not values:
        raise ImpossibleEventError(f"no decomposition of total intensity {s!r}")
    vals = np.array(values)
    probs = np.array(weights)
    probs /= probs.sum()
    params._kernel_cache[key] = (vals, probs)
    return vals, probs


def crossing_kernel_table(
    params: SystemParams, s: float, n_start: int = 2048, tol: float = 1e-6
) -> tuple[np.ndarray, np.ndarray]:
    """Gridded CDF of the continuous kernel at total ``s``.

    Returns ``(ts, cdf)`` with the grid refined until the trapezoid mass
    is stable to ``tol`` relative error.
    """
    if params.kind != "continuous":
        raise ParameterError("crossing_kernel_table needs continuous measures")
    gv, gh = params.nu_v, params.nu_h
    t_lo = max(gh.lo, s - gv.hi)
    t_hi = min(gh.hi, s - gv.lo)
    if t_hi <= t_lo:
        raise ImpossibleEventError(f"no decomposition of total intensity {s!r}")
    # clip the slab to where the product weight is non-negligible, so the
    # refinement loop spends its grid where the mass actually sits
    probe = np.linspace(t_lo, t_hi, 4097)
    w = np.asarray(gh.density(probe), dtype=float) * np.asarray(gv.density(s - probe), dtype=float)
    peak = w.max()
    if peak <= 0.0:
        raise ImpossibleEventError(f"kernel has zero mass at total {s!r}")
    nz = np.nonzero(w > 1e-16 * peak)[0]
    t_lo = probe[max(nz[0] - 1, 0)]
    t_hi = probe[min(nz[-1] + 1, len(probe) - 1)]
    n = n_start
    prev_total = None
    while True:
        ts = np.linspace(t_lo, t_hi, n)
        w = np.asarray(gh.density(ts), dtype=float) * np.asarray(gv.density(s - ts), dtype=float)
        dt = ts[1] - ts[0]
        cum = np.concatenate([[0.0], np.cumsum((w[1:] + w[:-1]) * (0.5 * dt))])
        total = cum[-1]
        if total <= 0.0:
            raise ImpossibleEventError(f"kernel has zero mass at total {s!r}")
        if prev_total is not None and abs(total - prev_total) <= tol * total:
            return ts, cum / total
        prev_total = total
        n *= 2
        if n > 1 << 20:
            raise ImpossibleEventError(f"kernel grid failed to converge at total {s!r}")


def crossing_kernel_sample(params: SystemParams, s: float, rng: np.random.Generator) -> float:
    """Sample the horizontal part of a crossing with total intensity ``s``."""
    if params.kernel is not None:
        return float(params.kernel(s, rng))
    if params.kind == "atomic":
        vals, probs = crossing_kernel_pmf(params, s)
        return float(vals[rng.choice(len(vals), p=probs)])
    ts, cdf = crossing_kernel_table(params, s)
    return float(np.interp(rng.random(), cdf, ts))


# ---------------------------------------------------------------------------
# validation


def _probe_points(params: SystemParams, n: int = 10_000) -> np.ndarray:
    if params.kind == "atomic":
        return np.array([v for v, m in params.conv.items() if m > 0])
    return np.linspace(params.conv.lo, params.conv.hi, n)


def _check_split_support(params: SystemParams) -> None:
    # a crossing hands its total to one line with probability p_v/p_h,
    # so a split function must vanish wherever the receiving measure
    # could not carry that intensity
    tol = 1e-9
    if params.kind == "atomic":
        atoms = list(params.conv.items())
        gmax = max((m for _, m in atoms), default=0.0)
        for v, m in atoms:
            if m <= 1e-12 * gmax:
                continue  # tail-truncation dust, unreachable in practice
            s = float(v)
            if params.p_v(s) > 1e-12 and params.nu_v.weight(s) <= 0.0:
                raise ParameterError(
                    f"p_v({s:g}) > 0 but the vertical measure has no atom there"
                )
            if params.p_h(s) > 1e-12 and params.nu_h.weight(s) <= 0.0:
                raise ParameterError(
                    f"p_h({s:g}) > 0 but the horizontal measure has no atom there"
                )
        return
    lo_v, hi_v = params.nu_v.support
    lo_h, hi_h = params.nu_h.support
    for s in np.linspace(params.conv.lo, params.conv.hi, 10_000):
        s = float(s)
        if params.p_v(s) > 1e-12 and not lo_v - tol <= s <= hi_v + tol:
            raise ParameterError(
                f"p_v({s:g}) > 0 outside the support of the vertical measure"
            )
        if params.p_h(s) > 1e-12 and not lo_h - tol <= s <= hi_h + tol:
            raise ParameterError(
                f"p_h({s:g}) > 0 outside the support of the horizontal measure"
            )


def validate(params: SystemParams) -> None:
    """Check the parameter bundle, raising on the first violation."""
    if params.nu_v.kind != params.nu_h.kind:
        raise UnsupportedModelError(
            "mixed continuous and atomic intensity measures are not supported"
        )
    if not 0.0 <= params.p_0 <= 1.0:
        raise ParameterError(f"p_0 must lie in [0, 1], got {params.p_0!r}")
    if params.kind == "continuous" and params.p_0 != 0.0:
        raise ParameterError("contact annihilation requires atomic measures")
    for s in _probe_points(params):
        s = float(s)
        pv = params.p_v(s)
        ph = params.p_h(s)
        qv = params.q(s)
        if not 0.0 <= pv <= 1.0:
            raise ParameterError(f"p_v({s:g}) = {pv!r} is not a probability")
        if not 0.0 <= ph <= 1.0:
            raise ParameterError(f"p_h({s:g}) = {ph!r} is not a probability")
        if pv + ph > 1.0 + 1e-12:
            raise ParameterError(f"p_v + p_h exceeds 1 at s = {s:g} ({pv + ph!r})")
        if not (math.isfinite(qv) and qv >= 0.0):
            raise ParameterError(f"q({s:g}) = {qv!r} must be finite and nonnegative")
    _check_split_support(params)
