"""Event-driven sampler: sweep the box bottom to top.

The state is the set of live vertical lines (columns).  Vertical split
and turn clocks sit in a heap keyed by height; horizontal lines are
resolved instantly within their level by walking east and comparing
exponential split/turn distances against the next live column.  All
heights and columns are kept unique on the dyadic grid so that segment
endpoints meet exactly.

Randomness is consumed in a documented order for a given seed/replica:
bottom entry count, positions, intensities; left entry count,
positions, intensities; bulk pair count and positions; then everything
else strictly in sweep order.  Rates are per unit of physical length,
so normalized distances use ``rate * a`` horizontally and ``rate * b``
vertically.  ``vertical_turn_factor`` scales the vertical turn rate
only; anything but 1.0 breaks the half-turn symmetry on purpose (test
canary).
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_left, bisect_right, insort
from fractions import Fraction

import numpy as np

from .drawing import GRID, Drawing, Segment, classify_nodes, snap_interior
from .errors import SimulationError
from .measures import (
    SystemParams,
    crossing_kernel_sample,
    split_rate_horizontal,
    split_rate_vertical,
    turn_rate_horizontal,
    turn_rate_vertical,
    validate,
)

__all__ = ["simulate"]

_INF = math.inf

# heap ranks: order of events that share a height
_RANK_HENTRY = 0
_RANK_SPAWN = 1
_RANK_CLOCK = 2


class _Particle:
    __slots__ = ("x", "s", "seg_y0", "version", "alive")

    def __init__(self, x: float, s: float, seg_y0: float):
        self.x = x
        self.s = s
        self.seg_y0 = seg_y0
        self.version = 0
        self.alive = True


class _Sweep:
    def __init__(self, params: SystemParams, a: float, b: float, seed: int,
                 replica: int, vertical_turn_factor: float):
        if not (a > 0 and b > 0):
            raise SimulationError("box dimensions must be positive")
        # validate once per params object; the kernel cache doubles as a flag
        if "__checked__" not in params._kernel_cache:
            validate(params)
            params._kernel_cache["__checked__"] = True
        self.params = params
        self.a = float(a)
        self.b = float(b)
        self.seed = int(seed)
        self.replica = int(replica)
        self.factor = float(vertical_turn_factor)
        self.rng = np.random.default_rng(np.random.SeedSequence([self.seed, self.replica]))
        self.segments: list[Segment] = []
        self.diagnostics = {"bump-x": 0, "bump-y": 0}
        self.columns: list[float] = []      # sorted live column positions
        self.col_pid: dict[float, int] = {}
        self.particles: dict[int, _Particle] = {}
        self.next_pid = 0
        self.used_x: set[float] = set()
        self.used_y: set[float] = set()
        self.heap: list = []
        self.seq = 0

    # -- uniqueness guards ------------------------------------------------

    def _fresh(self, v: float, used: set[float], key: str) -> float:
        v = snap_interior(v)
        if v in used:
            self.diagnostics[key] += 1
            tries = 0
            while v in used:
                v += GRID
                if v >= 1.0:
                    v = GRID
                tries += 1
                if tries > 1_000_000:
                    raise SimulationError("dyadic grid exhausted")
        used.add(v)
        return v

    def fresh_x(self, x: float) -> float:
        return self._fresh(x, self.used_x, "bump-x")

    def fresh_y(self, y: float) -> float:
        return self._fresh(y, self.used_y, "bump-y")

    # -- segment and particle bookkeeping ----------------------------------

    def emit_v(self, x: float, y0: float, y1: float, s: float) -> None:
        if not y1 > y0:
            raise SimulationError(f"empty vertical piece at x={x!r}")
        self.segments.append(Segment("v", x, y0, x, y1, s))

    def emit_h(self, y: float, x0: float, x1: float, s: float) -> None:
        if not x1 > x0:
            raise SimulationError(f"empty horizontal piece at y={y!r}")
        self.segments.append(Segment("h", x0, y, x1, y, s))

    def push(self, y: float, x: float, rank: int, payload) -> None:
        self.seq += 1
        heapq.heappush(self.heap, (y, x, rank, self.seq, payload))

    def spawn_particle(self, x: float, s: float, y: float) -> int:
        pid = self.next_pid
        self.next_pid += 1
        self.particles[pid] = _Particle(x, s, y)
        insort(self.columns, x)
        self.col_pid[x] = pid
        self.schedule(pid)
        return pid

    def schedule(self, pid: int) -> None:
        p = self.particles[pid]
        lam = (split_rate_vertical(self.params, p.s)
               + self.factor * turn_rate_vertical(self.params, p.s)) * self.b
        if lam <= 0.0:
            return
        y = p.seg_y0 + self.rng.exponential(1.0 / lam)
        if y < 1.0:
            self.push(y, p.x, _RANK_CLOCK, ("clock", pid, p.version))

    def kill_particle(self, pid: int, y: float) -> None:
        p = self.particles[pid]
        self.emit_v(p.x, p.seg_y0, y, p.s)
        p.alive = False
        del self.columns[bisect_left(self.columns, p.x)]
        del self.col_pid[p.x]

    def retune_particle(self, pid: int, y: float, s: float) -> None:
        """Break the column at ``y`` and continue with intensity ``s``."""
        p = self.particles[pid]
        self.emit_v(p.x, p.seg_y0, y, p.s)
        p.s = s
        p.seg_y0 = y
        p.version += 1
        self.schedule(pid)

    # -- horizontal resolution ---------------------------------------------

    def _event_x(self, x_cur: float, d: float, x_limit: float | None) -> float:
        """Snap ``x_cur + d`` east of ``x_cur`` and west of ``x_limit``."""
        x = snap_interior(x_cur + d)
        if x <= x_cur:
            x = x_cur + GRID
        if x in self.used_x or (x_limit is not None and x >= x_limit):
            self.diagnostics["bump-x"] += 1
            hi = x_limit if x_limit is not None else 1.0
            while x in self.used_x or x >= hi:
                x -= GRID
                if x <= x_cur:
                    raise SimulationError("no free column between events")
        self.used_x.add(x)
        return x

    def propagate(self, y: float, x_cur: float, s_h: float) -> None:
        """Walk a horizontal line east from ``x_cur`` until it dies or exits."""
        params = self.params
        rng = self.rng
        seg_x0 = x_cur
        while True:
            lam_s = split_rate_horizontal(params, s_h) * self.a
            lam_t = turn_rate_horizontal(params, s_h) * self.a
            d_split = rng.exponential(1.0 / lam_s) if lam_s > 0.0 else _INF
            d_turn = rng.exponential(1.0 / lam_t) if lam_t > 0.0 else _INF
            i = bisect_right(self.columns, x_cur)
            x_next = self.columns[i] if i < len(self.columns) else None
            d_own = min(d_split, d_turn)

            if x_next is not None and x_next <= x_cur + d_own:
                # crossing resolves first
                pid = self.col_pid[x_next]
                p = self.particles[pid]
                total = p.s + s_h
                r = rng.random()
                # absorption leaves one line carrying the whole total, so
                # it is only available when that line's measure can hold it
                pv = params.p_v(total) if params.nu_v.weight(total) > 0.0 else 0.0
                ph = params.p_h(total) if params.nu_h.weight(total) > 0.0 else 0.0
                pz = params.p_0 if (params.kind == "atomic" and abs(total) <= 1e-9) else 0.0
                self.emit_h(y, seg_x0, x_next, s_h)
                if r < pv:
                    # horizontal absorbed, column carries the whole total
                    self.retune_particle(pid, y, total)
                    return
                if r < pv + ph:
                    # column absorbed, horizontal carries the whole total
                    self.kill_particle(pid, y)
                    s_h = total
                elif r < pv + ph + pz:
                    # zero total: both halves die
                    self.kill_particle(pid, y)
                    return
                else:
                    # both continue; the total is redecomposed
                    t_new = crossing_kernel_sample(params, total, rng)
                    self.retune_particle(pid, y, total - t_new)
                    s_h = t_new
                seg_x0 = x_cur = x_next
                continue

            if x_cur + d_own >= 1.0:
                self.emit_h(y, seg_x0, 1.0, s_h)
                return

            x_evt = self._event_x(x_cur, d_own, x_next)
            if d_split <= d_turn:
                # shed a vertical line carrying the complement
                t_keep = crossing_kernel_sample(params, s_h, rng)
                self.emit_h(y, seg_x0, x_evt, s_h)
                self.spawn_particle(x_evt, s_h - t_keep, y)
                s_h = t_keep
                seg_x0 = x_cur = x_evt
                continue
            # turn north: the horizontal line becomes a column
            self.emit_h(y, seg_x0, x_evt, s_h)
            self.spawn_particle(x_evt, s_h, y)
            return

    # -- main loop ----------------------------------------------------------

    def run(self) -> Drawing:
        params = self.params
        rng = self.rng
        mv = params.nu_v.total_mass
        mh = params.nu_h.total_mass

        n_bottom = int(rng.poisson(self.a * mv))
        xs = [self.fresh_x(u) for u in rng.random(n_bottom)]
        svals = params.nu_v.sample(rng, n_bottom)
        for x, s in zip(xs, svals):
            self.spawn_particle(x, float(s), 0.0)

        n_left = int(rng.poisson(self.b * mh))
        ys = [self.fresh_y(u) for u in rng.random(n_left)]
        hvals = params.nu_h.sample(rng, n_left)
        for y, s in zip(ys, hvals):
            self.push(y, 0.0, _RANK_HENTRY, ("hentry", float(s)))

        if params.kind == "atomic" and params.p_0 > 0.0:
            rate0 = params.p_0 * params.conv(0.0)
            if rate0 > 0.0:
                n_bulk = int(rng.poisson(self.a * self.b * rate0))
                for _ in range(n_bulk):
                    x, y = rng.random(2)
                    self.push(self.fresh_y(y), x, _RANK_SPAWN, ("spawn", x))

        while self.heap:
            y, _x, rank, _seq, payload = heapq.heappop(self.heap)
            if payload[0] == "hentry":
                self.propagate(y, 0.0, payload[1])
            elif payload[0] == "spawn":
                # the pair carries opposite intensities that sum to zero;
                # y was registered as unique when the event was pushed
                t = crossing_kernel_sample(params, 0.0, rng)
                x = self.fresh_x(payload[1])
                self.spawn_particle(x, 0.0 - t, y)
                self.propagate(y, x, t)
            else:
                _kind, pid, version = payload
                p = self.particles.get(pid)
                if p is None or not p.alive or p.version != version:
                    continue
                yy = self.fresh_y(y)
                lam_s = split_rate_vertical(params, p.s)
                lam_t = self.factor * turn_rate_vertical(params, p.s)
                if lam_s + lam_t <= 0.0:
                    raise SimulationError("clock fired on a silent column")
                if rng.random() < lam_s / (lam_s + lam_t):
                    # shed a horizontal line, keep the complement
                    t_shed = crossing_kernel_sample(params, p.s, rng)
                    x = p.x
                    self.retune_particle(pid, yy, p.s - t_shed)
                    self.propagate(yy, x, t_shed)
                else:
                    x, s = p.x, p.s
                    self.kill_particle(pid, yy)
                    self.propagate(yy, x, s)

        for pid in range(self.next_pid):
            p = self.particles[pid]
            if p.alive:
                self.emit_v(p.x, p.seg_y0, 1.0, p.s)

        step = None
        if params.kind == "atomic":
            sv: Fraction = params.nu_v.step
            sh: Fraction = params.nu_h.step
            step = Fraction(
                math.gcd(sv.numerator * sh.denominator, sh.numerator * sv.denominator),
                sv.denominator * sh.denominator,
            )
        return Drawing(
            a=self.a,
            b=self.b,
            kind=params.kind,
            step=step,
            seed=self.seed,
            replica=self.replica,
            digest=params.digest,
            segments=self.segments,
            nodes=classify_nodes(self.segments),
            diagnostics=self.diagnostics,
        )


def simulate(params: SystemParams, a: float, b: float, seed: int,
             replica: int = 0, vertical_turn_factor: float = 1.0) -> Drawing:
    """Sample one drawing of the line system on an ``a`` by ``b`` box."""
    return _Sweep(params, a, b, seed, replica, vertical_turn_factor).run()
