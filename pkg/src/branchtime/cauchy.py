"""Cauchy problems ``x' = f(x)`` on branched time.

Integration is classical fixed-step RK4.  Every flow is marched on a grid
anchored at its seed, ``t_seed + k*step``, and values at node coordinates
are obtained by one shortened step from the last grid point, so the grid
never restarts at a node.  Because ``f`` is autonomous and scalar, a
connected branched structure carries one flow: every copy of a coordinate
gets the same value.  Sibling branches therefore share samples bitwise,
and a root-to-leaf chain reproduces a plain-line integration exactly.

:func:`solve` walks the segment graph from the first condition, checking
every further condition (and every identification) against the
propagated flow with the rule ``|a - b| <= tol_abs + tol_rel*max(|a|,|b|)``.
"""

from __future__ import annotations

import csv
import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .exprdsl import EvaluationError, Expr, compile_expr, evaluate, parse
from .graph import fmt_real
from .timeline import (
    DEFAULT_HORIZON,
    STICKING,
    Horizon,
    Identification,
    TemporalStructure,
    TimePoint,
    locate,
    split_division,
    topological_segments,
)

__all__ = [
    "SolverConfig",
    "Status",
    "BlowupError",
    "Condition",
    "CauchyProblem",
    "SampledPath",
    "Trajectory",
    "Solution",
    "ConsistencyReport",
    "MultihistoryOutcome",
    "StatePath",
    "Bifurcation",
    "integrate_segment",
    "solve",
    "solve_circle",
    "check_loop_consistency",
    "rewrite_history",
    "dual_continuations",
    "is_bifurcating_pair",
    "write_csv",
]

# grid points closer than this fraction of a step to a target count as the target
_SNAP = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    step: float = 1e-3
    tol_abs: float = 1e-6
    tol_rel: float = 1e-9
    blowup_cap: float = 1e12
    loop_passes: int = 4

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive, got {self.step!r}")
        if not self.tol_abs > 0:
            raise ValueError(f"tol_abs must be positive, got {self.tol_abs!r}")
        if not self.tol_rel >= 0:
            raise ValueError(f"tol_rel must be non-negative, got {self.tol_rel!r}")
        if not self.blowup_cap > 0:
            raise ValueError(f"blowup_cap must be positive, got {self.blowup_cap!r}")
        if self.loop_passes < 1:
            raise ValueError("loop_passes must be at least 1")

    def threshold(self, a: float, b: float) -> float:
        return self.tol_abs + self.tol_rel * max(abs(a), abs(b))

    def agree(self, a: float, b: float) -> tuple[bool, float]:
        gap = abs(a - b)
        return gap <= self.threshold(a, b), gap


class Status(str, enum.Enum):
    WELL_POSED = "WellPosed"
    INCONSISTENT = "InconsistentInitialConditions"
    STICKING_MISMATCH = "StickingMismatch"
    LOOP_INCONSISTENT = "LoopInconsistent"
    BLOWUP = "Blowup"
    UNREACHED = "Unreached"

    def __str__(self):
        return self.value


class BlowupError(ArithmeticError):
    def __init__(self, t: float, x: float, reason: str):
        self.t, self.x = t, x
        super().__init__(f"blow-up near t={t!r} (x={x!r}): {reason}")


# --- RK4 core --------------------------------------------------------------


def _rhs(f: Expr):
    fn = compile_expr(f)

    def rhs(x: float) -> float:
        v = fn(x)
        if not math.isfinite(v):
            raise EvaluationError(f"f({x!r}) is not finite")
        return v

    return rhs


def _rk4(rhs, t: float, x: float, h: float, cap: float) -> float:
    try:
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
    except (EvaluationError, OverflowError, ZeroDivisionError) as exc:
        raise BlowupError(t, x, str(exc)) from None
    y = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not math.isfinite(y) or abs(y) > cap:
        raise BlowupError(t + h, y, f"|x| exceeds {cap!r}")
    return y


def _grid_index(t0: float, h: float, t: float) -> tuple[int, bool]:
    """Index of the last grid point ``t0 + k*h`` not past ``t``, and whether it sits on ``t``."""
    step = abs(h)
    k = int(math.floor(abs(t - t0) / step))
    for cand in (k + 1, k):
        if abs(t - (t0 + cand * h)) <= _SNAP * step:
            return cand, True
    if (t - (t0 + k * h)) * h < 0:  # floor landed one past t through rounding
        k -= 1
    return k, False


class _Grid:
    """RK4 samples ``t0 + k*h`` for ``k = 0..K`` marching from ``t0`` toward ``t_end``."""

    def __init__(self, rhs, t0: float, x0: float, t_end: float, cfg: SolverConfig):
        self.rhs, self.t0, self.cfg = rhs, t0, cfg
        self.h = cfg.step if t_end >= t0 else -cfg.step
        n, _ = _grid_index(t0, self.h, t_end) if t_end != t0 else (0, True)
        xs = [x0]
        x = x0
        for k in range(1, n + 1):
            x = _rk4(rhs, t0 + (k - 1) * self.h, x, self.h, cfg.blowup_cap)
            xs.append(x)
        self.xs = xs

    def time(self, k: int) -> float:
        return self.t0 + k * self.h

    def value_at(self, t: float) -> float:
        if t == self.t0:
            return self.xs[0]
        k, on_grid = _grid_index(self.t0, self.h, t)
        if on_grid:
            return self.xs[k]
        tk = self.time(k)
        return _rk4(self.rhs, tk, self.xs[k], t - tk, self.cfg.blowup_cap)

    def interior(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Grid samples strictly inside ``(lo, hi)``, away from both ends."""
        snap = _SNAP * abs(self.h)
        out = []
        for k in range(len(self.xs)):
            tk = self.time(k)
            if lo + snap < tk < hi - snap:
                out.append((tk, self.xs[k]))
        return out


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Samples in integration order (decreasing ``t`` when retrodicting)."""

    t: np.ndarray
    x: np.ndarray

    @property
    def end(self) -> float:
        return float(self.x[-1])


def integrate_segment(f: Expr, t0: float, x0: float, t1: float, cfg: SolverConfig | None = None) -> SampledPath:
    """Integrate from ``(t0, x0)`` to ``t1`` (either direction).

    Full steps land on ``t0 + k*step``; a final shortened step lands exactly
    on ``t1``.  Raises :class:`BlowupError`.
    """
    cfg = cfg or SolverConfig()
    if not (math.isfinite(t0) and math.isfinite(t1) and math.isfinite(x0)):
        raise ValueError("t0, x0 and t1 must be finite")
    rhs = _rhs(f)
    grid = _Grid(rhs, t0, x0, t1, cfg)
    ts = [grid.time(k) for k in range(len(grid.xs))]
    xs = list(grid.xs)
    if t1 != t0:
        if abs(t1 - ts[-1]) <= _SNAP * cfg.step:
            ts[-1] = t1
        else:
            xs.append(grid.value_at(t1))
            ts.append(t1)
    return SampledPath(np.array(ts), np.array(xs))


class _Flow:
    """One seed's flow over the whole horizon, forward and backward."""

    def __init__(self, rhs, t_seed: float, x_seed: float, horizon: Horizon, cfg: SolverConfig):
        self.t_seed, self.x_seed = t_seed, x_seed
        self.fwd = _Grid(rhs, t_seed, x_seed, horizon.t_max, cfg)
        self.bwd = _Grid(rhs, t_seed, x_seed, horizon.t_min, cfg)

    def value_at(self, t: float) -> float:
        return (self.fwd if t >= self.t_seed else self.bwd).value_at(t)

    def sample(self, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
        if lo == hi:
            return np.array([lo]), np.array([self.value_at(lo)])
        inner = self.bwd.interior(lo, min(hi, self.t_seed))[::-1]
        if lo < self.t_seed < hi:
            inner.append((self.t_seed, self.x_seed))
        inner += self.fwd.interior(max(lo, self.t_seed), hi)
        ts = [lo] + [t for t, _ in inner] + [hi]
        xs = [self.value_at(lo)] + [x for _, x in inner] + [self.value_at(hi)]
        return np.array(ts), np.array(xs)


# --- problems and results --------------------------------------------------


@dataclass(frozen=True)
class Condition:
    point: TimePoint
    x: float


@dataclass(frozen=True)
class CauchyProblem:
    f: Expr
    conditions: tuple[Condition, ...]

    @classmethod
    def of(cls, f, conditions: Iterable) -> "CauchyProblem":
        """Accepts expression text and ``(TimePoint, x)`` pairs."""
        expr = parse(f) if isinstance(f, str) else f
        conds = tuple(c if isinstance(c, Condition) else Condition(c[0], float(c[1])) for c in conditions)
        return cls(expr, conds)

    def check(self, s: TemporalStructure) -> None:
        if not self.conditions:
            raise ValueError("a Cauchy problem needs at least one condition")
        seen = set()
        for c in self.conditions:
            s.check_point(c.point)
            if not math.isfinite(c.x):
                raise ValueError(f"condition value at {c.point} is not finite")
            if c.point in seen:
                raise ValueError(f"two conditions on the same point {c.point}")
            seen.add(c.point)


@dataclass(frozen=True, eq=False)
class Trajectory:
    segment: str
    t: np.ndarray
    x: np.ndarray

    def at(self, t: float) -> float:
        """Linear interpolation between samples."""
        if not self.t[0] <= t <= self.t[-1]:
            raise ValueError(f"t={t!r} outside [{self.t[0]!r}, {self.t[-1]!r}]")
        return float(np.interp(t, self.t, self.x))


@dataclass(frozen=True)
class ConsistencyReport:
    status: Status
    location: str | None = None
    value_a: float | None = None
    value_b: float | None = None
    gap: float | None = None
    threshold: float | None = None
    message: str = ""

    @property
    def well_posed(self) -> bool:
        return self.status is Status.WELL_POSED

    def to_text(self) -> str:
        lines = [f"status: {self.status.value}"]
        if self.location is not None:
            lines.append(f"location: {self.location}")
        for key in ("value_a", "value_b", "gap", "threshold"):
            v = getattr(self, key)
            if v is not None:
                lines.append(f"{key}: {fmt_real(v)}")
        if self.message:
            lines.append(f"message: {self.message}")
        return "\n".join(lines) + "\n"


@dataclass(eq=False)
class Solution:
    structure: TemporalStructure | None
    problem: CauchyProblem | None
    trajectories: dict[str, Trajectory]
    provenance: dict[str, str]
    notes: list[str] = field(default_factory=list)
    _flows: dict[str, _Flow] = field(default_factory=dict, repr=False)

    status = Status.WELL_POSED

    @property
    def report(self) -> ConsistencyReport:
        return ConsistencyReport(Status.WELL_POSED, message="; ".join(self.notes))

    def value_at(self, point: TimePoint) -> float:
        """Flow value at ``point`` (exact RK4 continuation, not interpolation)."""
        if self.structure is not None:
            self.structure.check_point(point)
        flow = self._flows.get(point.segment)
        if flow is None:
            return self.trajectories[point.segment].at(point.t)
        return flow.value_at(point.t)

    def trajectory(self, branch_path: Sequence[int], t: float) -> Trajectory:
        return self.trajectories[locate(self.structure, branch_path, t).segment]


def _fail(status: Status, location, a, b, gap, cfg, message) -> ConsistencyReport:
    return ConsistencyReport(status, location, a, b, gap, cfg.threshold(a, b), message)


def _node_label(node) -> str:
    return f"node {node.id} ({node.kind}) at t={fmt_real(node.t)}"


def solve(s: TemporalStructure, problem: CauchyProblem, cfg: SolverConfig | None = None):
    """Solve ``problem`` on ``s``; returns a :class:`Solution` or a failing :class:`ConsistencyReport`."""
    cfg = cfg or SolverConfig()
    problem.check(s)
    rhs = _rhs(problem.f)

    by_segment: dict[str, list[Condition]] = {}
    for c in problem.conditions:
        by_segment.setdefault(c.point.segment, []).append(c)

    flows: dict[str, _Flow] = {}
    provenance: dict[str, str] = {}
    via: dict[str, str] = {}  # how the segment was reached: "seed", a node kind, or "gluing"
    where: dict[str, str] = {}
    seeds: set[Condition] = set()

    def spread(start: str, flow: _Flow, how: str, label: str, origin: str):
        flows[start], provenance[start], via[start], where[start] = flow, origin, how, label
        queue = deque([start])
        while queue:
            sid = queue.popleft()
            for c in by_segment.get(sid, ()):
                if c in seeds:
                    continue
                value = flow.value_at(c.point.t)
                ok, gap = cfg.agree(value, c.x)
                if not ok:
                    status = {
                        STICKING: Status.STICKING_MISMATCH,
                        "gluing": Status.LOOP_INCONSISTENT,
                    }.get(via[sid], Status.INCONSISTENT)
                    return _fail(
                        status, where[sid], value, c.x, gap, cfg,
                        f"condition x({c.point})={fmt_real(c.x)} conflicts with the value "
                        f"propagated from {problem.conditions[0].point}",
                    )
            for node, moving_forward in ((s.start_node(sid), False), (s.end_node(sid), True)):
                if node is None:
                    continue
                for nxt in node.in_segments + node.out_segments:
                    if nxt in flows:
                        continue
                    if nxt in node.out_segments:
                        origin = "copied-to-sibling" if not moving_forward else "forward"
                    else:
                        origin = "copied-to-sibling" if moving_forward else "retrodicted"
                    flows[nxt], provenance[nxt] = flow, origin
                    via[nxt], where[nxt] = node.kind, _node_label(node)
                    queue.append(nxt)
        return None

    try:
        first = problem.conditions[0]
        seeds.add(first)
        flow = _Flow(rhs, first.point.t, first.x, s.horizon, cfg)
        failure = spread(first.point.segment, flow, "seed", f"segment {first.point.segment}", "seeded")
        if failure:
            return failure

        for _ in range(cfg.loop_passes):
            progressed = False
            for ident in s.identifications:
                late, early = ident.from_point, ident.to_point
                f_late, f_early = flows.get(late.segment), flows.get(early.segment)
                label = f"identification {ident.id} ({late} ~ {early})"
                if f_late and f_early:
                    a, b = f_late.value_at(late.t), f_early.value_at(early.t)
                    ok, gap = cfg.agree(a, b)
                    if not ok:
                        return _fail(
                            Status.LOOP_INCONSISTENT, label, a, b, gap, cfg,
                            f"holonomy over period {fmt_real(ident.period)}",
                        )
                elif f_late or f_early:
                    src, dst, known = (late, early, f_late) if f_late else (early, late, f_early)
                    new = _Flow(rhs, dst.t, known.value_at(src.t), s.horizon, cfg)
                    failure = spread(dst.segment, new, "gluing", label, "glued")
                    if failure:
                        return failure
                    progressed = True
            if not progressed:
                break
    except BlowupError as exc:
        return ConsistencyReport(
            Status.BLOWUP, f"t={fmt_real(exc.t)}", exc.x, None, None, None, str(exc)
        )

    missing = [seg.id for seg in s.segments if seg.id not in flows]
    if missing:
        return ConsistencyReport(
            Status.UNREACHED, ", ".join(missing), message="segments not connected to any condition"
        )

    trajectories = {}
    for sid in topological_segments(s):
        seg = s.segment(sid)
        ts, xs = flows[sid].sample(seg.lo, seg.hi)
        trajectories[sid] = Trajectory(sid, ts, xs)
    notes = []
    if s.identifications and s.nodes:
        notes.append(
            "identifications enforced at their glued points only; wrapping a+n*T across "
            "branched coordinates is ambiguous and not applied"
        )
    return Solution(s, problem, trajectories, provenance, notes, flows)


def check_loop_consistency(sol: Solution, ident: Identification, cfg: SolverConfig | None = None) -> tuple[bool, float]:
    cfg = cfg or SolverConfig()
    return cfg.agree(sol.value_at(ident.from_point), sol.value_at(ident.to_point))


def solve_circle(t1: float, t2: float, f: Expr, t_in: float, x_in: float, cfg: SolverConfig | None = None):
    """Cauchy problem on the line with ``t1 ~ t2`` glued (a circle of period ``t2 - t1``)."""
    cfg = cfg or SolverConfig()
    if not t1 < t2:
        raise ValueError(f"need t1 < t2, got {t1!r}, {t2!r}")
    period = t2 - t1
    try:
        path = integrate_segment(f, t_in, x_in, t_in + period, cfg)
    except BlowupError as exc:
        return ConsistencyReport(Status.BLOWUP, f"t={fmt_real(exc.t)}", exc.x, message=str(exc))
    ok, gap = cfg.agree(path.end, x_in)
    if not ok:
        return _fail(
            Status.LOOP_INCONSISTENT, f"circle t={fmt_real(t1)} ~ t={fmt_real(t2)}",
            path.end, x_in, gap, cfg, f"holonomy over period {fmt_real(period)}",
        )
    traj = Trajectory("circle", path.t, path.x)
    return Solution(None, None, {"circle": traj}, {"circle": "wrapped"})


# --- multihistory ----------------------------------------------------------


@dataclass(eq=False)
class MultihistoryOutcome:
    structure: TemporalStructure
    x1: float
    x2: float
    branch_solutions: tuple
    joint: object

    @property
    def joint_status(self) -> Status:
        return self.joint.status


def _remap_condition(c: Condition, seg_id: str, t: float, continuation: str) -> Condition:
    if c.point.segment == seg_id and c.point.t >= t:
        return Condition(TimePoint(continuation, c.point.t), c.x)
    return c


def rewrite_history(s: TemporalStructure, sol: Solution, t1: TimePoint, x2: float, cfg: SolverConfig | None = None) -> MultihistoryOutcome:
    """Change the past at ``t1``: split time there and pose ``x(t1_1)=x1, x(t1_2)=x2``.

    Branch 1 keeps the original history (same conditions, so the same flow);
    branch 2 is solved from ``x2`` alone; the joint problem is well posed
    only if ``x2`` agrees with the value ``x1`` the past actually had.
    """
    cfg = cfg or SolverConfig()
    if not isinstance(sol, Solution) or sol.structure is None or sol.problem is None:
        raise ValueError("rewrite_history needs a well-posed Solution on a temporal structure")
    if t1.segment not in sol.trajectories:
        raise ValueError(f"solution does not cover segment {t1.segment}")
    x1 = sol.value_at(t1)
    new = split_division(s, t1.segment, t1.t, 2)
    node = new.nodes[-1]
    copy1, copy2 = (TimePoint(sid, t1.t) for sid in node.out_segments)

    original = CauchyProblem(
        sol.problem.f,
        tuple(_remap_condition(c, t1.segment, t1.t, copy1.segment) for c in sol.problem.conditions),
    )
    branch1 = solve(new, original, cfg)
    branch2 = solve(new, CauchyProblem(sol.problem.f, (Condition(copy2, x2),)), cfg)
    joint = solve(new, CauchyProblem(sol.problem.f, (Condition(copy1, x1), Condition(copy2, x2))), cfg)
    return MultihistoryOutcome(new, x1, x2, (branch1, branch2), joint)


# --- bifurcating paths in a split state space --------------------------------


@dataclass(frozen=True, eq=False)
class StatePath:
    """A path in ``Split(R, [split_at, inf), 2)``; ``copy`` is 0 below the split."""

    t: np.ndarray
    x: np.ndarray
    copy: np.ndarray

    def points(self, mask) -> set:
        return {(int(c), float(x)) for c, x in zip(self.copy[mask], self.x[mask])}


@dataclass(frozen=True, eq=False)
class Bifurcation:
    t_bif: float
    split_at: float
    continuations: tuple[StatePath, StatePath]


def dual_continuations(
    f: Expr,
    x_in: float,
    t_in: float,
    split_at: float,
    cfg: SolverConfig | None = None,
    horizon: Horizon | None = None,
) -> Bifurcation:
    """Trajectories in a split state space that bifurcate where ``x`` enters ``[split_at, inf)``.

    Only transversal, upward crossings are accepted.
    """
    cfg = cfg or SolverConfig()
    horizon = horizon or DEFAULT_HORIZON
    rhs = _rhs(f)
    if evaluate(f, split_at) == 0.0:
        raise ValueError(f"f({split_at!r}) = 0: the flow grazes the split point, no crossing")
    if x_in >= split_at:
        raise ValueError(f"x_in={x_in!r} already lies in the split region [{split_at!r}, inf)")
    if not t_in < horizon.t_max:
        raise ValueError("t_in must lie before the horizon end")

    grid = _Grid(rhs, t_in, x_in, horizon.t_max, cfg)
    hit = next((k for k, x in enumerate(grid.xs) if x >= split_at), None)
    if hit is None:
        raise ValueError(f"trajectory never reaches x={split_at!r} before t={horizon.t_max!r}")
    if grid.xs[hit] == split_at:
        t_bif = grid.time(hit)
    else:
        tk, xk = grid.time(hit - 1), grid.xs[hit - 1]
        dt = brentq(
            lambda d: _rk4(rhs, tk, xk, d, cfg.blowup_cap) - split_at,
            0.0, grid.h, xtol=1e-15, rtol=4 * np.finfo(float).eps,
        )
        t_bif = tk + dt

    before_t = [grid.time(k) for k in range(hit) if grid.time(k) < t_bif] + [t_bif]
    before_x = [grid.xs[k] for k in range(len(before_t) - 1)] + [split_at]
    after = integrate_segment(f, t_bif, split_at, horizon.t_max, cfg)
    t = np.concatenate([before_t, after.t[1:]])
    x = np.concatenate([before_x, after.x[1:]])
    n_before = len(before_t) - 1
    paths = []
    for k in (1, 2):
        copy = np.zeros(len(t), dtype=int)
        copy[n_before:] = k
        paths.append(StatePath(t, x, copy))
    return Bifurcation(t_bif, split_at, tuple(paths))


def is_bifurcating_pair(a: StatePath, b: StatePath, t_bif: float) -> bool:
    """Equal before ``t_bif``, disjoint images on ``[t_bif, inf)``."""
    pre_a, pre_b = a.t < t_bif, b.t < t_bif
    if not (np.array_equal(a.t[pre_a], b.t[pre_b]) and np.array_equal(a.x[pre_a], b.x[pre_b])
            and np.array_equal(a.copy[pre_a], b.copy[pre_b])):
        return False
    return not (a.points(~pre_a) & b.points(~pre_b))


# --- export ----------------------------------------------------------------


def write_csv(sol: Solution, fh) -> None:
    """``segment,branch_path,t,x`` rows, segments in time order then by ``t``."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["segment", "branch_path", "t", "x"])
    order = topological_segments(sol.structure) if sol.structure else list(sol.trajectories)
    for sid in order:
        traj = sol.trajectories[sid]
        path = sol.structure.path_of(sid) if sol.structure else ()
        label = "[" + ",".join(str(k) for k in path) + "]"
        for t, x in zip(traj.t, traj.x):
            writer.writerow([sid, label, fmt_real(float(t)), fmt_real(float(x))])
