"""Finite presentations of branched time.

A :class:`TemporalStructure` is a set of coordinate intervals (segments)
glued at nodes.  A *division* at ``t`` has one incoming segment open at
``t`` and ``b`` outgoing copies, each owning its closed left endpoint; a
*sticking* is the mirror image.  Identifications glue a late point on an
output edge to an early point on an input edge.

Every segment carries a branch path: the ``(node id, branch index)``
choices that distinguish it from its copies.  A path of bare indices
(``[]``, ``[2]``, ``[1, 3]``) addresses the chain of segments sharing it,
and a coordinate picks one segment of the chain (see :func:`locate`).

All structures are immutable; every builder returns a new value.
"""

from __future__ import annotations

import dataclasses
import graphlib
import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

__all__ = [
    "DIVISION",
    "STICKING",
    "DEFAULT_HORIZON",
    "StructureError",
    "Horizon",
    "TimePoint",
    "Segment",
    "NodeEvent",
    "Identification",
    "TemporalStructure",
    "ValidationReport",
    "line",
    "split_division",
    "split_sticking",
    "split_point",
    "identify",
    "locate",
    "permute_branches",
    "validate",
    "segment_successors",
    "has_cycle",
    "topological_segments",
    "from_spec",
    "load_spec",
]

DIVISION = "division"
STICKING = "sticking"


class StructureError(ValueError):
    """A build operation or spec file asked for an impossible structure."""


@dataclass(frozen=True)
class Horizon:
    """Finite simulation window standing in for the unbounded time line."""

    t_min: float = -10.0
    t_max: float = 10.0

    def __post_init__(self):
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)):
            raise StructureError(f"horizon must be finite, got ({self.t_min}, {self.t_max})")
        if not self.t_min < self.t_max:
            raise StructureError(f"empty horizon ({self.t_min}, {self.t_max})")

    def __contains__(self, t: float) -> bool:
        return self.t_min < t < self.t_max


DEFAULT_HORIZON = Horizon(-10.0, 10.0)


@dataclass(frozen=True)
class TimePoint:
    segment: str
    t: float

    def __str__(self):
        return f"{self.segment}@{self.t!r}"


@dataclass(frozen=True)
class Segment:
    id: str
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True
    branch_path: tuple[tuple[str, int], ...] = ()

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(k for _, k in self.branch_path)

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, t: float) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    def interval_text(self, fmt=repr) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{fmt(self.lo)},{fmt(self.hi)}{right}"


@dataclass(frozen=True)
class NodeEvent:
    id: str
    kind: str
    t: float
    branches: int
    in_segments: tuple[str, ...]
    out_segments: tuple[str, ...]
    # set by the McCabe quotient: the boundary copies form one shared point
    merged: bool = False

    @property
    def copies(self) -> tuple[str, ...]:
        """Segments owning a copy of the node coordinate."""
        return self.out_segments if self.kind == DIVISION else self.in_segments


@dataclass(frozen=True)
class Identification:
    id: str
    from_point: TimePoint
    to_point: TimePoint
    period: float


@dataclass(frozen=True)
class TemporalStructure:
    horizon: Horizon
    segments: tuple[Segment, ...]
    nodes: tuple[NodeEvent, ...] = ()
    identifications: tuple[Identification, ...] = ()
    root: str = "s0"
    next_serial: int = 1

    @cached_property
    def _seg_index(self) -> dict[str, Segment]:
        return {seg.id: seg for seg in self.segments}

    @cached_property
    def _node_index(self) -> dict[str, NodeEvent]:
        return {node.id: node for node in self.nodes}

    @cached_property
    def _ends(self) -> tuple[dict[str, NodeEvent], dict[str, NodeEvent]]:
        starts, ends = {}, {}
        for node in self.nodes:
            for sid in node.out_segments:
                starts[sid] = node
            for sid in node.in_segments:
                ends[sid] = node
        return starts, ends

    def segment(self, sid: str) -> Segment:
        try:
            return self._seg_index[sid]
        except KeyError:
            raise StructureError(f"unknown segment {sid!r}") from None

    def node(self, nid: str) -> NodeEvent:
        try:
            return self._node_index[nid]
        except KeyError:
            raise StructureError(f"unknown node {nid!r}") from None

    def start_node(self, sid: str) -> NodeEvent | None:
        """Node at the segment's lower end, or None at the horizon."""
        return self._ends[0].get(sid)

    def end_node(self, sid: str) -> NodeEvent | None:
        return self._ends[1].get(sid)

    def contains(self, point: TimePoint) -> bool:
        seg = self._seg_index.get(point.segment)
        return seg is not None and seg.contains(point.t)

    def check_point(self, point: TimePoint) -> None:
        seg = self.segment(point.segment)
        if not seg.contains(point.t):
            raise StructureError(
                f"t={point.t!r} is outside segment {seg.id} {seg.interval_text()}"
            )

    def path_of(self, sid: str) -> tuple[int, ...]:
        return self.segment(sid).indices

    @property
    def is_identification_free(self) -> bool:
        return not self.identifications


@dataclass(frozen=True)
class ValidationReport:
    checks: dict[str, bool]
    problems: tuple[str, ...]
    chronology_violating: bool

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


# --- construction ----------------------------------------------------------


def line(horizon: Horizon | None = None) -> TemporalStructure:
    """The unsplit time line over ``horizon`` (default (-10, 10))."""
    horizon = horizon or DEFAULT_HORIZON
    root = Segment("s0", horizon.t_min, horizon.t_max)
    return TemporalStructure(horizon=horizon, segments=(root,), root="s0", next_serial=1)


def _check_cut(s: TemporalStructure, seg: Segment, t: float, b: int) -> None:
    if not isinstance(b, int) or isinstance(b, bool) or b < 2:
        raise StructureError(f"a split needs at least 2 branches, got {b!r}")
    if not math.isfinite(t) or t not in s.horizon:
        raise StructureError(f"t={t!r} is not strictly inside the horizon")
    if t == seg.lo or t == seg.hi:
        raise StructureError(f"t={t!r} is at an existing node or end of segment {seg.id}")
    if not seg.lo < t < seg.hi:
        raise StructureError(f"t={t!r} is outside segment {seg.id} {seg.interval_text()}")


def _reachable(s: TemporalStructure, sid: str, forward: bool) -> list[str]:
    seen, queue, order = {sid}, deque([sid]), []
    while queue:
        cur = queue.popleft()
        node = s.end_node(cur) if forward else s.start_node(cur)
        if node is None:
            continue
        for nxt in node.out_segments if forward else node.in_segments:
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    return order


def _inherits(s: TemporalStructure, other: Segment, prefix: tuple, t: float, later: bool, reach: set) -> bool:
    """Whether ``other`` belongs to the side of a cut at ``t`` that copy 1 carries on.

    Besides graph reachability, a segment counts when the entry right after
    ``prefix`` in its path names a node on the carried side; this catches the
    fresh pasts of later stickings, which no downstream walk reaches.
    """
    n = len(prefix)
    if other.branch_path[:n] != prefix:
        return False
    if other.id in reach:
        return True
    if len(other.branch_path) == n:
        return False
    u = s.node(other.branch_path[n][0]).t
    return u > t if later else u < t


def _replace_ids(ids: tuple[str, ...], old: str, new: str) -> tuple[str, ...]:
    return tuple(new if sid == old else sid for sid in ids)


def _move_points(
    s: TemporalStructure, seg_id: str, new_id: str, moves
) -> tuple[Identification, ...]:
    out = []
    for ident in s.identifications:
        points = []
        for p in (ident.from_point, ident.to_point):
            if p.segment == seg_id and moves(p.t):
                p = TimePoint(new_id, p.t)
            points.append(p)
        out.append(dataclasses.replace(ident, from_point=points[0], to_point=points[1]))
    return tuple(out)


def split_division(s: TemporalStructure, seg_id: str, t: float, b: int = 2) -> TemporalStructure:
    """Split ``seg_id`` through ``[t, +inf)`` into ``b`` futures.

    The incoming piece keeps the segment id and is open at ``t``.  Branch 1
    inherits whatever used to follow the segment; branches 2..b run plain to
    the horizon.
    """
    seg = s.segment(seg_id)
    _check_cut(s, seg, t, b)
    nid = f"n{len(s.nodes)}"
    serial = s.next_serial
    out_ids = tuple(f"s{serial + k}" for k in range(b))
    prefix = seg.branch_path
    incoming = dataclasses.replace(seg, hi=t, hi_closed=False)
    outs = [
        Segment(out_ids[0], t, seg.hi, True, seg.hi_closed, prefix + ((nid, 1),))
    ]
    for k in range(2, b + 1):
        outs.append(Segment(out_ids[k - 1], t, s.horizon.t_max, True, True, prefix + ((nid, k),)))

    downstream = set(_reachable(s, seg_id, forward=True))
    n = len(prefix)
    segments = []
    for other in s.segments:
        if other.id == seg_id:
            segments.append(incoming)
            segments.extend(outs)
        elif _inherits(s, other, prefix, t, True, downstream):
            path = prefix + ((nid, 1),) + other.branch_path[n:]
            segments.append(dataclasses.replace(other, branch_path=path))
        else:
            segments.append(other)

    nodes = [
        dataclasses.replace(node, in_segments=_replace_ids(node.in_segments, seg_id, out_ids[0]))
        for node in s.nodes
    ]
    nodes.append(NodeEvent(nid, DIVISION, t, b, (seg_id,), out_ids))
    idents = _move_points(s, seg_id, out_ids[0], lambda u: u >= t)
    result = dataclasses.replace(
        s, segments=tuple(segments), nodes=tuple(nodes), identifications=idents,
        next_serial=serial + b,
    )
    _recheck_identifications(result)
    return result


def split_sticking(s: TemporalStructure, seg_id: str, t: float, b: int = 2) -> TemporalStructure:
    """Split ``seg_id`` through ``(-inf, t]`` into ``b`` pasts merging at ``t``.

    The outgoing piece keeps the segment id and is open at ``t``.  Incoming
    copy 1 inherits whatever used to precede the segment; copies 2..b start
    plain at the horizon.
    """
    seg = s.segment(seg_id)
    _check_cut(s, seg, t, b)
    nid = f"n{len(s.nodes)}"
    serial = s.next_serial
    in_ids = tuple(f"s{serial + k}" for k in range(b))
    prefix = seg.branch_path
    outgoing = dataclasses.replace(seg, lo=t, lo_closed=False)
    ins = [Segment(in_ids[0], seg.lo, t, seg.lo_closed, True, prefix + ((nid, 1),))]
    for k in range(2, b + 1):
        ins.append(Segment(in_ids[k - 1], s.horizon.t_min, t, True, True, prefix + ((nid, k),)))

    upstream = set(_reachable(s, seg_id, forward=False))
    n = len(prefix)
    segments = []
    for other in s.segments:
        if other.id == seg_id:
            segments.extend(ins)
            segments.append(outgoing)
        elif _inherits(s, other, prefix, t, False, upstream):
            path = prefix + ((nid, 1),) + other.branch_path[n:]
            segments.append(dataclasses.replace(other, branch_path=path))
        else:
            segments.append(other)

    nodes = [
        dataclasses.replace(node, out_segments=_replace_ids(node.out_segments, seg_id, in_ids[0]))
        for node in s.nodes
    ]
    nodes.append(NodeEvent(nid, STICKING, t, b, in_ids, (seg_id,)))
    idents = _move_points(s, seg_id, in_ids[0], lambda u: u <= t)
    result = dataclasses.replace(
        s, segments=tuple(segments), nodes=tuple(nodes), identifications=idents,
        next_serial=serial + b,
    )
    _recheck_identifications(result)
    return result


def split_point(s: TemporalStructure, seg_id: str, t: float, b: int = 2) -> TemporalStructure:
    """Split through the single point ``{t}``: ``b`` degenerate copies of ``t``.

    Encoded as a division into single-point segments followed by a sticking
    that merges them again, both at coordinate ``t``.
    """
    seg = s.segment(seg_id)
    _check_cut(s, seg, t, b)
    divided = split_division(s, seg_id, t, b)
    node = divided.nodes[-1]
    first, rest = node.out_segments[0], node.out_segments[1:]
    # collapse every copy to the single point t; copy 1 keeps the continuation
    cont_id = f"s{divided.next_serial}"
    cont_seg = divided.segment(first)
    segments = []
    for other in divided.segments:
        if other.id == first:
            segments.append(dataclasses.replace(other, hi=t, hi_closed=True))
        elif other.id in rest:
            segments.append(dataclasses.replace(other, hi=t, hi_closed=True))
        else:
            segments.append(other)
    prefix = seg.branch_path
    cont = Segment(cont_id, t, cont_seg.hi, False, cont_seg.hi_closed, prefix)
    segments.append(cont)
    # continuation paths: drop the (division, 1) entry that split_division inserted
    n = len(prefix)
    fixed = []
    for other in segments:
        if other.id != first and other.branch_path[: n + 1] == prefix + ((node.id, 1),):
            other = dataclasses.replace(other, branch_path=prefix + other.branch_path[n + 1 :])
        fixed.append(other)
    sid = f"n{len(divided.nodes)}"
    nodes = [
        dataclasses.replace(nd, in_segments=_replace_ids(nd.in_segments, first, cont_id))
        for nd in divided.nodes
    ]
    nodes.append(NodeEvent(sid, STICKING, t, b, node.out_segments, (cont_id,)))
    idents = _move_points(divided, first, cont_id, lambda u: u > t)
    result = dataclasses.replace(
        divided, segments=tuple(fixed), nodes=tuple(nodes), identifications=idents,
        next_serial=divided.next_serial + 1,
    )
    _recheck_identifications(result)
    return result


def _is_output_edge(s: TemporalStructure, sid: str) -> bool:
    return s.end_node(sid) is None


def _is_input_edge(s: TemporalStructure, sid: str) -> bool:
    return s.start_node(sid) is None


def _identification_problems(s: TemporalStructure) -> list[str]:
    problems = []
    used: set[TimePoint] = set()
    for ident in s.identifications:
        a, b = ident.to_point, ident.from_point
        for p in (a, b):
            seg = s._seg_index.get(p.segment)
            if seg is None:
                problems.append(f"{ident.id}: unknown segment {p.segment!r}")
                continue
            if not seg.lo < p.t < seg.hi:
                problems.append(f"{ident.id}: {p} is not strictly inside {seg.interval_text()}")
            if p in used:
                problems.append(f"{ident.id}: point {p} is already identified")
            used.add(p)
        if not ident.period > 0 or ident.period != b.t - a.t:
            problems.append(f"{ident.id}: period must equal t_B - t_A > 0, got {ident.period!r}")
        if b.segment in s._seg_index and not _is_output_edge(s, b.segment):
            problems.append(f"{ident.id}: from-point {b} is not on an output edge")
        if a.segment in s._seg_index and not _is_input_edge(s, a.segment):
            problems.append(f"{ident.id}: to-point {a} is not on an input edge")
    return problems


def _recheck_identifications(s: TemporalStructure) -> None:
    problems = _identification_problems(s)
    if problems:
        raise StructureError("split would break an identification: " + "; ".join(problems))


def identify(s: TemporalStructure, from_point: TimePoint, to_point: TimePoint) -> TemporalStructure:
    """Glue a late point on an output edge to an earlier point on an input edge."""
    for p in (from_point, to_point):
        s.check_point(p)
    period = from_point.t - to_point.t
    if not period > 0:
        raise StructureError(f"identification needs t_B > t_A, got period {period!r}")
    ident = Identification(f"i{len(s.identifications)}", from_point, to_point, period)
    result = dataclasses.replace(s, identifications=s.identifications + (ident,))
    problems = _identification_problems(result)
    if problems:
        raise StructureError("; ".join(problems))
    return result


def locate(s: TemporalStructure, branch_path: Sequence[int], t: float) -> TimePoint:
    """The point at coordinate ``t`` on the segment chain addressed by ``branch_path``."""
    path = tuple(branch_path)
    chain = [seg for seg in s.segments if seg.indices == path]
    if not chain:
        raise StructureError(f"no segment has branch path {list(path)}")
    hits = [seg for seg in chain if seg.contains(t)]
    if not hits:
        spans = ", ".join(seg.interval_text() for seg in chain)
        raise StructureError(f"t={t!r} is not on branch path {list(path)} (covers {spans})")
    if len(hits) > 1:
        raise StructureError(f"branch path {list(path)} is ambiguous at t={t!r}")
    return TimePoint(hits[0].id, t)


def permute_branches(s: TemporalStructure, node_id: str, order: Sequence[int]) -> TemporalStructure:
    """Relabel the branches of one node: new branch ``k`` is old branch ``order[k-1]``."""
    node = s.node(node_id)
    if sorted(order) != list(range(1, node.branches + 1)):
        raise StructureError(f"{list(order)} is not a permutation of 1..{node.branches}")
    new_index = {old: new for new, old in enumerate(order, start=1)}
    segments = tuple(
        dataclasses.replace(
            seg,
            branch_path=tuple(
                (nid, new_index[k] if nid == node_id else k) for nid, k in seg.branch_path
            ),
        )
        for seg in s.segments
    )
    copies = tuple(node.copies[old - 1] for old in order)
    if node.kind == DIVISION:
        new_node = dataclasses.replace(node, out_segments=copies)
    else:
        new_node = dataclasses.replace(node, in_segments=copies)
    nodes = tuple(new_node if nd.id == node_id else nd for nd in s.nodes)
    return dataclasses.replace(s, segments=segments, nodes=nodes)


# --- graph helpers ---------------------------------------------------------


def segment_successors(s: TemporalStructure, with_identifications: bool = False) -> dict[str, list[str]]:
    """Segment-level digraph: ``a -> b`` when ``b`` directly follows ``a``.

    With identifications, the edge holding the late glued point also leads to
    the edge holding the early one.
    """
    succ: dict[str, list[str]] = {seg.id: [] for seg in s.segments}
    for node in s.nodes:
        for a in node.in_segments:
            succ.setdefault(a, []).extend(node.out_segments)
    if with_identifications:
        for ident in s.identifications:
            succ[ident.from_point.segment].append(ident.to_point.segment)
    return succ


def has_cycle(s: TemporalStructure, with_identifications: bool = False) -> bool:
    succ = segment_successors(s, with_identifications)
    preds = {sid: set() for sid in succ}
    for a, bs in succ.items():
        for b in bs:
            preds.setdefault(b, set()).add(a)
    try:
        tuple(graphlib.TopologicalSorter(preds).static_order())
    except graphlib.CycleError:
        return True
    return False


def topological_segments(s: TemporalStructure) -> list[str]:
    """Segments in time order, ties broken by (lower end, creation order)."""
    succ = segment_successors(s)
    indeg = {sid: 0 for sid in succ}
    for bs in succ.values():
        for b in bs:
            indeg[b] += 1
    rank = {seg.id: (seg.lo, int(seg.id[1:]) if seg.id[1:].isdigit() else 0, seg.id)
            for seg in s.segments}
    ready = sorted((sid for sid, d in indeg.items() if d == 0), key=rank.__getitem__)
    order = []
    while ready:
        sid = ready.pop(0)
        order.append(sid)
        for b in succ[sid]:
            indeg[b] -= 1
            if indeg[b] == 0:
                ready.append(b)
        ready.sort(key=rank.__getitem__)
    if len(order) != len(indeg):
        raise StructureError("segment graph has a cycle")
    return order


# --- validation ------------------------------------------------------------


def validate(s: TemporalStructure) -> ValidationReport:
    """Check every structural invariant; never raises, failures go in the report."""
    problems: dict[str, list[str]] = {
        name: []
        for name in (
            "horizon", "segments", "incidence", "nodes", "endpoints",
            "monotonicity", "connectivity", "acyclic", "identifications",
        )
    }
    h = s.horizon
    if not (math.isfinite(h.t_min) and math.isfinite(h.t_max) and h.t_min < h.t_max):
        problems["horizon"].append(f"invalid horizon ({h.t_min}, {h.t_max})")

    ids = [seg.id for seg in s.segments]
    if len(set(ids)) != len(ids):
        problems["segments"].append("duplicate segment ids")
    for seg in s.segments:
        if seg.lo > seg.hi or (seg.degenerate and not (seg.lo_closed and seg.hi_closed)):
            problems["segments"].append(f"{seg.id}: bad interval {seg.interval_text()}")
        if seg.lo < h.t_min or seg.hi > h.t_max:
            problems["segments"].append(f"{seg.id}: {seg.interval_text()} leaves the horizon")
    if s.root not in s._seg_index:
        problems["segments"].append(f"root segment {s.root!r} missing")

    starts: dict[str, str] = {}
    ends: dict[str, str] = {}
    for node in s.nodes:
        for sid in node.in_segments + node.out_segments:
            if sid not in s._seg_index:
                problems["incidence"].append(f"{node.id}: unknown segment {sid!r}")
        for sid in node.out_segments:
            if sid in starts:
                problems["incidence"].append(f"{sid} starts at both {starts[sid]} and {node.id}")
            starts[sid] = node.id
        for sid in node.in_segments:
            if sid in ends:
                problems["incidence"].append(f"{sid} ends at both {ends[sid]} and {node.id}")
            ends[sid] = node.id

        if node.kind not in (DIVISION, STICKING):
            problems["nodes"].append(f"{node.id}: unknown kind {node.kind!r}")
            continue
        if node.branches < 2:
            problems["nodes"].append(f"{node.id}: {node.branches} branches")
        n_in, n_out = len(node.in_segments), len(node.out_segments)
        want = (1, node.branches) if node.kind == DIVISION else (node.branches, 1)
        if (n_in, n_out) != want:
            problems["nodes"].append(f"{node.id}: {node.kind} with {n_in} in / {n_out} out")
        if node.t not in h:
            problems["nodes"].append(f"{node.id}: t={node.t!r} not strictly inside the horizon")

        for sid in node.in_segments:
            seg = s._seg_index.get(sid)
            if seg is None:
                continue
            if seg.hi != node.t:
                problems["monotonicity"].append(f"{sid} ends at {seg.hi!r}, node {node.id} is at {node.t!r}")
            closed = node.kind == STICKING
            if seg.hi_closed != closed and not seg.degenerate:
                problems["endpoints"].append(f"{sid} must be {'closed' if closed else 'open'} at {node.id}")
        for sid in node.out_segments:
            seg = s._seg_index.get(sid)
            if seg is None:
                continue
            if seg.lo != node.t:
                problems["monotonicity"].append(f"{sid} starts at {seg.lo!r}, node {node.id} is at {node.t!r}")
            closed = node.kind == DIVISION
            if seg.lo_closed != closed and not seg.degenerate:
                problems["endpoints"].append(f"{sid} must be {'closed' if closed else 'open'} at {node.id}")

    for seg in s.segments:
        if seg.id not in starts and not (seg.lo == h.t_min and seg.lo_closed):
            problems["endpoints"].append(f"{seg.id}: free lower end {seg.lo!r} is not the horizon")
        if seg.id not in ends and not (seg.hi == h.t_max and seg.hi_closed):
            problems["endpoints"].append(f"{seg.id}: free upper end {seg.hi!r} is not the horizon")

    # connectivity, ignoring orientation and identifications
    if s.segments:
        adj: dict[str, set[str]] = {sid: set() for sid in ids}
        for node in s.nodes:
            members = [sid for sid in node.in_segments + node.out_segments if sid in adj]
            for a in members:
                adj[a].update(members)
        seen, queue = {ids[0]}, deque([ids[0]])
        while queue:
            for nxt in adj[queue.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        if len(seen) != len(adj):
            problems["connectivity"].append(f"{len(adj) - len(seen)} segment(s) disconnected")

    if not problems["incidence"] and has_cycle(s):
        problems["acyclic"].append("directed cycle without identifications")

    problems["identifications"].extend(_identification_problems(s))

    violating = not problems["incidence"] and has_cycle(s, with_identifications=True)
    return ValidationReport(
        checks={name: not msgs for name, msgs in problems.items()},
        problems=tuple(m for msgs in problems.values() for m in msgs),
        chronology_violating=violating,
    )


# --- spec files ------------------------------------------------------------

_BUILDERS = {DIVISION: split_division, STICKING: split_sticking, "point": split_point}


def _point_from_spec(s: TemporalStructure, raw, where: str) -> TimePoint:
    try:
        return locate(s, [int(k) for k in raw["path"]], float(raw["t"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StructureError):
            raise StructureError(f"{where}: {exc}") from None
        raise StructureError(f"{where}: expected {{'path': [...], 't': real}}") from None


def from_spec(data: dict, horizon: Horizon | None = None) -> TemporalStructure:
    """Build a structure from a parsed spec document.

    ``horizon`` overrides the document's own window.
    """
    if not isinstance(data, dict):
        raise StructureError("spec must be a JSON object")
    if horizon is None:
        raw = data.get("horizon", [DEFAULT_HORIZON.t_min, DEFAULT_HORIZON.t_max])
        try:
            lo, hi = (float(v) for v in raw)
        except (TypeError, ValueError):
            raise StructureError("horizon: expected [lo, hi]") from None
        horizon = Horizon(lo, hi)
    s = line(horizon)
    for i, event in enumerate(data.get("events", [])):
        where = f"events[{i}]"
        try:
            build = _BUILDERS[event["kind"]]
            path = [int(k) for k in event.get("path", [])]
            t = float(event["t"])
            b = event.get("branches", 2)
        except (KeyError, TypeError, ValueError):
            raise StructureError(
                f"{where}: expected kind in {sorted(_BUILDERS)}, path, t, branches"
            ) from None
        if not isinstance(b, int) or isinstance(b, bool):
            raise StructureError(f"{where}: branches must be an integer")
        chain = [seg for seg in s.segments if seg.indices == tuple(path) and seg.lo < t < seg.hi]
        try:
            if not chain:
                # report the precise reason (open endpoint, existing node, ...)
                point = locate(s, path, t)
                chain = [s.segment(point.segment)]
            s = build(s, chain[0].id, t, b)
        except StructureError as exc:
            raise StructureError(f"{where}: {exc}") from None
    for i, raw in enumerate(data.get("identifications", [])):
        where = f"identifications[{i}]"
        if not isinstance(raw, dict):
            raise StructureError(f"{where}: expected {{'from': ..., 'to': ...}}")
        src = _point_from_spec(s, raw.get("from"), f"{where}.from")
        dst = _point_from_spec(s, raw.get("to"), f"{where}.to")
        try:
            s = identify(s, src, dst)
        except StructureError as exc:
            raise StructureError(f"{where}: {exc}") from None
    return s


def load_spec(path, horizon: Horizon | None = None) -> TemporalStructure:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StructureError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return from_spec(data, horizon)
