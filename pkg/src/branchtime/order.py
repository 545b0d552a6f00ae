"""Chronological preorder, inseparable pairs and the Hausdorff quotient.

The chronological relation compares underlying coordinates, so distinct
copies of one coordinate are mutually related without being equal.  The
only inseparable pairs of the natural topology are copies of a node's
boundary point; :func:`hausdorff_pairs` enumerates them from the
presentation instead of searching open sets.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from itertools import combinations

from .timeline import (
    StructureError,
    TemporalStructure,
    TimePoint,
    has_cycle,
)

__all__ = [
    "ChronologyViolation",
    "ChronRelationReport",
    "CopyFamily",
    "chron_leq",
    "chron_relation_report",
    "chron_equiv_classes",
    "hausdorff_pairs",
    "is_hausdorff",
    "mccabe_quotient",
    "representative",
]


class ChronologyViolation(StructureError):
    """The chronological relation is not a preorder on this structure."""


@dataclass(frozen=True)
class ChronRelationReport:
    is_preorder: bool
    is_partial_order: bool
    witness_pair: tuple[TimePoint, TimePoint] | None
    chronology_violating: bool


@dataclass(frozen=True)
class CopyFamily:
    """All points over ``[lo, hi]`` (with the given closedness) carried by several segments.

    For each coordinate in the interval, the copies on ``segments`` form one
    nontrivial equivalence class of the chronological preorder.
    """

    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool
    segments: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.segments)

    def contains(self, t: float) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        return not (t == self.hi and not self.hi_closed)


def _refuse_loops(s: TemporalStructure) -> None:
    if s.identifications:
        raise ChronologyViolation("chronology-violating: relation is not a preorder")


def chron_leq(s: TemporalStructure, p: TimePoint, q: TimePoint) -> bool:
    """``p`` is chronologically no later than ``q``."""
    _refuse_loops(s)
    s.check_point(p)
    s.check_point(q)
    return p.t <= q.t


def _witness(s: TemporalStructure) -> tuple[TimePoint, TimePoint] | None:
    for node in s.nodes:
        a, b = (s.segment(sid) for sid in node.copies[:2])
        if not node.merged:
            return TimePoint(a.id, node.t), TimePoint(b.id, node.t)
        # glued boundary: any shared interior coordinate still witnesses
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        if lo < hi:
            mid = (lo + hi) / 2
            return TimePoint(a.id, mid), TimePoint(b.id, mid)
    return None


def chron_relation_report(s: TemporalStructure) -> ChronRelationReport:
    preorder = not s.identifications
    witness = _witness(s) if preorder else None
    return ChronRelationReport(
        is_preorder=preorder,
        is_partial_order=preorder and witness is None,
        witness_pair=witness,
        chronology_violating=has_cycle(s, with_identifications=True),
    )


def chron_equiv_classes(s: TemporalStructure) -> list[CopyFamily]:
    """Nontrivial equivalence classes of the preorder, as interval families.

    The coordinate axis is cut at every segment end; each elementary piece
    (a breakpoint or the open gap between two) is tagged with the segments
    covering it, and adjacent pieces with the same cover are merged.
    """
    _refuse_loops(s)
    cuts = sorted({v for seg in s.segments for v in (seg.lo, seg.hi)})
    pieces = []  # (lo, hi, lo_closed, hi_closed, probe)
    for i, c in enumerate(cuts):
        pieces.append((c, c, True, True, c))
        if i + 1 < len(cuts):
            nxt = cuts[i + 1]
            pieces.append((c, nxt, False, False, (c + nxt) / 2))

    families: list[list] = []
    for lo, hi, lo_c, hi_c, probe in pieces:
        cover = tuple(seg.id for seg in s.segments if seg.contains(probe))
        if len(cover) < 2:
            continue
        last = families[-1] if families else None
        if last and last[4] == cover and last[1] == lo and (last[3] or lo_c):
            last[1], last[3] = hi, hi_c
        else:
            families.append([lo, hi, lo_c, hi_c, cover])
    return [CopyFamily(lo, hi, lc, hc, cover) for lo, hi, lc, hc, cover in families]


def hausdorff_pairs(s: TemporalStructure) -> list[frozenset[TimePoint]]:
    """Unordered pairs of distinct points that no two open sets separate."""
    pairs: list[frozenset[TimePoint]] = []
    seen = set()
    for node in s.nodes:
        if node.merged:
            continue
        points = [TimePoint(sid, node.t) for sid in node.copies]
        for a, b in combinations(points, 2):
            pair = frozenset((a, b))
            if pair not in seen:
                seen.add(pair)
                pairs.append(pair)
    return pairs


def is_hausdorff(s: TemporalStructure) -> bool:
    return not hausdorff_pairs(s)


def mccabe_quotient(s: TemporalStructure) -> TemporalStructure:
    """Glue each node's boundary copies into one shared point.

    Only boundary copies are identified, so interior points and the segment
    count are untouched.
    """
    if s.identifications:
        raise StructureError("McCabe quotient is unsupported on structures with identifications")
    nodes = tuple(dataclasses.replace(node, merged=True) for node in s.nodes)
    return dataclasses.replace(s, nodes=nodes)


def representative(s: TemporalStructure, p: TimePoint) -> TimePoint:
    """Canonical member of ``p``'s class under the McCabe gluing."""
    for node in s.nodes:
        if node.merged and p.t == node.t and p.segment in node.copies:
            return TimePoint(node.copies[0], p.t)
    return p
