"""The oriented graph of a temporal structure and its DOT rendering.

Vertices are the division/sticking nodes, edges are segments.  Segments
that run to the horizon have a free end; in DOT those ends are drawn as
small point vertices so that identification pairs (dashed) have something
to attach to.
"""

from __future__ import annotations

from dataclasses import dataclass

from .timeline import TemporalStructure, topological_segments

__all__ = ["Vertex", "Edge", "EdgeIdentification", "Digraph", "graph_of", "to_dot", "fmt_real"]


def fmt_real(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return f"{x:.17g}"


@dataclass(frozen=True)
class Vertex:
    id: str
    t: float
    kind: str
    in_degree: int
    out_degree: int


@dataclass(frozen=True)
class Edge:
    segment: str
    source: str | None
    target: str | None
    label: str


@dataclass(frozen=True)
class EdgeIdentification:
    identification: str
    from_edge: str
    to_edge: str
    period: float


@dataclass(frozen=True)
class Digraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    identified: tuple[EdgeIdentification, ...]

    def vertex(self, vid: str) -> Vertex:
        return next(v for v in self.vertices if v.id == vid)

    def is_tree(self) -> bool:
        """Connected and cycle-free once free edge ends are counted as leaves."""
        n_vertices = len(self.vertices) + sum(
            (e.source is None) + (e.target is None) for e in self.edges
        )
        return not self.identified and len(self.edges) == n_vertices - 1


def graph_of(s: TemporalStructure) -> Digraph:
    vertices = tuple(
        Vertex(n.id, n.t, n.kind, len(n.in_segments), len(n.out_segments)) for n in s.nodes
    )
    edges = []
    for sid in topological_segments(s):
        seg = s.segment(sid)
        start, end = s.start_node(sid), s.end_node(sid)
        edges.append(
            Edge(
                sid,
                start.id if start else None,
                end.id if end else None,
                seg.interval_text(fmt_real),
            )
        )
    identified = tuple(
        EdgeIdentification(i.id, i.from_point.segment, i.to_point.segment, i.period)
        for i in s.identifications
    )
    return Digraph(vertices, tuple(edges), identified)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(s: TemporalStructure, name: str = "temporal_structure") -> str:
    """Deterministic DOT text: same structure, same bytes."""
    g = graph_of(s)
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for v in sorted(g.vertices, key=lambda v: (v.t, v.id)):
        lines.append(f"  {v.id} [label={_quote(f't={fmt_real(v.t)} ({v.kind})')}];")
    for e in g.edges:
        src = e.source or f"{e.segment}_lo"
        dst = e.target or f"{e.segment}_hi"
        for end, free in ((src, e.source is None), (dst, e.target is None)):
            if free:
                lines.append(f"  {end} [shape=point];")
        lines.append(f"  {src} -> {dst} [label={_quote(e.label)}];")
    for ide in g.identified:
        label = _quote(f"period={fmt_real(ide.period)}")
        lines.append(
            f"  {ide.from_edge}_hi -> {ide.to_edge}_lo [style=dashed, label={label}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
