from branchtime.graph import fmt_real, graph_of, to_dot
from branchtime.timeline import Horizon, identify, line, locate, split_division, split_sticking

DOT_B3 = """\
digraph temporal_structure {
  rankdir=LR;
  n0 [label="t=0 (division)"];
  s0_lo [shape=point];
  s0_lo -> n0 [label="[-1,0)"];
  s1_hi [shape=point];
  n0 -> s1_hi [label="[0,1]"];
  s2_hi [shape=point];
  n0 -> s2_hi [label="[0,1]"];
  s3_hi [shape=point];
  n0 -> s3_hi [label="[0,1]"];
}
"""

DOT_LOOP = """\
digraph temporal_structure {
  rankdir=LR;
  n0 [label="t=0 (division)"];
  s0_lo [shape=point];
  s0_lo -> n0 [label="[-4,0)"];
  s1_hi [shape=point];
  n0 -> s1_hi [label="[0,4]"];
  s2_hi [shape=point];
  n0 -> s2_hi [label="[0,4]"];
  s1_hi -> s0_lo [style=dashed, label="period=6"];
}
"""


def test_golden_division_b3():
    assert to_dot(split_division(line(Horizon(-1, 1)), "s0", 0.0, 3)) == DOT_B3


def test_golden_identification():
    s = split_division(line(Horizon(-4, 4)), "s0", 0.0, 2)
    s = identify(s, locate(s, [1], 3.0), locate(s, [], -3.0))
    assert to_dot(s) == DOT_LOOP


def test_dot_is_deterministic():
    def build():
        s = split_division(line(), "s0", 0.0, 2)
        return split_sticking(s, locate(s, [2], 1.0).segment, 2.0, 2)

    assert to_dot(build()) == to_dot(build())


def test_sticking_edges():
    g = graph_of(split_sticking(line(), "s0", 0.0, 2))
    (v,) = g.vertices
    assert sum(e.target == v.id for e in g.edges) == 2
    assert sum(e.source == v.id for e in g.edges) == 1


def test_fmt_real_round_trips():
    for x in (0.1, 1 / 3, 2.718281828459045, -1e-300):
        assert float(fmt_real(x)) == x
