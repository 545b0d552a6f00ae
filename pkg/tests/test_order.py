import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branchtime.order import (
    ChronologyViolation,
    chron_equiv_classes,
    chron_leq,
    chron_relation_report,
    hausdorff_pairs,
    is_hausdorff,
    mccabe_quotient,
    representative,
)
from branchtime.timeline import (
    TimePoint,
    line,
    locate,
    split_division,
    validate,
)

from conftest import structures, tree3


# --- brute-force oracle: epsilon balls walked along the segment graph ------


def _ball(s, seg_id, t, r, direction=0, out=None):
    """Open ball of radius ``r`` around ``(seg_id, t)`` as (segment, lo, hi) pieces."""
    out = [] if out is None else out
    seg = s.segment(seg_id)
    if direction >= 0:
        reach = t + r
        out.append((seg_id, t, min(reach, seg.hi)))
        node = s.end_node(seg_id)
        if reach > seg.hi and node is not None:
            for nxt in node.out_segments:
                _ball(s, nxt, node.t, reach - seg.hi, +1, out)
    if direction <= 0:
        reach = t - r
        out.append((seg_id, max(reach, seg.lo), t))
        node = s.start_node(seg_id)
        if reach < seg.lo and node is not None:
            for prv in node.in_segments:
                _ball(s, prv, node.t, seg.lo - reach, -1, out)
    return out


def _balls_meet(s, p, q, eps):
    a, b = _ball(s, p.segment, p.t, eps), _ball(s, q.segment, q.t, eps)
    return any(
        sa == sb and min(ha, hb) - max(la, lb) > 0 for sa, la, ha in a for sb, lb, hb in b
    )


def _sample_points(s):
    pts = []
    for seg in s.segments:
        for t in (seg.lo, (seg.lo + seg.hi) / 2, seg.hi):
            if seg.contains(t):
                pts.append(TimePoint(seg.id, t))
    return pts


def _oracle_pairs(s):
    pts = _sample_points(s)
    coords = sorted({p.t for p in pts})
    eps = 0.25 * min(b - a for a, b in zip(coords, coords[1:]))
    return {
        frozenset((p, q))
        for i, p in enumerate(pts)
        for q in pts[i + 1:]
        if _balls_meet(s, p, q, eps)
    }


# --- examples ----------------------------------------------------------------


def test_copies_are_mutually_related_but_distinct(split2):
    p, q = locate(split2, [1], 0.0), locate(split2, [2], 0.0)
    assert chron_leq(split2, p, q) and chron_leq(split2, q, p) and p != q


def test_past_precedes_future(split2):
    assert chron_leq(split2, locate(split2, [], -1.0), locate(split2, [2], 1.0))
    assert not chron_leq(split2, locate(split2, [2], 1.0), locate(split2, [], -1.0))


def test_relation_report(split2):
    rel = chron_relation_report(split2)
    assert rel.is_preorder and not rel.is_partial_order
    assert rel.witness_pair == (TimePoint("s1", 0.0), TimePoint("s2", 0.0))
    assert not rel.chronology_violating


def test_line_is_partial_order():
    rel = chron_relation_report(line())
    assert rel.is_partial_order and rel.witness_pair is None


def test_identifications_refuse(loop020):
    with pytest.raises(ChronologyViolation):
        chron_leq(loop020, TimePoint("s0", -1.0), TimePoint("s0", -2.0))
    rel = chron_relation_report(loop020)
    assert not rel.is_preorder and rel.chronology_violating


def test_quotient_still_preorder_not_partial(split2):
    rel = chron_relation_report(mccabe_quotient(split2))
    assert rel.is_preorder and not rel.is_partial_order


def test_equiv_classes_division(split2):
    (fam,) = chron_equiv_classes(split2)
    assert (fam.lo, fam.hi, fam.lo_closed, fam.size) == (0.0, 10.0, True, 2)
    assert fam.contains(0.0) and not fam.contains(-0.5)


def test_equiv_classes_sticking(stick2):
    (fam,) = chron_equiv_classes(stick2)
    assert (fam.lo, fam.hi, fam.hi_closed, fam.size) == (-10.0, 0.0, True, 2)


@pytest.mark.parametrize("b, expected", [(2, 1), (3, 3), (4, 6)])
def test_pair_counts(b, expected):
    s = split_division(line(), "s0", 0.0, b)
    assert len(hausdorff_pairs(s)) == expected
    assert hausdorff_pairs(mccabe_quotient(s)) == []


def test_line_is_hausdorff():
    assert is_hausdorff(line())


def test_tree_pairs():
    assert len(hausdorff_pairs(tree3())) == 9


def test_quotient_keeps_segments(split2):
    q = mccabe_quotient(split2)
    assert q.segments == split2.segments and validate(q).ok
    assert representative(q, TimePoint("s2", 0.0)) == TimePoint("s1", 0.0)
    assert representative(q, TimePoint("s2", 1.0)) == TimePoint("s2", 1.0)


def test_quotient_refuses_identifications(loop020):
    with pytest.raises(Exception, match="unsupported"):
        mccabe_quotient(loop020)


def test_oracle_sanity(split2, stick2):
    assert _oracle_pairs(split2) == set(hausdorff_pairs(split2))
    assert _oracle_pairs(stick2) == set(hausdorff_pairs(stick2))
    assert _oracle_pairs(line()) == set()


# --- properties ----------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(structures())
def test_pairs_match_neighborhood_oracle(s):
    assert set(hausdorff_pairs(s)) == _oracle_pairs(s)


@settings(max_examples=50, deadline=None)
@given(structures())
def test_quotient_is_hausdorff(s):
    assert is_hausdorff(mccabe_quotient(s))


@settings(max_examples=50, deadline=None)
@given(structures(), st.lists(st.floats(-9.99, 9.99), min_size=5, max_size=20))
def test_equiv_classes_match_sampling(s, ts):
    families = chron_equiv_classes(s)
    probes = ts + [n.t for n in s.nodes]
    for t in probes:
        cover = tuple(seg.id for seg in s.segments if seg.contains(t))
        hits = [f for f in families if f.contains(t)]
        if len(cover) < 2:
            assert hits == []
        else:
            assert len(hits) == 1 and hits[0].segments == cover


@settings(max_examples=30, deadline=None)
@given(structures(), st.randoms(use_true_random=False))
def test_reflexive_and_transitive(s, rnd):
    pts = [TimePoint(seg.id, (seg.lo + seg.hi) / 2) for seg in s.segments]
    pts += [TimePoint(sid, n.t) for n in s.nodes for sid in n.copies]
    for _ in range(100):
        p, q, r = (rnd.choice(pts) for _ in range(3))
        assert chron_leq(s, p, p)
        if chron_leq(s, p, q) and chron_leq(s, q, r):
            assert chron_leq(s, p, r)


def test_point_split_has_one_pair(point2):
    (pair,) = hausdorff_pairs(point2)
    assert {p.t for p in pair} == {0.0}
    assert all(point2.segment(p.segment).degenerate for p in pair)


def test_line_has_no_classes_and_quotient_is_identity():
    s = line()
    assert chron_equiv_classes(s) == []
    assert mccabe_quotient(s) == s


def test_b3_family_and_merge():
    s = split_division(line(), "s0", 0.0, 3)
    (fam,) = chron_equiv_classes(s)
    assert fam.size == 3
    q = mccabe_quotient(s)
    reps = {representative(q, TimePoint(sid, 0.0)) for sid in q.nodes[0].copies}
    assert len(reps) == 1


@settings(max_examples=50, deadline=None)
@given(structures())
def test_pairs_share_a_coordinate(s):
    for pair in hausdorff_pairs(s):
        p, q = tuple(pair)
        assert p != q and p.t == q.t
