import math

import pytest
from hypothesis import strategies as st

from branchtime.timeline import (
    DIVISION,
    STICKING,
    StructureError,
    identify,
    line,
    locate,
    split_division,
    split_point,
    split_sticking,
)


@pytest.fixture
def split2():
    """Split(R, [0, inf), 2) over the default horizon."""
    return split_division(line(), "s0", 0.0, 2)


@pytest.fixture
def stick2():
    """Split(R, (-inf, 0], 2)."""
    return split_sticking(line(), "s0", 0.0, 2)


@pytest.fixture
def point2():
    """Split(R, {0}, 2) with degenerate copies 0_1, 0_2."""
    return split_point(line(), "s0", 0.0, 2)


@pytest.fixture
def loop020(split2):
    """structure(0,2,0) with -pi glued to +pi on branch 1."""
    return identify(split2, locate(split2, [1], math.pi), locate(split2, [], -math.pi))


def tree3(b=3):
    """Divisions at 0, 1 (on [1]) and 2 (on [1,1]); 2 + 2 + 3 = 7 leaves for b=3."""
    s = split_division(line(), "s0", 0.0, b)
    s = split_division(s, locate(s, [1], 0.5).segment, 1.0, b)
    return split_division(s, locate(s, [1, 1], 1.5).segment, 2.0, b)


_BUILD = {DIVISION: split_division, STICKING: split_sticking}


@st.composite
def structures(draw, max_events=4, kinds=(DIVISION, STICKING)):
    """Random identification-free structures built only through the public builders."""
    s = line()
    events = draw(st.lists(
        st.tuples(
            st.sampled_from(kinds),
            st.integers(0, 10_000),
            st.floats(0.05, 0.95),
            st.integers(2, 3),
        ),
        max_size=max_events,
    ))
    for kind, pick, frac, b in events:
        seg = s.segments[pick % len(s.segments)]
        if seg.degenerate:
            continue
        t = seg.lo + frac * (seg.hi - seg.lo)
        try:
            s = _BUILD[kind](s, seg.id, t, b)
        except StructureError:
            continue
    return s
