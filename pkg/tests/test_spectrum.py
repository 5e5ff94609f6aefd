import numpy as np
import pytest
from hypothesis import given, strategies as st

from entrench.spectrum import (InfluenceKind, attitudes, influence, influence_table,
                               update_attitude, update_tables)

import reference as ref

COLS = (-2, -1, 1, 2)
# rows: focal attitude -2, -1, 1, 2; columns: partner attitude -2, -1, 1, 2
NO_AMP = [[-2, -1, -1, -1],
          [-2, -1, 1, 1],
          [-1, -1, 1, 2],
          [1, 1, 1, 2]]
AMP = [[-2, -2, -1, -1],
       [-2, -2, 1, 1],
       [-1, -1, 2, 2],
       [1, 1, 2, 2]]


@pytest.mark.parametrize("amplify,table", [(False, NO_AMP), (True, AMP)])
def test_update_table_L2(amplify, table):
    got = [[update_attitude(f, p, amplify, 2) for p in COLS] for f in COLS]
    assert got == table


def test_update_tables_array_matches_scalar():
    for L in (1, 2, 3, 5):
        T = update_tables(L)
        for amp in (0, 1):
            for f in attitudes(L):
                for p in attitudes(L):
                    assert T[amp, f + L, p + L] == update_attitude(f, p, bool(amp), L)


@pytest.mark.parametrize("focal,partner,amp,expected", [
    (-1, -1, True, -2),
    (2, 1, False, 1),
    (1, -2, False, -1),
    (-2, -1, True, -2),
])
def test_update_examples(focal, partner, amp, expected):
    assert update_attitude(focal, partner, amp, 2) == expected


@pytest.mark.parametrize("kind,a,expected", [
    ("quadratic", -2, 4), ("uniform", -2, 1), ("coquadratic", 1, 4),
    ("linear", -2, 2), ("colinear", 2, 1), ("colinear", -1, 2),
])
def test_influence_examples(kind, a, expected):
    assert influence(kind, a, 2) == expected


def test_influence_table_indexing():
    tab = influence_table(InfluenceKind.QUADRATIC, 3)
    assert tab.dtype == np.int64
    assert [tab[a + 3] for a in attitudes(3)] == [9, 4, 1, 1, 4, 9]


@pytest.mark.parametrize("bad", [0, 3, -3])
def test_rejects_invalid_attitudes(bad):
    with pytest.raises(ValueError):
        influence("uniform", bad, 2)
    with pytest.raises(ValueError):
        update_attitude(bad, 1, False, 2)
    with pytest.raises(ValueError):
        update_attitude(1, bad, True, 2)


def test_rejects_bad_spectrum():
    with pytest.raises(ValueError):
        attitudes(0)


def test_influence_kind_parse():
    assert InfluenceKind.parse("CoLinear") is InfluenceKind.COLINEAR
    assert InfluenceKind.parse(InfluenceKind.LINEAR) is InfluenceKind.LINEAR
    with pytest.raises(ValueError):
        InfluenceKind.parse("cubic")


@st.composite
def pair(draw):
    L = draw(st.integers(1, 9))
    vals = st.sampled_from(attitudes(L))
    return L, draw(vals), draw(vals), draw(st.booleans())


@given(pair())
def test_closure_and_mirror(args):
    L, f, p, amp = args
    r = update_attitude(f, p, amp, L)
    assert r != 0 and -L <= r <= L
    assert update_attitude(-f, -p, amp, L) == -r


@given(pair())
def test_matches_ladder_reference(args):
    L, f, p, amp = args
    assert update_attitude(f, p, amp, L) == ref.move(f, p, amp, L)


@given(pair())
def test_fixed_point_and_opposite_sign_equivalence(args):
    L, f, p, amp = args
    assert update_attitude(f, f, False, L) == f
    if (f > 0) != (p > 0):
        assert update_attitude(f, p, True, L) == update_attitude(f, p, False, L)


@given(st.sampled_from([-1, 1]), st.sampled_from([-1, 1]), st.booleans())
def test_L1_is_voter_rule(f, p, amp):
    assert update_attitude(f, p, amp, 1) == p


@given(pair(), st.sampled_from(list(InfluenceKind)))
def test_influence_positive_integer(args, kind):
    L, a, _, _ = args
    w = influence(kind, a, L)
    assert isinstance(w, int) and w > 0
    assert w == ref.weight(kind.value, a, L)
