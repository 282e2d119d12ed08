import pytest
from hypothesis import given, strategies as st

from looplab.errors import InvalidParameterError, InvalidStructureError, MatchingParseError
from looplab.matching import (
    NoncrossingMatching,
    catalan,
    enumerate_matchings,
    format_matching,
    is_noncrossing,
    parse_matching,
    rotate_matching,
)
from oracles import catalan_recurrence, crosses, perfect_matchings


def M(text):
    return parse_matching(text)


def test_small_enumerations():
    assert [format_matching(m) for m in enumerate_matchings(1)] == ["(1,2)"]
    assert [format_matching(m) for m in enumerate_matchings(2)] == ["(1,2),(3,4)", "(1,4),(2,3)"]


@pytest.mark.parametrize("n", range(1, 9))
def test_counts_match_catalan_recurrence(n):
    ms = enumerate_matchings(n)
    assert len(ms) == catalan_recurrence(n) == catalan(n)
    assert len(set(ms)) == len(ms)


@pytest.mark.parametrize("n", range(1, 6))
def test_enumeration_equals_brute_force_filter(n):
    brute = {
        frozenset(frozenset(p) for p in m)
        for m in perfect_matchings(list(range(1, 2 * n + 1)))
        if not crosses(m)
    }
    ours = {frozenset(frozenset(p) for p in m.pairs()) for m in enumerate_matchings(n)}
    assert ours == brute


def test_enumeration_is_lexicographic():
    for n in range(1, 7):
        ms = enumerate_matchings(n)
        assert list(ms) == sorted(ms, key=lambda m: m.partner)


@pytest.mark.parametrize("n", [0, -1, 2.0])
def test_enumerate_rejects_bad_n(n):
    with pytest.raises(InvalidParameterError):
        enumerate_matchings(n)


def test_is_noncrossing_examples():
    assert is_noncrossing([1, 0, 3, 2])
    assert not is_noncrossing([2, 3, 0, 1])
    assert is_noncrossing([5, 4, 3, 2, 1, 0])


def test_rotation_examples():
    assert rotate_matching(M("(1,2),(3,4)"), 1) == M("(2,3),(4,1)")
    assert rotate_matching(M("(1,6),(2,3),(4,5)"), 2) == M("(3,2),(4,5),(6,1)")
    for n in range(1, 6):
        for m in enumerate_matchings(n):
            assert rotate_matching(m, 2 * n) == m
            assert rotate_matching(rotate_matching(m, 3), -3) == m


def test_parse_and_format():
    assert M("(1,2),(3,4)").partner == (1, 0, 3, 2)
    assert format_matching(M("(2,3), (4,1)")) == "(1,4),(2,3)"
    with pytest.raises(MatchingParseError, match=r"crossing at \(1,3\),\(2,4\)"):
        M("(1,3),(2,4)")
    for bad in ["", "(1,2),(2,3)", "(1,1)", "(1,2),(3,5)", "(0,1)", "1,2", "(1,2),(3,4) junk"]:
        with pytest.raises(MatchingParseError):
            M(bad)


def test_constructor_validates():
    with pytest.raises(InvalidStructureError):
        NoncrossingMatching((2, 3, 0, 1))
    with pytest.raises(InvalidStructureError):
        NoncrossingMatching((1, 1))
    with pytest.raises(InvalidStructureError):
        NoncrossingMatching((0,))


@given(st.integers(1, 6).flatmap(lambda n: st.sampled_from(enumerate_matchings(n))), st.integers(-20, 20))
def test_rotation_is_a_group_action(m, k):
    r = rotate_matching(m, k)
    assert is_noncrossing(r.partner)
    assert rotate_matching(r, -k) == m
    assert parse_matching(format_matching(r)) == r
    assert NoncrossingMatching.from_json(r.to_json()) == r
