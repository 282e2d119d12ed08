import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from looplab.errors import DimensionError, InvalidParameterError, InvalidStructureError
from looplab.geometry import (
    TILE_ARCS,
    AnnularPattern,
    Plaquette,
    Row,
    RowPair,
    act_row,
    act_stack,
    all_rows,
    compose_patterns,
    compose_with_loops,
    count_tiles,
    embed_matching,
    rotate_pattern,
    rotate_row,
    row_boundary_pairing,
    stack_boundary_pattern,
)
from looplab.matching import enumerate_matchings, is_noncrossing, parse_matching, rotate_matching
from oracles import ARCS, oracle_act, oracle_pat

ROT180 = {"N": "S", "S": "N", "E": "W", "W": "E"}


def pairing(row):
    return [x + 1 for x in row_boundary_pairing(Row(row)).partner]


def test_oracle_uses_the_library_tile_table():
    assert {k.value: v for k, v in TILE_ARCS.items()} == ARCS


def test_tiles_are_symmetric_under_half_turn():
    for kind, arcs in TILE_ARCS.items():
        turned = {frozenset((ROT180[a], ROT180[b])) for a, b in arcs}
        assert turned == {frozenset(a) for a in arcs}, kind


def test_uniform_rows_are_shifts():
    L = 4
    # Labels 1..4 bottom, 5..8 top (5 = T1). All-l: bottom i to top above column i-1.
    assert pairing("llll") == [8, 5, 6, 7, 2, 3, 4, 1]
    # All-r: bottom i to top above column i+1.
    assert pairing("rrrr") == [6, 7, 8, 5, 4, 1, 2, 3]
    for i in range(L):
        assert pairing("llll")[i] == L + 1 + (i - 1) % L


def test_alternating_row_caps_every_strand():
    p = row_boundary_pairing(Row("rlrl"))
    assert [x + 1 for x in p.partner] == [2, 1, 4, 3, 8, 7, 6, 5]
    assert p.open_strands() == []


@pytest.mark.parametrize("L", [2, 4, 6, 8])
def test_row_pairing_matches_graph_oracle(L):
    for row in all_rows(L):
        assert row_boundary_pairing(row).partner == oracle_pat_single(row.tiles)


def oracle_pat_single(tiles):
    # A single row is a two-row stack whose top row is replaced by nothing:
    # use the graph oracle on a one-row stack.
    from oracles import boundary_partner, stack_graph

    return boundary_partner(stack_graph([tiles], len(tiles)), len(tiles))


@pytest.mark.parametrize("L", [2, 4, 6])
def test_stack_pattern_matches_graph_oracle(L):
    for top, bottom in product(all_rows(L), repeat=2):
        assert stack_boundary_pattern(RowPair(top, bottom)).partner == oracle_pat(top.tiles, bottom.tiles)


def test_stack_pattern_oracle_random_L8():
    rng = random.Random(11)
    for _ in range(2000):
        top = "".join(rng.choice("lr") for _ in range(8))
        bottom = "".join(rng.choice("lr") for _ in range(8))
        assert stack_boundary_pattern(RowPair(Row(top), Row(bottom))).partner == oracle_pat(top, bottom)


def test_compose_examples():
    ident = AnnularPattern.identity(4)
    for row in all_rows(4):
        P = row_boundary_pairing(row)
        assert compose_patterns(P, ident) == P
        assert compose_patterns(ident, P) == P
    assert compose_patterns(row_boundary_pairing(Row("llll")), row_boundary_pairing(Row("rrrr"))) == ident
    alt = row_boundary_pairing(Row("rlrl"))
    for row in all_rows(4):
        Q = row_boundary_pairing(row)
        assert compose_patterns(alt, Q).bottom_pairs() == alt.bottom_pairs()


def test_loops_are_counted_but_ignored():
    cap = row_boundary_pairing(Row("rlrl"))
    cup = row_boundary_pairing(Row("lrlr"))
    pattern, loops = compose_with_loops(cup, cap)
    assert loops >= 1
    assert pattern == compose_patterns(cup, cap)
    assert is_noncrossing(list(pattern.partner[:4]))


def test_act_examples():
    (only,) = enumerate_matchings(1)
    for row in all_rows(2):
        assert act_row(row, only) == only
    # The alternating row caps the bottom the same way whatever the input.
    for m in enumerate_matchings(2):
        assert act_row(Row("rlrl"), m) == parse_matching("(1,2),(3,4)")
    for n in (2, 3):
        for m in enumerate_matchings(n):
            assert act_row(Row.uniform("l", 2 * n), m) == rotate_matching(m, 1)
            assert act_row(Row.uniform("r", 2 * n), m) == rotate_matching(m, -1)


@pytest.mark.parametrize("L", [2, 4, 6, 8])
def test_act_row_is_noncrossing_and_matches_oracle(L):
    for row in all_rows(L):
        for m in enumerate_matchings(L // 2):
            out = act_row(row, m)
            assert is_noncrossing(out.partner)
            pairs = [(a - 1, b - 1) for a, b in m.pairs()]
            assert [(a - 1, b - 1) for a, b in out.pairs()] == oracle_act([row.tiles], pairs, L)


def test_act_stack():
    m = parse_matching("(1,6),(2,3),(4,5)")
    assert act_stack([], m) == m
    assert act_stack([Row("rrrrrr"), Row("llllll")], m) == m
    rows = [Row("rllrlr"), Row("llrrrl")]  # bottom, top
    assert act_stack(rows, m) == act_row(rows[0], act_row(rows[1], m))
    pairs = [(a - 1, b - 1) for a, b in m.pairs()]
    assert [(a - 1, b - 1) for a, b in act_stack(rows, m).pairs()] == oracle_act(
        [rows[1].tiles, rows[0].tiles], pairs, 6
    )


def test_stack_pattern_examples():
    for top, bottom in [("rrrr", "llll"), ("llll", "rrrr")]:
        assert stack_boundary_pattern(RowPair(Row(top), Row(bottom))) == AnnularPattern.identity(4)
    assert stack_boundary_pattern(RowPair(Row("ll"), Row("ll"))) == AnnularPattern.identity(2)


@pytest.mark.parametrize("L", [2, 4, 6])
def test_pattern_determines_stack_action(L):
    for top, bottom in product(all_rows(L), repeat=2):
        pat = stack_boundary_pattern(RowPair(top, bottom))
        for m in enumerate_matchings(L // 2):
            glued = compose_patterns(pat, embed_matching(m)).bottom_matching()
            assert glued == act_stack([bottom, top], m)


def test_count_tiles():
    assert count_tiles(Row("llllll"), "l") == 6
    assert count_tiles(Row("rlrl"), Plaquette.ELL) == 2
    for row in all_rows(6):
        assert count_tiles(row, "l") + count_tiles(row, "r") == 6


@pytest.mark.parametrize("L", [2, 4, 6, 8])
def test_rotation_equivariance(L):
    for row in all_rows(L):
        assert row_boundary_pairing(rotate_row(row, 1)) == rotate_pattern(row_boundary_pairing(row), 1)


rows8 = st.text("lr", min_size=8, max_size=8).map(Row)


@settings(max_examples=300)
@given(rows8, rows8, rows8)
def test_composition_is_associative(a, b, c):
    A, B, C = (row_boundary_pairing(r) for r in (a, b, c))
    assert compose_patterns(compose_patterns(A, B), C) == compose_patterns(A, compose_patterns(B, C))


def test_row_validation_and_json():
    for bad in ["", "lrl", "lx"]:
        with pytest.raises((InvalidParameterError, ValueError)):
            Row(bad)
    with pytest.raises(DimensionError):
        RowPair(Row("lr"), Row("lrlr"))
    with pytest.raises(DimensionError):
        act_row(Row("lr"), parse_matching("(1,2),(3,4)"))
    with pytest.raises(InvalidStructureError):
        AnnularPattern(2, (0, 1, 2, 3))
    pair = RowPair(Row("lrrl"), Row("rrll"))
    assert RowPair.from_json(pair.to_json()) == pair
    pat = stack_boundary_pattern(pair)
    assert AnnularPattern.from_json(pat.to_json()) == pat
    assert min(pat.to_json()["partner"]) == 1
    assert Row.from_mask(Row("lrrl").to_mask(), 4) == Row("lrrl")
    assert str(Row.alternating(4)) == "rlrl"
