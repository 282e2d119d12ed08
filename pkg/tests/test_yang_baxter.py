from fractions import Fraction as F
from itertools import product

import networkx as nx
import pytest
import sympy

from looplab.errors import InvalidParameterError, ResourceLimitError, SingularParameterError
from looplab.geometry import Plaquette
from looplab.yang_baxter import (
    AuxState,
    Side,
    aux_pair,
    aux_pairing,
    aux_single,
    bijective_row_switch,
    expected_weight_formulas,
    s_equation,
    solve_s,
    triangle_distribution,
    triangle_pattern,
    verify_yang_baxter,
    verify_yang_baxter_symbolic,
    verify_aux_composition,
    verify_row_switch,
)
from oracles import ARCS, oracle_pat

p_, q_, s_ = sympy.symbols("p q s")
S_CLOSED = (1 - q_ + p_ * q_) / (1 - p_ + p_ * q_)

# The two arrangements, restated for the oracle: each tile maps its ports to
# node names; integers are boundary points 1..6.
ORACLE_LAYOUT = {
    "aux-left": {
        "p": {"N": 3, "E": 2, "S": "m", "W": "a1"},
        "q": {"N": "m", "E": 1, "S": 6, "W": "a2"},
        "aux": {"LT": 4, "LB": 5, "RT": "a1", "RB": "a2"},
    },
    "aux-right": {
        "q": {"N": 3, "E": "a1", "S": "m", "W": 4},
        "p": {"N": "m", "E": "a2", "S": 6, "W": 5},
        "aux": {"LT": "a1", "LB": "a2", "RT": 2, "RB": 1},
    },
}
AUX_ARCS = {"pass": (("LT", "RT"), ("LB", "RB")), "reflect": (("LT", "LB"), ("RT", "RB"))}


def oracle_distribution(side):
    out = {}
    lay = ORACLE_LAYOUT[side]
    for pt, qt, aux in product("lr", "lr", ("pass", "reflect")):
        g = nx.Graph()
        for name, t in (("p", pt), ("q", qt)):
            for a, b in ARCS[t]:
                g.add_edge(lay[name][a], lay[name][b])
        for a, b in AUX_ARCS[aux]:
            g.add_edge(lay["aux"][a], lay["aux"][b])
        comps = (frozenset(v for v in c if isinstance(v, int)) for c in nx.connected_components(g))
        key = frozenset(c for c in comps if c)
        w = (p_ if pt == "l" else 1 - p_) * (q_ if qt == "l" else 1 - q_) * (s_ if aux == "pass" else 1 - s_)
        out[key] = sympy.expand(out.get(key, 0) + w)
    return out


def as_key(pairing):
    return frozenset(frozenset(pair) for pair in pairing)


def test_aux_pairings():
    assert set(map(frozenset, aux_pairing(AuxState.PASS))) == {frozenset(("LT", "RT")), frozenset(("LB", "RB"))}
    assert set(map(frozenset, aux_pairing("reflect"))) == {frozenset(("LT", "LB")), frozenset(("RT", "RB"))}


def test_library_traces_match_oracle():
    for side in Side:
        oracle = oracle_distribution(side.value)
        lib = triangle_distribution(side, F(2, 7), F(3, 5), F(4, 9))
        assert {as_key(k) for k in lib} == set(oracle)
        for k, w in lib.items():
            assert w == F(str(oracle[as_key(k)].subs({p_: F(2, 7), q_: F(3, 5), s_: F(4, 9)})))


def test_oracle_confirms_yang_baxter_symbolically():
    left, right = oracle_distribution("aux-left"), oracle_distribution("aux-right")
    assert len(left) == len(right) == 5
    for k in left:
        assert sympy.simplify((left[k] - right[k]).subs(s_, S_CLOSED)) == 0
    expected = [
        p_ * q_ * s_,
        (1 - p_) * (1 - q_) * s_,
        (1 - p_) * q_ * (1 - s_),
        (1 - p_) * q_ * s_,
    ]
    values = list(left.values())
    for e in expected:
        match = [v for v in values if sympy.expand(v - e) == 0]
        assert len(match) == 1
        values.remove(match[0])
    assert sympy.expand(values[0] - (1 - sum(expected))) == 0


def test_weight_formulas_are_the_computed_weights():
    p, q, s = (F(1, 4), F(1, 2), F(5, 7))
    got = sorted(triangle_distribution(Side.AUX_LEFT, p, q, s).values())
    assert got == sorted(f(p, q, s) for f in expected_weight_formulas())


def test_solve_s():
    for x in (F(0), F(1, 3), F(2), F(-1, 2)):
        assert solve_s(x, x) == 1
    assert solve_s(0, 1) == 0
    assert solve_s(F(1, 4), F(1, 2)) == F(5, 7)
    with pytest.raises(SingularParameterError):
        solve_s(1, 0)


def test_yang_baxter_examples():
    r = verify_yang_baxter(F(1, 4), F(1, 2))
    assert r["holds"] and r["s"] == "5/7" and r["unique"]
    assert verify_yang_baxter("1/2", "1/2")["s"] == "1/1"
    assert verify_yang_baxter(F(2, 3), F(1, 3))["holds"]


def test_yang_baxter_symbolic():
    r = verify_yang_baxter_symbolic()
    assert r["holds"] and r["patterns"] == 5 and r["weight_formulas_match"]


GRID10 = [F(k, 11) for k in range(1, 11)]


def test_yang_baxter_on_grid_with_signed_points():
    signed = 0
    for p, q in product(GRID10, repeat=2):
        r = verify_yang_baxter(p, q)
        assert r["holds"], (p, q)
        signed += p > q
    assert signed == 45


def test_perturbed_s_breaks_equality():
    for p, q in ((F(1, 4), F(1, 2)), (F(2, 3), F(1, 3))):
        s = solve_s(p, q) + F(1, 1000)
        left = triangle_distribution(Side.AUX_LEFT, p, q, s)
        right = triangle_distribution(Side.AUX_RIGHT, p, q, s)
        assert any(left[k] != right.get(k) for k in left)


def test_s_equation_has_a_single_root():
    c1, c0 = s_equation(F(1, 4), F(1, 2))
    assert c1 != 0 and -c0 / c1 == F(5, 7)


def test_five_patterns_each_side_and_unit_total():
    for side in Side:
        d = triangle_distribution(side, F(3, 10), F(7, 10), solve_s(F(3, 10), F(7, 10)))
        assert len(d) == 5 and sum(d.values()) == 1
    key = triangle_pattern(Side.AUX_LEFT, Plaquette.ELL, Plaquette.ELL, AuxState.PASS)
    assert len(key) == 3


def test_aux_composition():
    assert verify_aux_composition(F(1, 3), 1)["holds"]
    assert aux_pair(F(1, 2), F(1, 2)) == aux_single(F(1, 4))
    assert sorted(aux_single(F(1, 4)).values()) == [F(1, 4), F(3, 4)]
    r = verify_aux_composition(2, F(1, 2))
    assert r["holds"]
    nonzero = lambda d: {k: v for k, v in d.items() if v}  # noqa: E731
    assert nonzero(aux_pair(2, F(1, 2))) == nonzero(aux_single(1))
    assert sorted(aux_pair(2, F(1, 2)).values()) == [0, 1]
    # Reflect beside anything reflects the outer points.
    assert aux_pair(0, F(3, 7)) == aux_single(0)


@pytest.mark.parametrize("L", [2, 4, 6])
def test_row_switch_symbolic(L):
    r = verify_row_switch(L)
    assert r["holds"] and r["weight_maps_equal"] and r["bijective"]


def test_row_switch_l4_against_sympy_oracle():
    L = 4
    a, b = {}, {}
    for top, bottom in product(product("lr", repeat=L), repeat=2):
        top, bottom = "".join(top), "".join(bottom)
        key = oracle_pat(top, bottom)
        bern = lambda x, row: x ** row.count("l") * (1 - x) ** row.count("r")  # noqa: E731
        a[key] = a.get(key, 0) + bern(p_, top) * bern(q_, bottom)
        b[key] = b.get(key, 0) + bern(q_, top) * bern(p_, bottom)
    assert all(sympy.expand(a[k] - b[k]) == 0 for k in a)
    assert len(a) == verify_row_switch(L)["patterns"]


def test_row_switch_rational_and_trivial():
    assert verify_row_switch(8, F(1, 3), F(3, 4))["holds"]
    assert verify_row_switch(4, F(2, 5), F(2, 5), bijective=False)["holds"]
    assert verify_row_switch(6, F(3, 2), F(-1, 2), bijective=False)["holds"]


def test_bijective_refinement_l8():
    assert bijective_row_switch(8)["holds"]


def test_row_switch_errors():
    with pytest.raises(InvalidParameterError):
        verify_row_switch(3)
    with pytest.raises(ResourceLimitError):
        verify_row_switch(10)
    with pytest.raises(InvalidParameterError):
        verify_row_switch(4, F(1, 2), None)
