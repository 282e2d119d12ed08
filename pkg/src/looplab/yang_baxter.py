"""
The algebraic route to commutation: auxiliary plaquettes and the Yang-Baxter move.

An auxiliary plaquette is a 1x2 rectangle with two endpoints on each side.
In the pass-through state (weight s) its strands run straight across
(LT-RT, LB-RB); in the reflect state (weight 1-s) each side is capped
(LT-LB, RT-RB). Weights are exact rationals or :class:`~looplab.poly.Poly`
values and may be negative; every identity here is checked as an equality
of signed measures.

Boundary labels of the three-plaquette arrangements::

    aux on the left                     aux on the right
          3                                  3
      +---+---+                          +---+---+
    4 |   | p | 2                      4 | q |   | 2
      | s +---+                          +---+ s |
    5 |   | q | 1                      5 | p |   | 1
      +---+---+                          +---+---+
          6                                  6
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Hashable, Iterable, Mapping, Union

from .errors import InvalidParameterError, ResourceLimitError, SingularParameterError
from .geometry import TILE_ARCS, Plaquette, pat_partner
from .involution import _involution
from .poly import Poly, format_rational, to_rational

Weight = Union[Fraction, Poly]
Pairing = tuple[tuple[Hashable, Hashable], ...]
PatternWeights = dict

DEFAULT_MAX_WIDTH = 8


class AuxState(str, Enum):
    PASS = "pass-through"
    REFLECT = "reflect"


class Side(str, Enum):
    AUX_LEFT = "aux-left"
    AUX_RIGHT = "aux-right"


def aux_pairing(state: AuxState | str) -> Pairing:
    if AuxState(state) is AuxState.PASS:
        return (("LB", "RB"), ("LT", "RT"))
    return (("LB", "LT"), ("RB", "RT"))


def trace_pairing(edges: Iterable[tuple[Hashable, Hashable]], endpoints: Iterable[Hashable]) -> Pairing:
    """Follow strands through a graph of degree <= 2 and pair up the given endpoints."""
    adj: dict[Hashable, list[Hashable]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    ends = list(endpoints)
    ext = set(ends)
    pairs = []
    done: set[Hashable] = set()
    for start in ends:
        if start in done:
            continue
        prev, cur = start, adj[start][0]
        while cur not in ext:
            nxt = adj[cur]
            prev, cur = cur, (nxt[1] if nxt[0] == prev and len(nxt) > 1 else nxt[0])
        done.update((start, cur))
        pairs.append(tuple(sorted((start, cur), key=str)))
    return tuple(sorted(pairs, key=str))


def _tile_edges(kind: Plaquette, ports: Mapping[str, Hashable]) -> list[tuple[Hashable, Hashable]]:
    return [(ports[a], ports[b]) for a, b in TILE_ARCS[kind]]


def _aux_edges(state: AuxState, ports: Mapping[str, Hashable]) -> list[tuple[Hashable, Hashable]]:
    return [(ports[a], ports[b]) for a, b in aux_pairing(state)]


# Port maps for the two arrangements. Internal points are strings, boundary points 1..6.
_LAYOUTS = {
    Side.AUX_LEFT: {
        "p": {"N": 3, "E": 2, "S": "mid", "W": "aux-hi"},
        "q": {"N": "mid", "E": 1, "S": 6, "W": "aux-lo"},
        "aux": {"LT": 4, "LB": 5, "RT": "aux-hi", "RB": "aux-lo"},
    },
    Side.AUX_RIGHT: {
        "q": {"N": 3, "E": "aux-hi", "S": "mid", "W": 4},
        "p": {"N": "mid", "E": "aux-lo", "S": 6, "W": 5},
        "aux": {"LT": "aux-hi", "LB": "aux-lo", "RT": 2, "RB": 1},
    },
}


@lru_cache(maxsize=None)
def triangle_pattern(side: Side | str, p_tile: Plaquette, q_tile: Plaquette, aux: AuxState) -> Pairing:
    layout = _LAYOUTS[Side(side)]
    edges = (
        _tile_edges(Plaquette(p_tile), layout["p"])
        + _tile_edges(Plaquette(q_tile), layout["q"])
        + _aux_edges(AuxState(aux), layout["aux"])
    )
    return trace_pairing(edges, range(1, 7))


def _bias(x: Weight, tile: Plaquette) -> Weight:
    return x if tile is Plaquette.ELL else 1 - x


def _aux_bias(s: Weight, state: AuxState) -> Weight:
    return s if state is AuxState.PASS else 1 - s


def _accumulate(weights: dict, key, w: Weight) -> None:
    weights[key] = weights[key] + w if key in weights else w


def triangle_distribution(side: Side | str, p: Weight, q: Weight, s: Weight) -> PatternWeights:
    """Signed measure on pairings of the 6 boundary points of one arrangement."""
    side = Side(side)
    out: PatternWeights = {}
    for pt, qt, aux in product(Plaquette, Plaquette, AuxState):
        w = _bias(p, pt) * _bias(q, qt) * _aux_bias(s, aux)
        _accumulate(out, triangle_pattern(side, pt, qt, aux), w)
    return out


def solve_s(p, q) -> Fraction:
    """The auxiliary bias (1 - q + pq) / (1 - p + pq) that makes the Yang-Baxter move work."""
    p, q = to_rational(p), to_rational(q)
    den = 1 - p + p * q
    if den == 0:
        raise SingularParameterError(f"1 - p + pq vanishes at p={p}, q={q}")
    return (1 - q + p * q) / den


def _weights_equal(a: Mapping, b: Mapping) -> bool:
    keys = set(a) | set(b)
    return all(a.get(k, 0) - b.get(k, 0) == 0 for k in keys)


def _total(weights: Mapping) -> Weight:
    return sum(weights.values(), Fraction(0))


def _report(claim: str, holds: bool, **extra) -> dict:
    out = {"claim": claim, "holds": bool(holds)}
    out.update(extra)
    return out


def _weights_json(weights: Mapping) -> dict:
    def fmt(w):
        return format_rational(w) if isinstance(w, Fraction) else repr(w)

    return {" ".join(f"{a}-{b}" for a, b in key): fmt(w) for key, w in sorted(weights.items(), key=str)}


def s_equation(p, q) -> tuple[Fraction, Fraction]:
    """Coefficients (c1, c0) of the equations c1*s + c0 = 0 forced by equal distributions.

    Each pattern's weight difference is affine in s; all non-trivial ones must
    share a root. Returns the pair for the first non-trivial pattern and raises
    if the patterns disagree or none depends on s.
    """
    p, q = to_rational(p), to_rational(q)
    d0 = _difference(p, q, Fraction(0))
    d1 = {k: v - d0.get(k, 0) for k, v in _difference(p, q, Fraction(1)).items()}
    eqs = [(d1.get(k, 0), d0.get(k, 0)) for k in set(d0) | set(d1)]
    live = [(c1, c0) for c1, c0 in eqs if c1 != 0]
    if not live:
        raise SingularParameterError(f"no pattern weight depends on s at p={p}, q={q}")
    roots = {-c0 / c1 for c1, c0 in live}
    if len(roots) != 1 or any(c1 == 0 and c0 != 0 for c1, c0 in eqs):
        raise InvalidParameterError(f"pattern equations are inconsistent at p={p}, q={q}")
    return live[0]


def _difference(p, q, s) -> dict:
    left = triangle_distribution(Side.AUX_LEFT, p, q, s)
    right = triangle_distribution(Side.AUX_RIGHT, p, q, s)
    return {k: left.get(k, 0) - right.get(k, 0) for k in set(left) | set(right)}


def verify_yang_baxter(p, q) -> dict:
    """Check the Yang-Baxter move at one rational point (p, q); signed weights allowed."""
    p, q = to_rational(p), to_rational(q)
    s = solve_s(p, q)
    left = triangle_distribution(Side.AUX_LEFT, p, q, s)
    right = triangle_distribution(Side.AUX_RIGHT, p, q, s)
    equal = _weights_equal(left, right)
    c1, c0 = s_equation(p, q)
    unique = c1 != 0 and -c0 / c1 == s
    return _report(
        "aux-left and aux-right arrangements have equal pattern distributions",
        equal and unique and _total(left) == 1 and _total(right) == 1,
        p=format_rational(p),
        q=format_rational(q),
        s=format_rational(s),
        equal=equal,
        unique=unique,
        weights=_weights_json(left),
    )


def _pqs() -> tuple[Poly, Poly, Poly]:
    return Poly.var(3, 0), Poly.var(3, 1), Poly.var(3, 2)


def expected_weight_formulas() -> list[Poly]:
    """The five expected pattern weights as polynomials in (p, q, s)."""
    p, q, s = _pqs()
    return [
        p * q * s,
        (1 - p) * (1 - q) * s,
        (1 - p) * q * (1 - s),
        (1 - p) * q * s,
        p * q * (1 - s) + p * (1 - q) * s + p * (1 - q) * (1 - s) + (1 - p) * (1 - q) * (1 - s),
    ]


def verify_yang_baxter_symbolic() -> dict:
    """Symbolic check in (p, q, s) with s eliminated through its closed form.

    Every weight is affine in s, so a difference d0 + d1*s vanishes at
    s = N/D exactly when d0*D + d1*N is the zero polynomial.
    """
    p, q, s = _pqs()
    left = triangle_distribution(Side.AUX_LEFT, p, q, s)
    right = triangle_distribution(Side.AUX_RIGHT, p, q, s)
    num = 1 - q + p * q
    den = 1 - p + p * q
    equal = True
    depends_on_s = False
    for key in set(left) | set(right):
        d = left.get(key, 0) - right.get(key, 0)
        d = d if isinstance(d, Poly) else Poly.constant(3, d)
        d0 = d.substitute(2, 0)
        d1 = d.substitute(2, 1) - d0
        if not d1.is_zero():
            depends_on_s = True
        if not (d0 * den + d1 * num).is_zero():
            equal = False
    expected = sorted(expected_weight_formulas(), key=repr)
    multiset_left = sorted(left.values(), key=repr) == expected
    multiset_right = sorted(right.values(), key=repr) == expected
    totals = _total(left) == 1 and _total(right) == 1
    return _report(
        "Yang-Baxter move holds identically in (p, q) with s = (1-q+pq)/(1-p+pq)",
        equal and depends_on_s and multiset_left and multiset_right and totals,
        equal=equal,
        unique=depends_on_s,
        patterns=len(left),
        weight_formulas_match=multiset_left and multiset_right,
        weights=_weights_json(left),
    )


# --- auxiliary plaquette composition ----------------------------------------------------


def aux_single(s: Weight) -> PatternWeights:
    ports = {"LT": 3, "LB": 4, "RT": 2, "RB": 1}
    out: PatternWeights = {}
    for state in AuxState:
        _accumulate(out, trace_pairing(_aux_edges(state, ports), (1, 2, 3, 4)), _aux_bias(s, state))
    return out


def aux_pair(s: Weight, t: Weight) -> PatternWeights:
    """Two auxiliary plaquettes side by side, bias s on the left and t on the right."""
    left_ports = {"LT": 3, "LB": 4, "RT": "mid-hi", "RB": "mid-lo"}
    right_ports = {"LT": "mid-hi", "LB": "mid-lo", "RT": 2, "RB": 1}
    out: PatternWeights = {}
    for a, b in product(AuxState, AuxState):
        edges = _aux_edges(a, left_ports) + _aux_edges(b, right_ports)
        _accumulate(out, trace_pairing(edges, (1, 2, 3, 4)), _aux_bias(s, a) * _aux_bias(t, b))
    return out


def verify_aux_composition(s, t) -> dict:
    s, t = to_rational(s), to_rational(t)
    pair = aux_pair(s, t)
    single = aux_single(s * t)
    return _report(
        "aux(s) beside aux(t) has the law of aux(st)",
        _weights_equal(pair, single) and _total(pair) == 1,
        s=format_rational(s),
        t=format_rational(t),
        weights=_weights_json(pair),
    )


# --- row switching ----------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class BernsteinWeight:
    """Product of factors ``x**a * (1-x)**(L-a)``, one per (variable, l-count) entry.

    Products of such factors in distinct variables are linearly independent, so
    two of them are equal as polynomials iff their factor multisets agree.
    """

    width: int
    factors: tuple[tuple[str, int], ...]

    def to_poly(self, names: tuple[str, ...] = ("p", "q")) -> Poly:
        out = Poly.constant(len(names), 1)
        for name, a in self.factors:
            out = out * _bernstein(len(names), names.index(name), a, self.width)
        return out

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        out = Fraction(1)
        for name, a in self.factors:
            x = values[name]
            out *= x**a * (1 - x) ** (self.width - a)
        return out


def config_weight(top: str, bottom: str, *, top_var: str, bottom_var: str) -> BernsteinWeight:
    factors = ((top_var, top.count("l")), (bottom_var, bottom.count("l")))
    return BernsteinWeight(len(top), tuple(sorted(factors)))


@lru_cache(maxsize=None)
def _bernstein(nvars: int, index: int, a: int, width: int) -> Poly:
    x = Poly.var(nvars, index)
    return x**a * (1 - x) ** (width - a)


def _row_strings(width: int) -> list[str]:
    return ["".join(t) for t in product("lr", repeat=width)]


def row_switch_weights(width: int, p: Weight, q: Weight) -> tuple[PatternWeights, PatternWeights]:
    """Pattern laws of the (p over q) and (q over p) double rows.

    Returned maps are keyed by the 0-based Pat partner tuple.
    """
    classes: dict[tuple, int] = {}
    rows = _row_strings(width)
    for top in rows:
        a = top.count("l")
        for bottom in rows:
            key = (pat_partner(top, bottom), a, bottom.count("l"))
            classes[key] = classes.get(key, 0) + 1

    symbolic = isinstance(p, Poly)

    def bern(x: Weight, k: int) -> Weight:
        if symbolic:
            index = 0 if x is p else 1
            return _bernstein(x.nvars, index, k, width)
        return x**k * (1 - x) ** (width - k)

    p_over_q: PatternWeights = {}
    q_over_p: PatternWeights = {}
    for (pat, a_top, a_bottom), count in classes.items():
        _accumulate(p_over_q, pat, count * bern(p, a_top) * bern(q, a_bottom))
        _accumulate(q_over_p, pat, count * bern(q, a_top) * bern(p, a_bottom))
    return p_over_q, q_over_p


def verify_row_switch(width: int, p=None, q=None, *, bijective: bool = True,
                      max_width: int = DEFAULT_MAX_WIDTH) -> dict:
    """Equal pattern laws for (p over q) and (q over p); symbolic when p and q are omitted.

    With ``bijective=True`` also checks, configuration by configuration, that
    V keeps Pat and carries the (p bottom, q top) weight of x to the
    (q bottom, p top) weight of V(x).
    """
    if width < 2 or width % 2:
        raise InvalidParameterError(f"width L must be even and >= 2, got {width}")
    if width > max_width:
        raise ResourceLimitError(f"L={width} exceeds the configured bound L <= {max_width}")
    if (p is None) != (q is None):
        raise InvalidParameterError("give both p and q, or neither for the symbolic check")
    if p is None:
        pv, qv = Poly.var(2, 0), Poly.var(2, 1)
        mode = "symbolic"
    else:
        pv, qv = to_rational(p), to_rational(q)
        mode = "rational"
    upper, lower = row_switch_weights(width, pv, qv)
    equal = _weights_equal(upper, lower)
    totals = _total(upper) == 1 and _total(lower) == 1
    extra = {}
    witness = None
    if bijective:
        bij = bijective_row_switch(width)
        extra["bijective"] = bij["holds"]
        witness = bij.get("witness")
        equal_all = equal and bij["holds"]
    else:
        equal_all = equal
    return _report(
        f"(p over q) and (q over p) double rows have equal pattern laws, L = {width}",
        equal_all and totals,
        width=width,
        mode=mode,
        p=None if p is None else format_rational(pv),
        q=None if q is None else format_rational(qv),
        weight_maps_equal=equal,
        patterns=len(upper),
        witness=witness,
        **extra,
    )


def bijective_row_switch(width: int) -> dict:
    """Pointwise refinement through V over all 4^L configurations."""
    rows = _row_strings(width)
    checked = 0
    for top in rows:
        for bottom in rows:
            checked += 1
            vt, vb = _involution(top, bottom)
            before = config_weight(top, bottom, top_var="q", bottom_var="p")
            after = config_weight(vt, vb, top_var="p", bottom_var="q")
            if before != after or pat_partner(vt, vb) != pat_partner(top, bottom):
                return _report(
                    "V matches (p,q)-weights to (q,p)-weights within Pat classes",
                    False,
                    checked=checked,
                    witness={"top": top, "bottom": bottom},
                )
    return _report("V matches (p,q)-weights to (q,p)-weights within Pat classes", True, checked=checked)
