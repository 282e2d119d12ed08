"""
Noncrossing matchings (link patterns) of 2n points.

Points are stored 0-based internally: ``partner[i] == j`` means point ``i+1``
is joined to point ``j+1`` in the usual 1-based labelling used by the text and
JSON formats. Points run counterclockwise around the circle, which is the same
order as left-to-right on the line picture.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import InvalidParameterError, InvalidStructureError, MatchingParseError


def _check_involution(partner: Sequence[int]) -> None:
    size = len(partner)
    if size == 0 or size % 2:
        raise InvalidStructureError(f"a matching needs an even, positive number of points, got {size}")
    for i, j in enumerate(partner):
        if not 0 <= j < size:
            raise InvalidStructureError(f"point {i + 1} is joined to {j + 1}, outside 1..{size}")
        if j == i:
            raise InvalidStructureError(f"point {i + 1} is joined to itself")
        if partner[j] != i:
            raise InvalidStructureError(f"not an involution: {i + 1}->{j + 1} but {j + 1}->{partner[j] + 1}")


def _first_crossing(partner: Sequence[int]) -> tuple[tuple[int, int], tuple[int, int]] | None:
    # A matching of points on a line is noncrossing iff its arcs nest like brackets.
    stack: list[int] = []
    for i, j in enumerate(partner):
        if i < j:
            stack.append(i)
        else:
            top = stack.pop()
            if top != j:
                a, b = sorted((j, top))
                return (a, partner[a]), (b, partner[b])
    return None


def is_noncrossing(partner: Sequence[int]) -> bool:
    """True iff no a<b<c<d has a-c and b-d joined (0-based partner array)."""
    _check_involution(partner)
    return _first_crossing(partner) is None


@dataclass(frozen=True, order=True)
class NoncrossingMatching:
    partner: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "partner", tuple(self.partner))
        _check_involution(self.partner)
        crossing = _first_crossing(self.partner)
        if crossing is not None:
            (a, c), (b, d) = crossing
            raise InvalidStructureError(f"crossing at ({a + 1},{c + 1}),({b + 1},{d + 1})")

    @property
    def n(self) -> int:
        return len(self.partner) // 2

    @property
    def size(self) -> int:
        return len(self.partner)

    def pairs(self) -> list[tuple[int, int]]:
        """1-based pairs ``(a, b)`` with ``a < b``, sorted by ``a``."""
        return [(i + 1, j + 1) for i, j in enumerate(self.partner) if i < j]

    def __str__(self) -> str:
        return format_matching(self)

    def to_json(self) -> dict:
        return {"n": self.n, "partner": [j + 1 for j in self.partner]}

    @classmethod
    def from_json(cls, data: dict) -> "NoncrossingMatching":
        partner = [int(j) - 1 for j in data["partner"]]
        if "n" in data and 2 * int(data["n"]) != len(partner):
            raise InvalidStructureError(f"n={data['n']} does not match {len(partner)} partner entries")
        return cls(tuple(partner))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]]) -> "NoncrossingMatching":
        """Build from 1-based pairs, e.g. ``[(1, 4), (2, 3)]``."""
        size = 2 * len(pairs)
        partner = [-1] * size
        for a, b in pairs:
            partner[a - 1] = b - 1
            partner[b - 1] = a - 1
        return cls(tuple(partner))


def catalan(n: int) -> int:
    from math import comb

    return comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def _matchings(n: int) -> tuple[NoncrossingMatching, ...]:
    size = 2 * n
    partner = [-1] * size

    def fill(lo: int, hi: int) -> Iterator[None]:
        # Fill points lo..hi-1; point lo may only join lo+1, lo+3, ... to stay noncrossing.
        if lo == hi:
            yield
            return
        for mate in range(lo + 1, hi, 2):
            partner[lo], partner[mate] = mate, lo
            for _ in fill(lo + 1, mate):
                yield from fill(mate + 1, hi)

    # Choosing the mate of the first unfilled point in increasing order yields
    # lexicographic order on the partner sequence.
    return tuple(NoncrossingMatching(tuple(partner)) for _ in fill(0, size))


def enumerate_matchings(n: int) -> tuple[NoncrossingMatching, ...]:
    """All of NC_n in lexicographic order of the partner sequence."""
    if not isinstance(n, int) or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n!r}")
    return _matchings(n)


def rotate_matching(matching: NoncrossingMatching, steps: int) -> NoncrossingMatching:
    """Point ``i+steps`` is joined to ``j+steps`` whenever ``i`` is joined to ``j``."""
    size = matching.size
    new = [0] * size
    for i, j in enumerate(matching.partner):
        new[(i + steps) % size] = (j + steps) % size
    return NoncrossingMatching(tuple(new))


_PAIR_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def parse_matching(text: str) -> NoncrossingMatching:
    """Parse ``"(1,4),(2,3)"``; every point of 1..2n must appear exactly once."""
    stripped = text.strip()
    pairs = [(int(a), int(b)) for a, b in _PAIR_RE.findall(stripped)]
    leftover = _PAIR_RE.sub("", stripped).replace(",", "").strip()
    if leftover or not pairs:
        raise MatchingParseError(f"cannot parse matching text {text!r}")
    size = 2 * len(pairs)
    seen: dict[int, tuple[int, int]] = {}
    for a, b in pairs:
        for point in (a, b):
            if not 1 <= point <= size:
                raise MatchingParseError(f"point {point} in pair ({a},{b}) is outside 1..{size}")
            if point in seen:
                raise MatchingParseError(f"point {point} appears twice: ({a},{b}) and {seen[point]}")
            seen[point] = (a, b)
    partner = [-1] * size
    for a, b in pairs:
        partner[a - 1], partner[b - 1] = b - 1, a - 1
    crossing = _first_crossing(partner)
    if crossing is not None:
        (a, c), (b, d) = crossing
        raise MatchingParseError(f"crossing at ({a + 1},{c + 1}),({b + 1},{d + 1})")
    return NoncrossingMatching(tuple(partner))


def format_matching(matching: NoncrossingMatching) -> str:
    return ",".join(f"({a},{b})" for a, b in matching.pairs())
