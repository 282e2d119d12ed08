"""
Plaquettes, rows and the connectivity patterns they induce on a cylinder.

Tile convention. Each plaquette has four mid-edge ports N, E, S, W and carries
two quarter-circle arcs::

    l : N-E and W-S
    r : W-N and S-E

Both tiles are symmetric under a 180 degree rotation. Under this convention
the pattern weights of the three-plaquette Yang-Baxter arrangements come out
exactly as the expected formulas in ``yang_baxter``; with the names swapped they do not.

Endpoint labels of an :class:`AnnularPattern` of width L are 0-based:
``0..L-1`` are the bottom endpoints left to right and ``L+i`` is the top
endpoint above column ``i``. JSON output shifts everything by one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DimensionError, InvalidParameterError, InvalidStructureError
from .matching import NoncrossingMatching, rotate_matching


class Plaquette(str, Enum):
    ELL = "l"
    R = "r"

    @property
    def arcs(self) -> tuple[tuple[str, str], tuple[str, str]]:
        return TILE_ARCS[self]


L_TILE = Plaquette.ELL
R_TILE = Plaquette.R

TILE_ARCS = {
    Plaquette.ELL: (("N", "E"), ("W", "S")),
    Plaquette.R: (("W", "N"), ("S", "E")),
}


@dataclass(frozen=True)
class Row:
    """A circular row of plaquettes; ``tiles[0]`` is column 1."""

    tiles: str

    def __post_init__(self) -> None:
        tiles = self.tiles
        if not isinstance(tiles, str):
            tiles = "".join(Plaquette(t).value for t in tiles)
            object.__setattr__(self, "tiles", tiles)
        if not tiles or len(tiles) % 2:
            raise InvalidParameterError(f"row width must be even and positive, got {len(tiles)}")
        if set(tiles) - {"l", "r"}:
            raise InvalidParameterError(f"row {tiles!r} uses letters other than 'l' and 'r'")

    @property
    def width(self) -> int:
        return len(self.tiles)

    def __len__(self) -> int:
        return len(self.tiles)

    def __getitem__(self, col: int) -> Plaquette:
        return Plaquette(self.tiles[col])

    def __str__(self) -> str:
        return self.tiles

    @classmethod
    def uniform(cls, kind: Plaquette | str, width: int) -> "Row":
        return cls(Plaquette(kind).value * width)

    @classmethod
    def alternating(cls, width: int) -> "Row":
        """The row ``r l r l ...``, which caps every strand."""
        return cls("rl" * (width // 2))

    @classmethod
    def from_mask(cls, mask: int, width: int) -> "Row":
        """Bit ``i`` of ``mask`` set means column ``i`` is an l tile."""
        return cls("".join("l" if mask >> i & 1 else "r" for i in range(width)))

    def to_mask(self) -> int:
        return sum(1 << i for i, t in enumerate(self.tiles) if t == "l")


@dataclass(frozen=True)
class RowPair:
    """Two stacked rows; ``top`` sits above ``bottom``."""

    top: Row
    bottom: Row

    def __post_init__(self) -> None:
        if not isinstance(self.top, Row):
            object.__setattr__(self, "top", Row(self.top))
        if not isinstance(self.bottom, Row):
            object.__setattr__(self, "bottom", Row(self.bottom))
        if self.top.width != self.bottom.width:
            raise DimensionError(f"row widths differ: {self.top.width} vs {self.bottom.width}")

    @property
    def width(self) -> int:
        return self.top.width

    def to_json(self) -> dict:
        return {"top": self.top.tiles, "bottom": self.bottom.tiles}

    @classmethod
    def from_json(cls, data: dict) -> "RowPair":
        return cls(Row(data["top"]), Row(data["bottom"]))


@dataclass(frozen=True)
class AnnularPattern:
    width: int
    partner: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "partner", tuple(self.partner))
        if len(self.partner) != 2 * self.width:
            raise InvalidStructureError(f"expected {2 * self.width} labels, got {len(self.partner)}")
        for i, j in enumerate(self.partner):
            if not 0 <= j < len(self.partner) or j == i or self.partner[j] != i:
                raise InvalidStructureError(f"label {i + 1} is badly paired in {self.partner}")

    @classmethod
    def identity(cls, width: int) -> "AnnularPattern":
        return cls(width, tuple(range(width, 2 * width)) + tuple(range(width)))

    def open_strands(self) -> list[tuple[int, int]]:
        """Bottom-top pairs as ``(bottom label, top column)``."""
        L = self.width
        return [(i, j - L) for i, j in enumerate(self.partner[:L]) if j >= L]

    def bottom_pairs(self) -> list[tuple[int, int]]:
        L = self.width
        return [(i, j) for i, j in enumerate(self.partner[:L]) if i < j < L]

    def bottom_matching(self) -> NoncrossingMatching:
        if self.open_strands():
            raise InvalidStructureError("pattern still has bottom-top strands")
        return NoncrossingMatching(self.partner[: self.width])

    def to_json(self) -> dict:
        return {"width": self.width, "partner": [j + 1 for j in self.partner]}

    @classmethod
    def from_json(cls, data: dict) -> "AnnularPattern":
        return cls(int(data["width"]), tuple(int(j) - 1 for j in data["partner"]))


def _require_width(width: int) -> None:
    if width < 2 or width % 2:
        raise InvalidParameterError(f"width L must be even and >= 2, got {width}")


@lru_cache(maxsize=1 << 16)
def _row_partner(tiles: str) -> tuple[int, ...]:
    # Every strand crosses exactly one vertical edge, so each endpoint can be
    # resolved by looking at its own tile and one neighbour.
    L = len(tiles)
    partner = [0] * (2 * L)
    for i, t in enumerate(tiles):
        if t == "l":
            # S goes out through W into the E port of column i-1.
            k = (i - 1) % L
            partner[i] = L + k if tiles[k] == "l" else k
            # N goes out through E into the W port of column i+1.
            k = (i + 1) % L
            partner[L + i] = k if tiles[k] == "l" else L + k
        else:
            k = (i + 1) % L
            partner[i] = k if tiles[k] == "l" else L + k
            k = (i - 1) % L
            partner[L + i] = L + k if tiles[k] == "l" else k
    return tuple(partner)


def row_boundary_pairing(row: Row) -> AnnularPattern:
    return AnnularPattern(row.width, _row_partner(row.tiles))


def _compose(lower: Sequence[int], upper: Sequence[int], L: int) -> tuple[tuple[int, ...], int]:
    """Glue the top of ``lower`` to the bottom of ``upper``; returns (partner, closed loops)."""
    result = [-1] * (2 * L)
    seen = [False] * L  # glued middle columns that some strand passed through
    for start in range(2 * L):
        if result[start] >= 0:
            continue
        if start < L:
            x, in_lower = lower[start], True
        else:
            x, in_lower = upper[start], False
        while True:
            if in_lower:
                if x < L:
                    end = x
                    break
                col = x - L
                seen[col] = True
                x, in_lower = upper[col], False
            else:
                if x >= L:
                    end = x
                    break
                seen[x] = True
                x, in_lower = lower[L + x], True
        result[start], result[end] = end, start
    # Unvisited middle columns lie on closed loops: upper bottom-caps alternating
    # with lower top-caps.
    loops = 0
    for col in range(L):
        if seen[col]:
            continue
        loops += 1
        c = col
        while not seen[c]:
            seen[c] = True
            c = upper[c]
            seen[c] = True
            c = lower[L + c] - L
    return tuple(result), loops


def compose_with_loops(lower: AnnularPattern, upper: AnnularPattern) -> tuple[AnnularPattern, int]:
    if lower.width != upper.width:
        raise DimensionError(f"cannot compose widths {lower.width} and {upper.width}")
    partner, loops = _compose(lower.partner, upper.partner, lower.width)
    return AnnularPattern(lower.width, partner), loops


def compose_patterns(lower: AnnularPattern, upper: AnnularPattern) -> AnnularPattern:
    """Stack ``upper`` on top of ``lower`` and trace strands; closed loops are dropped."""
    return compose_with_loops(lower, upper)[0]


def _act(row_partner: Sequence[int], matching: Sequence[int], L: int) -> tuple[int, ...]:
    out = [-1] * L
    for i in range(L):
        if out[i] >= 0:
            continue
        x = row_partner[i]
        while x >= L:
            x = row_partner[L + matching[x - L]]
        out[i], out[x] = x, i
    return tuple(out)


def act_row(row: Row, matching: NoncrossingMatching) -> NoncrossingMatching:
    """Glue ``matching`` as caps on top of ``row`` and read off the bottom matching."""
    if row.width != matching.size:
        raise DimensionError(f"row width {row.width} does not match 2n = {matching.size}")
    return NoncrossingMatching(_act(_row_partner(row.tiles), matching.partner, row.width))


def act_stack(rows: Sequence[Row], matching: NoncrossingMatching) -> NoncrossingMatching:
    """Action of a column of rows listed bottom to top; the top row acts first."""
    for row in reversed(rows):
        matching = act_row(row, matching)
    return matching


def stack_boundary_pattern(pair: RowPair) -> AnnularPattern:
    """Pat of a row pair: the pairing of its L bottom and L top endpoints."""
    L = pair.width
    partner, _ = _compose(_row_partner(pair.bottom.tiles), _row_partner(pair.top.tiles), L)
    return AnnularPattern(L, partner)


def pat_partner(top: str, bottom: str) -> tuple[int, ...]:
    """Fast path of :func:`stack_boundary_pattern` on raw tile strings."""
    return _compose(_row_partner(bottom), _row_partner(top), len(top))[0]


def count_tiles(row: Row, kind: Plaquette | str) -> int:
    return row.tiles.count(Plaquette(kind).value)


def rotate_row(row: Row, steps: int) -> Row:
    """Column ``i`` moves to column ``i+steps`` (circularly)."""
    L = row.width
    s = steps % L
    return Row(row.tiles[L - s:] + row.tiles[: L - s]) if s else row


def rotate_pattern(pattern: AnnularPattern, steps: int) -> AnnularPattern:
    L = pattern.width

    def move(label: int) -> int:
        return (label + steps) % L if label < L else L + (label - L + steps) % L

    new = [0] * (2 * L)
    for i, j in enumerate(pattern.partner):
        new[move(i)] = move(j)
    return AnnularPattern(L, tuple(new))


def embed_matching(matching: NoncrossingMatching) -> AnnularPattern:
    """A pattern whose top endpoints are capped by ``matching`` (bottom capped likewise)."""
    L = matching.size
    return AnnularPattern(L, matching.partner + tuple(L + j for j in matching.partner))


def all_rows(width: int) -> Iterable[Row]:
    _require_width(width)
    for mask in range(1 << width):
        yield Row.from_mask(mask, width)


__all__ = [
    "Plaquette",
    "L_TILE",
    "R_TILE",
    "Row",
    "RowPair",
    "AnnularPattern",
    "row_boundary_pairing",
    "compose_patterns",
    "compose_with_loops",
    "act_row",
    "act_stack",
    "stack_boundary_pattern",
    "count_tiles",
    "rotate_row",
    "rotate_pattern",
    "rotate_matching",
    "embed_matching",
    "all_rows",
]
