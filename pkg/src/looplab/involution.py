"""
The pattern-preserving involution V on pairs of rows.

Each column of a row pair is read as a symbol::

    '<'  l over r
    '>'  r over l
    '*'  equal letters

Neighbouring columns i, i+1 are *linked* when column i is '>' or column i+1
is '<'. Linked runs are exactly the maximal fundamental blocks: inside a run
every adjacent pair is ('>', x) or (x, '<'), which forces the shape
``>^j X <^k``, and two runs never share a column. A run closing up around the
whole cycle with every link present only happens for the all-'>' and all-'<'
strings, which V handles explicitly by swapping the rows.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Iterable, Sequence

from .errors import DimensionError, InvalidParameterError, SpecialCaseError
from .geometry import Plaquette, Row, RowPair, pat_partner


class ColumnSymbol(str, Enum):
    LEFT = "<"
    RIGHT = ">"
    STAR = "*"


def column_symbol(top: Plaquette | str, bottom: Plaquette | str) -> ColumnSymbol:
    t, b = Plaquette(top), Plaquette(bottom)
    if t == b:
        return ColumnSymbol.STAR
    return ColumnSymbol.LEFT if t is Plaquette.ELL else ColumnSymbol.RIGHT


def _symbols(top: str, bottom: str) -> str:
    return "".join("*" if t == b else ("<" if t == "l" else ">") for t, b in zip(top, bottom))


def symbol_string(pair: RowPair) -> str:
    return _symbols(pair.top.tiles, pair.bottom.tiles)


@dataclass(frozen=True)
class CircularInterval:
    """Columns a..b (1-based), read around the circle when ``a > b``."""

    a: int
    b: int
    width: int

    def __post_init__(self) -> None:
        if not (1 <= self.a <= self.width and 1 <= self.b <= self.width):
            raise InvalidParameterError(f"interval [{self.a},{self.b}] outside 1..{self.width}")

    @property
    def length(self) -> int:
        return (self.b - self.a) % self.width + 1

    def columns(self) -> list[int]:
        """0-based column indices in order from a to b."""
        return [(self.a - 1 + t) % self.width for t in range(self.length)]

    def __str__(self) -> str:
        return f"[{self.a},{self.b}]"


@dataclass(frozen=True)
class FundamentalBlock:
    interval: CircularInterval
    j: int
    k: int
    middle_top: Plaquette
    middle_bottom: Plaquette

    def to_json(self) -> dict:
        return {
            "a": self.interval.a,
            "b": self.interval.b,
            "j": self.j,
            "k": self.k,
            "middle": self.middle_top.value + self.middle_bottom.value,
        }


def is_special(symbols: str) -> bool:
    return symbols == ">" * len(symbols) or symbols == "<" * len(symbols)


def _runs(symbols: str) -> list[tuple[int, int]]:
    """Maximal linked runs as (0-based start, length); ``symbols`` must not be special."""
    L = len(symbols)
    linked = [symbols[i] == ">" or symbols[(i + 1) % L] == "<" for i in range(L)]
    # Start scanning just after a missing link; one exists since the string is not special.
    cut = next(i for i in range(L) if not linked[i])
    start = (cut + 1) % L
    runs = []
    pos, run_start, run_len = start, start, 1
    for _ in range(L - 1):
        if linked[pos]:
            run_len += 1
        else:
            if run_len > 1:
                runs.append((run_start, run_len))
            run_start, run_len = (pos + 1) % L, 1
        pos = (pos + 1) % L
    if run_len > 1:
        runs.append((run_start, run_len))
    return sorted(runs)


def fundamental_intervals(symbols: str) -> list[tuple[CircularInterval, int, int]]:
    """Maximal fundamental intervals of a circular symbol string, with their (j, k).

    ``j`` is taken as large as possible when several decompositions describe
    the same interval (e.g. ``>><`` is read with j=2, k=0).
    """
    L = len(symbols)
    if set(symbols) - {"<", ">", "*"}:
        raise InvalidParameterError(f"symbols must be drawn from '<>*', got {symbols!r}")
    if is_special(symbols):
        raise SpecialCaseError(
            "all-'>' and all-'<' pairs have no well-defined blocks; V swaps their rows explicitly"
        )
    out = []
    for start, length in _runs(symbols):
        block = [symbols[(start + t) % L] for t in range(length)]
        j = 0
        while j < length - 1 and block[j] == ">":
            j += 1
        k = length - 1 - j
        assert all(c == "<" for c in block[j + 1:]), block
        a = start + 1
        b = (start + length - 1) % L + 1
        out.append((CircularInterval(a, b, L), j, k))
    return out


def maximal_fundamental_intervals(pair: RowPair) -> list[FundamentalBlock]:
    """Pairwise disjoint maximal fundamental blocks, ordered by their start column."""
    blocks = []
    top, bottom = pair.top.tiles, pair.bottom.tiles
    for interval, j, k in fundamental_intervals(symbol_string(pair)):
        mid = interval.columns()[j]
        blocks.append(FundamentalBlock(interval, j, k, Plaquette(top[mid]), Plaquette(bottom[mid])))
    return blocks


def _rotate_block(top: list[str], bottom: list[str], cols: Sequence[int]) -> None:
    old_top = [top[c] for c in cols]
    old_bottom = [bottom[c] for c in cols]
    for t, c in enumerate(reversed(cols)):
        top[c] = old_bottom[t]
        bottom[c] = old_top[t]


def block_rotate(pair: RowPair, interval: CircularInterval) -> RowPair:
    """Turn the columns of ``interval`` by 180 degrees about the block centre."""
    if interval.width != pair.width:
        raise DimensionError(f"interval width {interval.width} vs pair width {pair.width}")
    top, bottom = list(pair.top.tiles), list(pair.bottom.tiles)
    _rotate_block(top, bottom, interval.columns())
    return RowPair(Row("".join(top)), Row("".join(bottom)))


def _involution(top: str, bottom: str) -> tuple[str, str]:
    symbols = _symbols(top, bottom)
    if is_special(symbols):
        return bottom, top
    new_top, new_bottom = list(top), list(bottom)
    L = len(top)
    for start, length in _runs(symbols):
        _rotate_block(new_top, new_bottom, [(start + t) % L for t in range(length)])
    return "".join(new_top), "".join(new_bottom)


def involution_v(pair: RowPair) -> RowPair:
    top, bottom = _involution(pair.top.tiles, pair.bottom.tiles)
    return RowPair(Row(top), Row(bottom))


def rotate_rowpair(pair: RowPair, steps: int) -> RowPair:
    """Shift both rows so that column ``i`` moves to column ``i+steps``."""
    L = pair.width
    s = steps % L

    def shift(tiles: str) -> str:
        return tiles[L - s:] + tiles[: L - s] if s else tiles

    return RowPair(Row(shift(pair.top.tiles)), Row(shift(pair.bottom.tiles)))


# --- exhaustive and randomized verification ------------------------------------------


@dataclass
class InvolutionSweep:
    """Failure counts from checking V's four properties (and the block properties) on many pairs."""

    width: int
    pairs: int = 0
    involutive: int = 0
    pattern: int = 0
    count_switch: int = 0
    rotation: int = 0
    disjoint: int = 0
    stable_blocks: int = 0
    block_pattern: int = 0
    blocks_checked: int = 0
    witnesses: dict[str, dict] = field(default_factory=dict)

    COUNTERS = (
        "involutive",
        "pattern",
        "count_switch",
        "rotation",
        "disjoint",
        "stable_blocks",
        "block_pattern",
    )

    @property
    def holds(self) -> bool:
        return all(getattr(self, name) == 0 for name in self.COUNTERS)

    def merge(self, other: "InvolutionSweep") -> "InvolutionSweep":
        merged = InvolutionSweep(self.width)
        for name in ("pairs", "blocks_checked") + self.COUNTERS:
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        merged.witnesses = {**other.witnesses, **self.witnesses}
        return merged

    def to_json(self) -> dict:
        out = {name: getattr(self, name) for name in ("width", "pairs", "blocks_checked") + self.COUNTERS}
        out["holds"] = self.holds
        out["witnesses"] = self.witnesses
        return out


def _fail(report: InvolutionSweep, name: str, top: str, bottom: str) -> None:
    setattr(report, name, getattr(report, name) + 1)
    report.witnesses.setdefault(name, {"top": top, "bottom": bottom})


def _check_pair(report: InvolutionSweep, top: str, bottom: str, blocks: bool) -> None:
    L = len(top)
    report.pairs += 1
    vt, vb = _involution(top, bottom)
    if _involution(vt, vb) != (top, bottom):
        _fail(report, "involutive", top, bottom)
    pat = pat_partner(top, bottom)
    if pat_partner(vt, vb) != pat:
        _fail(report, "pattern", top, bottom)
    if vb.count("l") != top.count("l") or vt.count("l") != bottom.count("l"):
        _fail(report, "count_switch", top, bottom)
    rt, rb = top[-1] + top[:-1], bottom[-1] + bottom[:-1]
    wt, wb = _involution(rt, rb)
    if (wt, wb) != (vt[-1] + vt[:-1], vb[-1] + vb[:-1]):
        _fail(report, "rotation", top, bottom)
    if not blocks:
        return
    symbols = _symbols(top, bottom)
    if is_special(symbols):
        return
    runs = _runs(symbols)
    covered = [0] * L
    for start, length in runs:
        for t in range(length):
            covered[(start + t) % L] += 1
    if max(covered) > 1:
        _fail(report, "disjoint", top, bottom)
    if _runs(_symbols(vt, vb)) != runs:
        _fail(report, "stable_blocks", top, bottom)
    for start, length in runs:
        cols = [(start + t) % L for t in range(length)]
        if len({(top[c], bottom[c]) for c in cols}) == 1:
            continue
        report.blocks_checked += 1
        nt, nb = list(top), list(bottom)
        _rotate_block(nt, nb, cols)
        if pat_partner("".join(nt), "".join(nb)) != pat:
            _fail(report, "block_pattern", top, bottom)


def _row_strings(width: int) -> list[str]:
    return ["".join(t) for t in product("lr", repeat=width)]


def _sweep_tops(width: int, tops: Sequence[str], blocks: bool) -> InvolutionSweep:
    report = InvolutionSweep(width)
    rows = _row_strings(width)
    for top in tops:
        for bottom in rows:
            _check_pair(report, top, bottom, blocks)
    return report


def sweep_involution(width: int, *, blocks: bool = True, workers: int = 1) -> InvolutionSweep:
    """Check every pair in R_L^2; the work is split by top row when ``workers > 1``."""
    if width < 2 or width % 2:
        raise InvalidParameterError(f"width L must be even and >= 2, got {width}")
    rows = _row_strings(width)
    if workers <= 1:
        return _sweep_tops(width, rows, blocks)
    chunks = [rows[i::workers] for i in range(workers)]
    report = InvolutionSweep(width)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_sweep_tops, [width] * workers, chunks, [blocks] * workers):
            report = report.merge(part)
    return report


def sample_involution(
    width: int, samples: int, seed: int = 0, *, blocks: bool = True
) -> InvolutionSweep:
    """Check ``samples`` uniformly random pairs of width ``width``."""
    if width < 2 or width % 2:
        raise InvalidParameterError(f"width L must be even and >= 2, got {width}")
    rng = random.Random(seed)
    report = InvolutionSweep(width)
    for _ in range(samples):
        top = "".join(rng.choice("lr") for _ in range(width))
        bottom = "".join(rng.choice("lr") for _ in range(width))
        _check_pair(report, top, bottom, blocks)
    return report


def iter_pairs(width: int) -> Iterable[RowPair]:
    rows = _row_strings(width)
    for top in rows:
        for bottom in rows:
            yield RowPair(Row(top), Row(bottom))
