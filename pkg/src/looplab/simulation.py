"""
Monte Carlo sampling of the boundary matching of a semi-infinite cylinder.

Rows are added on top of the boundary one at a time. The frontier is the
annular pattern of the stack built so far; once no bottom endpoint is joined
to the top of the stack, nothing placed higher can change the bottom matching,
so sampling stops there.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import (
    DimensionError,
    InvalidParameterError,
    InvalidStructureError,
    NonTerminationError,
    ScheduleRejectedError,
)
from .geometry import AnnularPattern, Row, _compose, _row_partner, row_boundary_pairing
from .matching import NoncrossingMatching, enumerate_matchings, format_matching
from .poly import format_rational, to_rational

DEFAULT_MAX_ROWS = 10**6
REPLICA_SIZE = 10_000


@dataclass(frozen=True)
class BiasSchedule:
    """Row biases p_1, p_2, ... (row 1 is the bottom row)."""

    kind: str
    values: tuple[Fraction, ...]
    tail: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "cyclic", "explicit"):
            raise InvalidParameterError(f"unknown schedule kind {self.kind!r}")
        values = tuple(to_rational(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values and self.kind != "explicit":
            raise InvalidParameterError(f"{self.kind} schedule needs at least one value")
        if self.kind == "constant" and len(values) != 1:
            raise InvalidParameterError("constant schedule takes exactly one value")
        if self.kind == "explicit":
            if self.tail is None:
                raise InvalidParameterError("explicit schedule needs a tail bias")
            object.__setattr__(self, "tail", to_rational(self.tail))
        for v in values + ((self.tail,) if self.tail is not None else ()):
            if not 0 <= v <= 1:
                raise InvalidParameterError(f"bias {v} is outside [0, 1]")

    @classmethod
    def constant(cls, p) -> "BiasSchedule":
        return cls("constant", (to_rational(p),))

    @classmethod
    def cyclic(cls, values: Sequence) -> "BiasSchedule":
        return cls("cyclic", tuple(values))

    @classmethod
    def explicit(cls, values: Sequence, tail) -> "BiasSchedule":
        return cls("explicit", tuple(values), to_rational(tail))

    def bias_at(self, j: int) -> Fraction:
        if j < 1:
            raise InvalidParameterError(f"rows are numbered from 1, got {j}")
        if self.kind == "constant":
            return self.values[0]
        if self.kind == "cyclic":
            return self.values[(j - 1) % len(self.values)]
        return self.values[j - 1] if j <= len(self.values) else self.tail

    @property
    def diverges(self) -> bool:
        """Whether sum_j p_j^n (1-p_j)^n is infinite, for every n >= 1."""
        recurring = (self.tail,) if self.kind == "explicit" else self.values
        return any(0 < v < 1 for v in recurring)

    def describe(self) -> str:
        if self.kind == "explicit":
            head = ",".join(format_rational(v) for v in self.values)
            return f"explicit:{head};tail={format_rational(self.tail)}"
        return f"{self.kind}:" + ",".join(format_rational(v) for v in self.values)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "values": [format_rational(v) for v in self.values]}
        if self.tail is not None:
            out["tail"] = format_rational(self.tail)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BiasSchedule":
        kind = data.get("kind")
        values = tuple(to_rational(str(v)) for v in data.get("values", ()))
        tail = data.get("tail")
        return cls(kind, values, None if tail is None else to_rational(str(tail)))

    @classmethod
    def parse(cls, text: str) -> "BiasSchedule":
        """``constant:P``, ``cyclic:P1,P2,...`` or ``file:PATH`` (a JSON schedule)."""
        kind, sep, rest = text.partition(":")
        if not sep:
            raise InvalidParameterError(f"schedule {text!r} should look like kind:values")
        if kind == "file":
            return cls.from_json(json.loads(Path(rest).read_text()))
        if kind not in ("constant", "cyclic"):
            raise InvalidParameterError(f"unknown schedule kind {kind!r}")
        try:
            values = tuple(to_rational(v) for v in rest.split(","))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidParameterError(f"bad bias list {rest!r}: {exc}") from exc
        return cls(kind, values)


def load_schedules(path: str | Path) -> list[BiasSchedule]:
    """A JSON file holding one schedule object or a list of them."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("schedules", [data])
    return [BiasSchedule.from_json(d) for d in data]


# --- frontier ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrontierState:
    width: int
    pattern: AnnularPattern
    rows_consumed: int = 0

    @classmethod
    def initial(cls, width: int) -> "FrontierState":
        return cls(width, AnnularPattern.identity(width), 0)

    def open_strands(self) -> list[tuple[int, int]]:
        return self.pattern.open_strands()

    @property
    def closed(self) -> bool:
        return not self.open_strands()

    def bottom_matching(self) -> NoncrossingMatching:
        return self.pattern.bottom_matching()


def _keeps_bottom_pairs(old: Sequence[int], new: Sequence[int], L: int) -> bool:
    return all(new[i] == j for i, j in enumerate(old[:L]) if j < L)


def frontier_advance(state: FrontierState, row: Row) -> FrontierState:
    if row.width != state.width:
        raise DimensionError(f"row width {row.width} does not match frontier width {state.width}")
    L = state.width
    partner, _ = _compose(state.pattern.partner, _row_partner(row.tiles), L)
    if not _keeps_bottom_pairs(state.pattern.partner, partner, L):
        raise InvalidStructureError("a bottom-bottom pair changed while advancing the frontier")
    return FrontierState(L, AnnularPattern(L, partner), state.rows_consumed + 1)


# --- sampling ---------------------------------------------------------------------------


def sample_row(width: int, p, rng: np.random.Generator) -> Row:
    """Each tile independently l with probability p, else r."""
    p = float(to_rational(p)) if not isinstance(p, float) else p
    u = rng.random(width)
    return Row("".join("l" if x < p else "r" for x in u))


class RowStream:
    """Row masks drawn from a generator in blocks; bit i set means column i is l.

    Row t of the stream is always decided by the same L uniforms, whatever
    bias is asked for, so results depend only on the seed and the schedule.
    """

    def __init__(self, width: int, rng: np.random.Generator, block: int = 4096):
        self.width = width
        self.rng = rng
        self.block = block
        self._bits = 1 << np.arange(width, dtype=np.int64)
        self._refill()

    def _refill(self) -> None:
        self._u = self.rng.random((self.block, self.width))
        self._masks: dict[float, list[int]] = {}
        self._pos = 0

    def next_mask(self, p: float) -> int:
        if self._pos == self.block:
            self._refill()
        masks = self._masks.get(p)
        if masks is None:
            masks = ((self._u < p) @ self._bits).tolist()
            self._masks[p] = masks
        mask = masks[self._pos]
        self._pos += 1
        return mask


class _Kernel:
    """Memoised frontier transitions for one width."""

    MAX_CACHE = 2_000_000

    def __init__(self, width: int):
        self.width = width
        self.rows = [_row_partner(Row.from_mask(m, width).tiles) for m in range(1 << width)]
        self.cache: dict[tuple[tuple[int, ...], int], tuple[tuple[int, ...], bool]] = {}
        self.start = AnnularPattern.identity(width).partner

    def step(self, state: tuple[int, ...], mask: int) -> tuple[tuple[int, ...], bool]:
        key = (state, mask)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        L = self.width
        new, _ = _compose(state, self.rows[mask], L)
        if not _keeps_bottom_pairs(state, new, L):
            raise InvalidStructureError("a bottom-bottom pair changed while advancing the frontier")
        hit = (new, all(j < L for j in new[:L]))
        if len(self.cache) >= self.MAX_CACHE:
            self.cache.clear()
        self.cache[key] = hit
        return hit

    def sample(self, stream: RowStream, biases: "_Biases", max_rows: int) -> tuple[tuple[int, ...], int]:
        state = self.start
        j = 0
        while True:
            j += 1
            if j > max_rows:
                raise NonTerminationError(
                    f"{max_rows} rows did not close all strands; the schedule may violate "
                    "sum_j p_j^n (1-p_j)^n = infinity"
                )
            state, closed = self.step(state, stream.next_mask(biases(j)))
            if closed:
                return state[: self.width], j


class _Biases:
    def __init__(self, schedule: BiasSchedule):
        self.kind = schedule.kind
        self.values = [float(v) for v in schedule.values]
        self.tail = float(schedule.tail) if schedule.tail is not None else None

    def __call__(self, j: int) -> float:
        if self.kind == "constant":
            return self.values[0]
        if self.kind == "cyclic":
            return self.values[(j - 1) % len(self.values)]
        return self.values[j - 1] if j <= len(self.values) else self.tail


_KERNELS: dict[int, _Kernel] = {}


def _kernel(width: int) -> _Kernel:
    if width not in _KERNELS:
        _KERNELS[width] = _Kernel(width)
    return _KERNELS[width]


def _check_width(width: int) -> None:
    if width < 2 or width % 2:
        raise InvalidParameterError(f"width L must be even and >= 2, got {width}")


def sample_pattern(
    width: int,
    schedule: BiasSchedule,
    rng: np.random.Generator | RowStream,
    max_rows: int = DEFAULT_MAX_ROWS,
) -> tuple[NoncrossingMatching, int]:
    """Boundary matching of one sampled cylinder and the number of rows it took."""
    _check_width(width)
    if max_rows < 1:
        raise InvalidParameterError(f"max_rows must be >= 1, got {max_rows}")
    stream = rng if isinstance(rng, RowStream) else RowStream(width, rng, block=64)
    partner, rows = _kernel(width).sample(stream, _Biases(schedule), max_rows)
    return NoncrossingMatching(partner), rows


# --- invariance experiment --------------------------------------------------------------


def replica_rng(seed: int, schedule_index: int, replica: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(schedule_index, replica)))


def _run_replica(width: int, schedule: BiasSchedule, seed: int, schedule_index: int,
                 replica: int, samples: int, max_rows: int) -> tuple[dict[tuple[int, ...], int], int]:
    stream = RowStream(width, replica_rng(seed, schedule_index, replica))
    kernel = _kernel(width)
    biases = _Biases(schedule)
    counts: dict[tuple[int, ...], int] = {}
    rows_total = 0
    for _ in range(samples):
        partner, rows = kernel.sample(stream, biases, max_rows)
        counts[partner] = counts.get(partner, 0) + 1
        rows_total += rows
    return counts, rows_total


def _exact_law(width: int) -> tuple[Fraction, ...] | None:
    from .transfer import DEFAULT_MAX_N, stationary_distribution

    n = width // 2
    if n > DEFAULT_MAX_N:
        return None
    return stationary_distribution(n, Fraction(1, 2))


def total_variation(a: Sequence[float], b: Sequence[float]) -> float:
    return 0.5 * float(sum(abs(x - y) for x, y in zip(a, b)))


@dataclass
class InvarianceReport:
    width: int
    seed: int
    samples: int
    schedules: list[BiasSchedule]
    order: tuple[NoncrossingMatching, ...]
    counts: list[list[int]]
    rows_total: list[int]
    exact: tuple[Fraction, ...] | None
    tv: dict[tuple[int, int], float] = field(default_factory=dict)
    chi2: list[tuple[float, float]] = field(default_factory=list)

    def frequencies(self, index: int) -> list[float]:
        total = sum(self.counts[index])
        return [c / total for c in self.counts[index]]

    def mean_rows(self, index: int) -> float:
        return self.rows_total[index] / sum(self.counts[index])

    def max_tv(self) -> float:
        return max(self.tv.values(), default=0.0)

    def min_chi2_pvalue(self) -> float | None:
        return min((pv for _, pv in self.chi2), default=None)

    def to_json(self) -> dict:
        from . import __version__

        return {
            "tool": "looplab",
            "version": __version__,
            "parameters": {
                "L": self.width,
                "seed": self.seed,
                "samples": self.samples,
                "schedules": [s.to_json() for s in self.schedules],
            },
            "order": [format_matching(m) for m in self.order],
            "exact_stationary": None if self.exact is None else [format_rational(x) for x in self.exact],
            "schedules": [
                {
                    "schedule": s.describe(),
                    "counts": self.counts[i],
                    "frequencies": [round(f, 6) for f in self.frequencies(i)],
                    "mean_rows": round(self.mean_rows(i), 6),
                    "chi2": None if not self.chi2 else round(self.chi2[i][0], 6),
                    "chi2_pvalue": None if not self.chi2 else round(self.chi2[i][1], 6),
                }
                for i, s in enumerate(self.schedules)
            ],
            "total_variation": {f"{a}-{b}": round(v, 6) for (a, b), v in sorted(self.tv.items())},
        }


def run_invariance_experiment(
    width: int,
    schedules: Sequence[BiasSchedule],
    samples: int,
    seed: int,
    *,
    max_rows: int = DEFAULT_MAX_ROWS,
    workers: int = 1,
    replica_size: int = REPLICA_SIZE,
) -> InvarianceReport:
    """Sample each schedule independently and compare the empirical laws.

    Samples are split into replicas of ``replica_size`` with their own seeded
    streams; counts are merged in replica order, so the report does not depend
    on ``workers``.
    """
    _check_width(width)
    if samples < 1:
        raise InvalidParameterError(f"samples must be >= 1, got {samples}")
    if not schedules:
        raise InvalidParameterError("at least one schedule is required")
    for s in schedules:
        if not s.diverges:
            raise ScheduleRejectedError(
                f"schedule {s.describe()} has sum_j p_j^n (1-p_j)^n < infinity; "
                "the boundary matching is not almost surely defined"
            )
    tasks = []
    for si, s in enumerate(schedules):
        left, r = samples, 0
        while left > 0:
            size = min(replica_size, left)
            tasks.append((width, s, seed, si, r, size, max_rows))
            left -= size
            r += 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_replica, *zip(*tasks)))
    else:
        results = [_run_replica(*t) for t in tasks]

    order = enumerate_matchings(width // 2)
    index = {m.partner: i for i, m in enumerate(order)}
    counts = [[0] * len(order) for _ in schedules]
    rows_total = [0] * len(schedules)
    for task, (c, rows) in zip(tasks, results):
        si = task[3]
        for partner, k in c.items():
            counts[si][index[partner]] += k
        rows_total[si] += rows

    report = InvarianceReport(width, seed, samples, list(schedules), order, counts, rows_total, _exact_law(width))
    freqs = [report.frequencies(i) for i in range(len(schedules))]
    for a, b in combinations(range(len(schedules)), 2):
        report.tv[(a, b)] = total_variation(freqs[a], freqs[b])
    if report.exact is not None and len(order) > 1:
        expected = np.array([float(x) for x in report.exact]) * samples
        for i in range(len(schedules)):
            res = stats.chisquare(np.array(counts[i], dtype=float), expected)
            report.chi2.append((float(res.statistic), float(res.pvalue)))
    return report


__all__ = [
    "BiasSchedule",
    "FrontierState",
    "InvarianceReport",
    "RowStream",
    "frontier_advance",
    "load_schedules",
    "row_boundary_pairing",
    "run_invariance_experiment",
    "sample_pattern",
    "sample_row",
    "total_variation",
]
