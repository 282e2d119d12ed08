"""
Exact transfer matrices T_L^(p) of the cylinder and the commutation check.

Entries are polynomials in p with integer coefficients. They are kept as an
integer array ``coeffs[i, j, k]`` (coefficient of ``p**k`` in entry (i, j)),
which makes the bivariate product T^(p) T^(q) a single integer matrix product.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .errors import DegenerateChainError, InvalidParameterError, ResourceLimitError
from .geometry import _act, _row_partner
from .matching import NoncrossingMatching, enumerate_matchings, format_matching, rotate_matching
from .poly import Poly, format_rational, to_rational

DEFAULT_MAX_N = 6
_INT64_SAFE = 2**62


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    n: int
    order: tuple[NoncrossingMatching, ...]
    counts: np.ndarray  # counts[i, j, a]: rows with a l-tiles taking order[i] to order[j]
    coeffs: np.ndarray  # coeffs[i, j, k]: coefficient of p**k in entry (i, j)

    @property
    def size(self) -> int:
        return len(self.order)

    @property
    def width(self) -> int:
        return 2 * self.n

    def index(self, matching: NoncrossingMatching) -> int:
        return self.order.index(matching)

    def entry(self, i: int, j: int) -> Poly:
        return Poly.univariate(int(c) for c in self.coeffs[i, j])

    def evaluate(self, p) -> tuple[tuple[Fraction, ...], ...]:
        return evaluate_transfer(self, p)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": [format_matching(m) for m in self.order],
            "entries": [
                [[format_rational(Fraction(int(c))) for c in _trim(self.coeffs[i, j])] for j in range(self.size)]
                for i in range(self.size)
            ],
        }


def _trim(coeffs: np.ndarray) -> list[int]:
    out = [int(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def bernstein_coefficients(width: int) -> np.ndarray:
    """``W[a, k]`` = coefficient of ``p**k`` in ``p**a * (1-p)**(width-a)``."""
    W = np.zeros((width + 1, width + 1), dtype=np.int64)
    for a in range(width + 1):
        for m in range(width - a + 1):
            W[a, a + m] = (-1) ** m * comb(width - a, m)
    return W


def build_transfer_matrix(n: int, *, max_n: int = DEFAULT_MAX_N) -> TransferMatrix:
    """Sum ``p**nu_l(rho) * (1-p)**nu_r(rho)`` over all 2^L rows rho with rho(pi) = pi'."""
    if not isinstance(n, int) or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n!r}")
    if n > max_n:
        raise ResourceLimitError(f"n={n} exceeds the configured bound n <= {max_n}")
    L = 2 * n
    order = enumerate_matchings(n)
    index = {m.partner: i for i, m in enumerate(order)}
    C = len(order)
    counts = np.zeros((C, C, L + 1), dtype=np.int64)
    for mask in range(1 << L):
        tiles = "".join("l" if mask >> c & 1 else "r" for c in range(L))
        ells = tiles.count("l")
        rp = _row_partner(tiles)
        for i, m in enumerate(order):
            counts[i, index[_act(rp, m.partner, L)], ells] += 1
    coeffs = counts @ bernstein_coefficients(L)
    return TransferMatrix(n, order, counts, coeffs)


def evaluate_transfer(T: TransferMatrix, p) -> tuple[tuple[Fraction, ...], ...]:
    p = to_rational(p)
    powers = [p**k for k in range(T.width + 1)]
    return tuple(
        tuple(sum((int(c) * pw for c, pw in zip(T.coeffs[i, j], powers)), Fraction(0)) for j in range(T.size))
        for i in range(T.size)
    )


def row_sums_are_one(T: TransferMatrix) -> bool:
    """Polynomial identity: every row of T sums to the constant 1."""
    sums = T.coeffs.sum(axis=1)
    target = np.zeros(T.width + 1, dtype=np.int64)
    target[0] = 1
    return bool((sums == target).all())


def rotation_permutation(n: int) -> list[int]:
    order = enumerate_matchings(n)
    index = {m: i for i, m in enumerate(order)}
    return [index[rotate_matching(m, 1)] for m in order]


def is_rotation_invariant(T: TransferMatrix) -> bool:
    sigma = rotation_permutation(T.n)
    return bool((T.coeffs[np.ix_(sigma, sigma)] == T.coeffs).all())


# --- commutation ------------------------------------------------------------------------


@dataclass(frozen=True)
class CommutatorReport:
    n: int
    holds: bool
    max_abs_coefficient: int
    nonzero_entries: int
    defect_injected: bool = False

    def to_json(self) -> dict:
        return {
            "claim": f"T_L^(p) T_L^(q) = T_L^(q) T_L^(p) for L = {2 * self.n}",
            "holds": self.holds,
            "n": self.n,
            "max_abs_coefficient": self.max_abs_coefficient,
            "nonzero_entries": self.nonzero_entries,
            "defect_injected": self.defect_injected,
        }


def product_coefficients(T: TransferMatrix) -> np.ndarray:
    """``P[i, a, k, b]``: coefficient of ``p**a q**b`` in ``(T^(p) T^(q))[i, k]``."""
    C, D = T.size, T.width + 1
    bound = int(np.abs(T.coeffs).max()) ** 2 * C
    dtype = np.int64 if bound < _INT64_SAFE else object
    coeffs = T.coeffs.astype(dtype)
    A = coeffs.transpose(0, 2, 1).reshape(C * D, C)
    B = coeffs.reshape(C, C * D)
    return (A @ B).reshape(C, D, C, D)


def commutator_coefficients(T: TransferMatrix, *, inject_defect: bool = False) -> np.ndarray:
    """Coefficient grid of T^(p) T^(q) - T^(q) T^(p), indexed ``[i, a, k, b]``."""
    P = product_coefficients(T)
    # (T^(q) T^(p))[i, k] has p**a q**b coefficient P[i, b, k, a].
    Q = P.transpose(0, 3, 2, 1).copy()
    if inject_defect:
        # Add the monomial p*q to entry (0, 0) of T^(p) T^(q) only.
        P = P.copy()
        P[0, 1, 0, 1] += 1
    return P - Q


def commutator_is_zero(n: int, *, inject_defect: bool = False, max_n: int = DEFAULT_MAX_N) -> CommutatorReport:
    T = build_transfer_matrix(n, max_n=max_n)
    D = commutator_coefficients(T, inject_defect=inject_defect)
    nonzero = D != 0
    entries = int(nonzero.any(axis=(1, 3)).sum())
    biggest = int(np.abs(D).max()) if D.size else 0
    return CommutatorReport(n, entries == 0, biggest, entries, inject_defect)


def scaled_evaluation(T: TransferMatrix, num: int, den: int) -> np.ndarray:
    """Integer matrix ``den**L * T^(num/den)``."""
    L = T.width
    weights = np.array([num**k * den ** (L - k) for k in range(L + 1)], dtype=object)
    return T.coeffs.astype(object) @ weights


def commutator_on_grid(T: TransferMatrix) -> bool:
    """Point check on the (L+1)^2 grid p, q in {0, 1/L, ..., 1}.

    Entries have degree <= L in each variable, so vanishing on this grid is
    equivalent to the coefficient check.
    """
    L = T.width
    mats = [scaled_evaluation(T, k, L) for k in range(L + 1)]
    for a in range(L + 1):
        for b in range(a + 1, L + 1):
            if not (mats[a].dot(mats[b]) == mats[b].dot(mats[a])).all():
                return False
    return True


# --- stationary law ---------------------------------------------------------------------


def nullspace(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis of {x : M x = 0} by exact Gauss-Jordan elimination."""
    M = [list(map(Fraction, r)) for r in rows]
    ncols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        lead = M[r][c]
        M[r] = [x / lead for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -M[row][fc]
        basis.append(v)
    return basis


def stationary_distribution(n: int, p, *, max_n: int = DEFAULT_MAX_N) -> tuple[Fraction, ...]:
    """The unique probability row vector v with v T^(p) = v, as exact rationals."""
    p = to_rational(p)
    if p in (0, 1):
        raise DegenerateChainError(f"p={p}: the chain only rotates matchings and has no unique stationary law")
    if not 0 < p < 1:
        raise InvalidParameterError(f"p must lie strictly between 0 and 1, got {p}")
    T = build_transfer_matrix(n, max_n=max_n)
    return stationary_from_matrix(evaluate_transfer(T, p))


def stationary_from_matrix(P: Sequence[Sequence[Fraction]]) -> tuple[Fraction, ...]:
    C = len(P)
    # Rows of (P^T - I): sum_i v_i P[i][j] - v_j = 0 for each j.
    system = [[P[i][j] - (1 if i == j else 0) for i in range(C)] for j in range(C)]
    basis = nullspace(system)
    if len(basis) != 1:
        raise DegenerateChainError(f"fixed space of the chain has dimension {len(basis)}, expected 1")
    v = basis[0]
    total = sum(v)
    return tuple(x / total for x in v)


# --- export -----------------------------------------------------------------------------


def evaluated_csv(T: TransferMatrix, p) -> str:
    values = evaluate_transfer(T, p)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [format_matching(m) for m in T.order]
    writer.writerow(["from\\to"] + names)
    for name, row in zip(names, values):
        writer.writerow([name] + [format_rational(x) for x in row])
    return buf.getvalue()
