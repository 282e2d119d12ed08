"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Union

Rational = Fraction
Scalar = Union[int, Fraction]


def to_rational(value) -> Fraction:
    """Exact conversion of ints, Fractions, decimal strings and "a/b" strings.

    Floats are refused: a float such as 0.1 is not the rational it looks like.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational; pass a string or Fraction")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class Poly:
    """Polynomial in ``nvars`` variables, stored as {exponent tuple: coefficient}.

    Zero coefficients are never stored, so equality of the term dicts is
    equality of polynomials.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        self.nvars = nvars
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in (terms or {}).items():
            if len(exps) != nvars:
                raise ValueError(f"exponent {exps} does not have {nvars} entries")
            if c:
                clean[tuple(exps)] = Fraction(c)
        self.terms = clean

    @classmethod
    def constant(cls, nvars: int, c: Scalar) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, index: int) -> "Poly":
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def univariate(cls, coeffs: Iterable[Scalar]) -> "Poly":
        """``coeffs[k]`` multiplies ``x**k``."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"mixing {self.nvars}- and {other.nvars}-variable polynomials")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Poly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Poly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, *values: Scalar) -> Fraction:
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(values)}")
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = c
            for v, k in zip(values, exps):
                if k:
                    term *= Fraction(v) ** k
            total += term
        return total

    def substitute(self, index: int, value: Scalar) -> "Poly":
        """Plug a number into one variable, keeping the variable count."""
        terms: dict[tuple[int, ...], Fraction] = {}
        v = Fraction(value)
        for exps, c in self.terms.items():
            e = list(exps)
            k, e[index] = e[index], 0
            key = tuple(e)
            terms[key] = terms.get(key, 0) + c * v**k
        return Poly(self.nvars, terms)

    def degree(self, index: int) -> int:
        return max((e[index] for e in self.terms), default=0)

    def coefficient(self, exps: tuple[int, ...]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    def coefficients(self) -> list[Fraction]:
        """Dense coefficient list of a univariate polynomial (lowest degree first)."""
        if self.nvars != 1:
            raise ValueError("dense coefficients are only defined for one variable")
        return [self.coefficient((k,)) for k in range(self.degree(0) + 1)]

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = "pqstuvw"
        out = ""
        for exps in sorted(self.terms):
            c = self.terms[exps]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(exps) if k
            )
            mag = abs(c)
            body = f"{mag}" if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            if not out:
                out = body if c > 0 else f"-{body}"
            else:
                out += f" + {body}" if c > 0 else f" - {body}"
        return out


def poly_uni(coeffs: Iterable[Scalar]) -> Poly:
    return Poly.univariate(coeffs)


def poly_vars(nvars: int) -> tuple[Poly, ...]:
    return tuple(Poly.var(nvars, i) for i in range(nvars))
