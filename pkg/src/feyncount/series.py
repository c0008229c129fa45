"""Exact truncated formal power series.

Scalars are :class:`fractions.Fraction`.  Series coefficients live either in
the rationals or in :class:`BiPoly`, the ring of polynomials in the two
bookkeeping variables ``eps`` (line grading) and ``g`` (vertex grading).
Every value is immutable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from feyncount.errors import DomainError, UsageError

Rational = Fraction
Scalar = Union[int, Fraction]


def as_rational(value: Scalar | str) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact or boolean scalar {value!r}")
    return Fraction(value)


class BiPoly:
    """Polynomial in ``eps`` and ``g`` with rational coefficients.

    Terms are stored as ``{(deg_eps, deg_g): coefficient}`` with zero
    coefficients dropped, so structural equality is polynomial equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], Scalar] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in (terms or {}).items():
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent in monomial ({a}, {b})")
            c = as_rational(c)
            if c:
                clean[(int(a), int(b))] = c
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[tuple[int, int], Fraction]) -> BiPoly:
        # caller guarantees no zero coefficients
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, coef: Scalar | str = 1, eps: int = 0, g: int = 0) -> BiPoly:
        return cls({(eps, g): as_rational(coef)})

    @classmethod
    def const(cls, c: Scalar | str) -> BiPoly:
        return cls.monomial(c, 0, 0)

    @classmethod
    def zero(cls) -> BiPoly:
        return cls._raw({})

    @classmethod
    def one(cls) -> BiPoly:
        return cls._raw({(0, 0): Fraction(1)})

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple[int, int], Fraction]]:
        return iter(sorted(self._terms.items()))

    def coeff(self, eps: int, g: int) -> Fraction:
        return self._terms.get((eps, g), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def min_eps_degree(self) -> int | None:
        return min((a for a, _ in self._terms), default=None)

    def min_g_degree(self) -> int | None:
        return min((b for _, b in self._terms), default=None)

    def max_eps_degree(self) -> int | None:
        return max((a for a, _ in self._terms), default=None)

    def max_g_degree(self) -> int | None:
        return max((b for _, b in self._terms), default=None)

    def truncate(self, eps_max: int | None = None, g_max: int | None = None) -> BiPoly:
        """Drop monomials above the given degrees (``None`` means no cap)."""
        return BiPoly._raw({
            (a, b): c for (a, b), c in self._terms.items()
            if (eps_max is None or a <= eps_max) and (g_max is None or b <= g_max)
        })

    def _coerce(self, other: object) -> BiPoly | None:
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return BiPoly.const(other)
        return None

    def __add__(self, other: object) -> BiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in o._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return BiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> BiPoly:
        return BiPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: object) -> BiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> BiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> BiPoly:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return BiPoly._raw({})
            return BiPoly._raw({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, BiPoly):
            return NotImplemented
        out: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return BiPoly._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> BiPoly:
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = BiPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"BiPoly({dict(sorted(self._terms.items()))!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self._terms.items()):
            mono = "*".join(
                s for s in (
                    "" if (c == 1 and (a or b)) else str(c),
                    "" if a == 0 else ("eps" if a == 1 else f"eps^{a}"),
                    "" if b == 0 else ("g" if b == 1 else f"g^{b}"),
                ) if s
            )
            parts.append(mono)
        return " + ".join(parts)


EPS = BiPoly.monomial(1, 1, 0)
G = BiPoly.monomial(1, 0, 1)

Coeff = Union[Fraction, BiPoly]


def _normalize(c: object) -> Coeff:
    if isinstance(c, BiPoly):
        return c
    if isinstance(c, (int, Fraction, str)) and not isinstance(c, bool):
        return as_rational(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _ring_of(c: Coeff) -> type:
    return BiPoly if isinstance(c, BiPoly) else Fraction


class TruncSeries:
    """Formal power series ``c_0 + c_1 x + ... + c_N x^N`` truncated at order N.

    The order is fixed at construction.  Binary operations require equal
    orders and equal coefficient rings; they never re-truncate silently.
    """

    __slots__ = ("_coeffs", "_ring")

    def __init__(self, coeffs: Iterable[Scalar | BiPoly | str], order: int | None = None):
        cs = [_normalize(c) for c in coeffs]
        if order is None:
            if not cs:
                raise UsageError("cannot infer order of an empty coefficient list")
            order = len(cs) - 1
        if order < 0:
            raise UsageError(f"order must be >= 0, got {order}")
        if len(cs) > order + 1:
            raise UsageError(f"{len(cs)} coefficients given for order {order}")
        rings = {_ring_of(c) for c in cs}
        if len(rings) > 1:
            raise UsageError("mixed coefficient rings in one series")
        ring = rings.pop() if rings else Fraction
        zero = BiPoly.zero() if ring is BiPoly else Fraction(0)
        cs.extend([zero] * (order + 1 - len(cs)))
        self._coeffs: tuple[Coeff, ...] = tuple(cs)
        self._ring = ring

    @classmethod
    def _raw(cls, coeffs: list[Coeff], ring: type) -> TruncSeries:
        obj = cls.__new__(cls)
        obj._coeffs = tuple(coeffs)
        obj._ring = ring
        return obj

    @classmethod
    def zero(cls, order: int, ring: type = Fraction) -> TruncSeries:
        z = BiPoly.zero() if ring is BiPoly else Fraction(0)
        return cls._raw([z] * (order + 1), ring)

    @classmethod
    def one(cls, order: int, ring: type = Fraction) -> TruncSeries:
        s = cls.zero(order, ring)
        cs = list(s._coeffs)
        cs[0] = BiPoly.one() if ring is BiPoly else Fraction(1)
        return cls._raw(cs, ring)

    @classmethod
    def x(cls, order: int, ring: type = Fraction) -> TruncSeries:
        s = cls.zero(order, ring)
        if order >= 1:
            cs = list(s._coeffs)
            cs[1] = BiPoly.one() if ring is BiPoly else Fraction(1)
            return cls._raw(cs, ring)
        return s

    @classmethod
    def from_egf(cls, values: Iterable[Scalar | BiPoly], order: int | None = None) -> TruncSeries:
        """Build ``sum v_n x^n / n!`` from the labelled counts ``v_n``."""
        vals = [_normalize(v) for v in values]
        return cls([v * Fraction(1, math.factorial(n)) for n, v in enumerate(vals)], order)

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def ring(self) -> type:
        return self._ring

    @property
    def coeffs(self) -> tuple[Coeff, ...]:
        return self._coeffs

    def __getitem__(self, n: int) -> Coeff:
        return self._coeffs[n]

    def __len__(self) -> int:
        return len(self._coeffs)

    def _zero(self) -> Coeff:
        return BiPoly.zero() if self._ring is BiPoly else Fraction(0)

    def _one(self) -> Coeff:
        return BiPoly.one() if self._ring is BiPoly else Fraction(1)

    def _check(self, other: TruncSeries) -> None:
        if not isinstance(other, TruncSeries):
            raise UsageError(f"expected TruncSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise UsageError(f"order mismatch: {self.order} vs {other.order}")
        if other._ring is not self._ring:
            raise UsageError(
                f"ring mismatch: {self._ring.__name__} vs {other._ring.__name__}")

    def map(self, fn) -> TruncSeries:
        return TruncSeries([fn(c) for c in self._coeffs], self.order)

    def __add__(self, other: TruncSeries) -> TruncSeries:
        self._check(other)
        return TruncSeries._raw([a + b for a, b in zip(self._coeffs, other._coeffs)], self._ring)

    def __neg__(self) -> TruncSeries:
        return TruncSeries._raw([-a for a in self._coeffs], self._ring)

    def __sub__(self, other: TruncSeries) -> TruncSeries:
        self._check(other)
        return TruncSeries._raw([a - b for a, b in zip(self._coeffs, other._coeffs)], self._ring)

    def __mul__(self, other: TruncSeries | Scalar) -> TruncSeries:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return TruncSeries._raw([a * other for a in self._coeffs], self._ring)
        self._check(other)
        a, b = self._coeffs, other._coeffs
        out = []
        for n in range(len(a)):
            acc = self._zero()
            for i in range(n + 1):
                ai = a[i]
                if ai:
                    bj = b[n - i]
                    if bj:
                        acc = acc + ai * bj
            out.append(acc)
        return TruncSeries._raw(out, self._ring)

    def __rmul__(self, other: Scalar) -> TruncSeries:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * other
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"TruncSeries({list(self._coeffs)!r}, order={self.order})"

    def exp(self) -> TruncSeries:
        """Formal exponential via ``n e_n = sum_k k a_k e_{n-k}``."""
        if self._coeffs[0] != 0:
            raise DomainError("exp needs a series with zero constant term")
        a = self._coeffs
        e = [self._one()]
        for n in range(1, len(a)):
            acc = self._zero()
            for k in range(1, n + 1):
                if a[k] and e[n - k]:
                    acc = acc + a[k] * e[n - k] * k
            e.append(acc * Fraction(1, n))
        return TruncSeries._raw(e, self._ring)

    def log(self) -> TruncSeries:
        """Formal logarithm via ``n a_n = sum_k k l_k a_{n-k}`` (needs a_0 = 1)."""
        if self._coeffs[0] != 1:
            raise DomainError("log needs a series with constant term 1")
        a = self._coeffs
        lg = [self._zero()]
        for n in range(1, len(a)):
            acc = a[n] * n
            for k in range(1, n):
                if lg[k] and a[n - k]:
                    acc = acc - lg[k] * a[n - k] * k
            lg.append(acc * Fraction(1, n))
        return TruncSeries._raw(lg, self._ring)

    def compose(self, inner: TruncSeries) -> TruncSeries:
        """Substitute ``inner`` for the variable of ``self`` (Horner scheme)."""
        self._check(inner)
        if inner._coeffs[0] != 0:
            raise DomainError("composition needs an inner series with zero constant term")
        result = TruncSeries.zero(self.order, self._ring)
        for c in reversed(self._coeffs):
            result = result * inner
            result = TruncSeries._raw([result._coeffs[0] + c, *result._coeffs[1:]], self._ring)
        return result

    def derivative(self) -> TruncSeries:
        """Term-wise derivative, padded with a zero to keep the order."""
        cs = [c * n for n, c in enumerate(self._coeffs)][1:] + [self._zero()]
        return TruncSeries._raw(cs, self._ring)

    def egf_coeff(self, n: int) -> Coeff:
        """``n! * c_n``: the labelled count carried by the x^n term."""
        if n < 0 or n > self.order:
            raise IndexError(f"egf_coeff({n}) outside 0..{self.order}")
        return self._coeffs[n] * math.factorial(n)

    def egf_values(self) -> list[Coeff]:
        return [self.egf_coeff(n) for n in range(len(self._coeffs))]


def add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a + b


def mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a * b


def exp(a: TruncSeries) -> TruncSeries:
    return a.exp()


def log(a: TruncSeries) -> TruncSeries:
    return a.log()


def compose(outer: TruncSeries, inner: TruncSeries) -> TruncSeries:
    return outer.compose(inner)


def egf_coeff(a: TruncSeries, n: int) -> Coeff:
    return a.egf_coeff(n)
