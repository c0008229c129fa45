"""Partition functions of zero-dimensional field theories.

A model assigns an amplitude (a :class:`BiPoly` in ``eps`` and ``g``) to each
m-legged generalised line and each n-point vertex.  The partition function

    Z = exp(sum_m L_m/m! d^m/dx^m) exp(sum_n V_n x^n/n!) at x = 0

is evaluated by pairing coefficients: if ``A(t) = exp(sum L_m t^m/m!)`` and
``F(x) = exp(sum V_n x^n/n!)`` then ``Z = sum_k k! [t^k]A [x^k]F``, because
``d^k/dx^k`` applied to ``F`` at zero picks out ``k! [x^k]F``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping, Union

from feyncount.errors import DomainError, FinitenessError, UsageError
from feyncount.series import EPS, G, BiPoly, TruncSeries, as_rational

BUILTIN_MODELS = ("phi4", "partitions", "bell-squared")

ARITY = "m"
Exponent = Union[int, str]


class Mode(enum.Enum):
    FINITE_SUPPORT = "finite"
    LEGS_GRADED = "legs-graded"


@dataclass(frozen=True)
class ArityFamily:
    """Amplitude template shared by every arity ``m >= 1``.

    Each monomial is ``(coef, eps_exp, g_exp)`` where an exponent is either an
    int or the arity symbol ``"m"``.
    """

    monomials: tuple[tuple[Fraction, Exponent, Exponent], ...]

    def __post_init__(self) -> None:
        for _, a, b in self.monomials:
            for e in (a, b):
                if not (e == ARITY or (isinstance(e, int) and e >= 0)):
                    raise UsageError(f"bad exponent {e!r} in arity template")

    def amplitude(self, m: int) -> BiPoly:
        terms: dict[tuple[int, int], Fraction] = {}
        for c, a, b in self.monomials:
            key = (m if a == ARITY else a, m if b == ARITY else b)
            terms[key] = terms.get(key, Fraction(0)) + c
        return BiPoly(terms)

    def legs_per_degree(self, axis: int) -> Fraction | None:
        """Supremum over m of ``m / min-degree`` along ``axis`` (0 = eps,
        1 = g); ``None`` when unbounded."""
        if not any(c for c, *_ in self.monomials):
            return Fraction(0)
        exps = [mono[1 + axis] for mono in self.monomials if mono[0]]
        if all(e == ARITY for e in exps):
            return Fraction(1)
        return None


@dataclass(frozen=True)
class ModelSpec:
    """Line and vertex amplitude families plus a finiteness mode.

    ``lines``/``vertices`` hold explicit arities; the optional families cover
    every other arity.  Zero amplitudes are dropped.
    """

    lines: Mapping[int, BiPoly] = field(default_factory=dict)
    vertices: Mapping[int, BiPoly] = field(default_factory=dict)
    mode: Mode = Mode.FINITE_SUPPORT
    line_family: ArityFamily | None = None
    vertex_family: ArityFamily | None = None
    name: str = "custom"

    def __post_init__(self) -> None:
        for label, amps in (("line", self.lines), ("vertex", self.vertices)):
            for arity, amp in amps.items():
                if not isinstance(arity, int) or arity < 1:
                    raise UsageError(f"{label} arity must be an integer >= 1, got {arity!r}")
                if not isinstance(amp, BiPoly):
                    raise UsageError(f"{label} amplitude for arity {arity} is not a BiPoly")
        object.__setattr__(self, "lines", {m: a for m, a in sorted(self.lines.items()) if a})
        object.__setattr__(self, "vertices", {n: a for n, a in sorted(self.vertices.items()) if a})
        if self.mode is Mode.LEGS_GRADED:
            for m, amp in self.lines.items():
                if amp.min_eps_degree() < m:
                    raise UsageError(
                        f"legs-graded model: L_{m} = {amp} has eps-degree below {m}")
            fam = self.line_family
            if fam is not None and any(c and a != ARITY for c, a, _ in fam.monomials):
                raise UsageError("legs-graded model: line family must carry eps^m")

    def line_amplitude(self, m: int) -> BiPoly:
        if m in self.lines:
            return self.lines[m]
        if self.line_family is not None and m >= 1:
            return self.line_family.amplitude(m)
        return BiPoly.zero()

    def vertex_amplitude(self, n: int) -> BiPoly:
        if n in self.vertices:
            return self.vertices[n]
        if self.vertex_family is not None and n >= 1:
            return self.vertex_family.amplitude(n)
        return BiPoly.zero()

    def line_arities(self, up_to: int) -> list[int]:
        return [m for m in range(1, up_to + 1) if self.line_amplitude(m)]

    def vertex_arities(self, up_to: int) -> list[int]:
        return [n for n in range(1, up_to + 1) if self.vertex_amplitude(n)]

    def to_dict(self) -> dict[str, Any]:
        def mono_list(poly: BiPoly) -> list[dict[str, Any]]:
            return [{"coef": str(c), "eps": a, "g": b} for (a, b), c in poly.items()]

        def fam_list(fam: ArityFamily) -> list[dict[str, Any]]:
            return [{"coef": str(c), "eps": a, "g": b} for c, a, b in fam.monomials]

        def side(amps: Mapping[int, BiPoly], fam: ArityFamily | None) -> list[dict[str, Any]]:
            out = [{"arity": k, "amplitude": mono_list(v)} for k, v in amps.items()]
            if fam is not None:
                out.append({"arity": "all", "amplitude": fam_list(fam)})
            return out

        return {
            "mode": self.mode.value,
            "lines": side(self.lines, self.line_family),
            "vertices": side(self.vertices, self.vertex_family),
        }


def builtin_model(name: str) -> ModelSpec:
    if name == "phi4":
        return ModelSpec(lines={2: EPS}, vertices={4: G}, name=name)
    if name == "partitions":
        # V(x) = g(e^x - 1): every vertex arity carries one g
        return ModelSpec(lines={1: EPS}, vertex_family=ArityFamily(((Fraction(1), 0, 1),)),
                         name=name)
    if name == "bell-squared":
        return ModelSpec(
            mode=Mode.LEGS_GRADED,
            line_family=ArityFamily(((Fraction(1), ARITY, 0),)),
            vertex_family=ArityFamily(((Fraction(1), 0, 0),)),
            name=name,
        )
    raise UsageError(f"unknown built-in model {name!r}; choose from {', '.join(BUILTIN_MODELS)}")


def _parse_exponent(value: Any, where: str) -> Exponent:
    if value == ARITY:
        return ARITY
    if isinstance(value, int) and not isinstance(value, bool) and value >= 0:
        return value
    raise UsageError(f"{where}: exponent must be a non-negative integer or 'm', got {value!r}")


def _parse_monomials(raw: Any, where: str) -> list[tuple[Fraction, Exponent, Exponent]]:
    if not isinstance(raw, list):
        raise UsageError(f"{where}: amplitude must be a list of monomials")
    out = []
    for i, mono in enumerate(raw):
        if not isinstance(mono, dict) or "coef" not in mono:
            raise UsageError(f"{where}[{i}]: monomial needs a 'coef'")
        coef = mono["coef"]
        if not isinstance(coef, (str, int)) or isinstance(coef, bool):
            raise UsageError(f"{where}[{i}]: coef must be a 'p/q' string or integer")
        try:
            c = as_rational(coef)
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise UsageError(f"{where}[{i}]: bad rational {coef!r}") from exc
        out.append((c, _parse_exponent(mono.get("eps", 0), f"{where}[{i}].eps"),
                    _parse_exponent(mono.get("g", 0), f"{where}[{i}].g")))
    return out


def _parse_side(raw: Any, label: str) -> tuple[dict[int, BiPoly], ArityFamily | None]:
    if raw is None:
        return {}, None
    if not isinstance(raw, list):
        raise UsageError(f"'{label}' must be a list")
    amps: dict[int, BiPoly] = {}
    family = None
    for i, entry in enumerate(raw):
        where = f"{label}[{i}]"
        if not isinstance(entry, dict) or "arity" not in entry:
            raise UsageError(f"{where}: entry needs an 'arity'")
        monos = _parse_monomials(entry.get("amplitude", []), f"{where}.amplitude")
        arity = entry["arity"]
        if arity == "all":
            if family is not None:
                raise UsageError(f"{label}: more than one 'all' family")
            family = ArityFamily(tuple(monos))
            continue
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 1:
            raise UsageError(f"{where}: arity must be an integer >= 1 or 'all'")
        if any(a == ARITY or b == ARITY for _, a, b in monos):
            raise UsageError(f"{where}: the arity symbol 'm' is only allowed in 'all' entries")
        poly = BiPoly({})
        for c, a, b in monos:
            poly = poly + BiPoly.monomial(c, a, b)
        amps[arity] = amps.get(arity, BiPoly.zero()) + poly
    return amps, family


def model_from_dict(doc: Any, name: str = "custom") -> ModelSpec:
    if not isinstance(doc, dict):
        raise UsageError("model document must be a JSON object")
    try:
        mode = Mode(doc.get("mode", "finite"))
    except ValueError as exc:
        raise UsageError(f"unknown mode {doc.get('mode')!r}") from exc
    lines, line_family = _parse_side(doc.get("lines"), "lines")
    vertices, vertex_family = _parse_side(doc.get("vertices"), "vertices")
    return ModelSpec(lines=lines, vertices=vertices, mode=mode, line_family=line_family,
                     vertex_family=vertex_family, name=name)


def load_model(source: str | Path) -> ModelSpec:
    """Resolve a built-in model name or read a model JSON file."""
    if str(source) in BUILTIN_MODELS:
        return builtin_model(str(source))
    path = Path(source)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"no built-in model or file named {str(source)!r}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read model file {path}: {exc}") from exc
    return model_from_dict(doc, name=path.stem)


def _legs_per_degree(amps: Mapping[int, BiPoly], family: ArityFamily | None,
                     axis: int) -> Fraction | None:
    """Maximum number of legs one unit of eps (axis 0) or g (axis 1) can pay
    for, or ``None`` if some amplitude is free along that axis."""
    rate = Fraction(0)
    for arity, amp in amps.items():
        low = amp.min_eps_degree() if axis == 0 else amp.min_g_degree()
        if low == 0:
            return None
        rate = max(rate, Fraction(arity, low))
    if family is not None:
        fam_rate = family.legs_per_degree(axis)
        if fam_rate is None:
            return None
        rate = max(rate, fam_rate)
    return rate


def pairing_bound(model: ModelSpec, eps_order: int, g_order: int | None = None) -> int:
    """Largest leg count k whose pairing term can reach degree <= (N, J).

    Every pairing term with more legs than this lies beyond the truncation.
    Raises :class:`FinitenessError` if neither eps nor g bounds the legs.
    """
    if eps_order < 0 or (g_order is not None and g_order < 0):
        raise UsageError("truncation orders must be >= 0")
    bounds = []
    line_rate = _legs_per_degree(model.lines, model.line_family, 0)
    if line_rate is not None:
        bounds.append(math.floor(eps_order * line_rate))
    if g_order is not None:
        vertex_rate = _legs_per_degree(model.vertices, model.vertex_family, 1)
        if vertex_rate is not None:
            bounds.append(math.floor(g_order * vertex_rate))
    if not bounds:
        raise FinitenessError(
            f"model {model.name!r}: no truncation bounds the number of legs "
            f"(eps-order {eps_order}, g-order {g_order}); the coefficients are "
            "infinite sums over diagrams and cannot be computed exactly")
    return min(bounds)


@dataclass(frozen=True)
class PartitionSeries:
    """Bivariate coefficient table truncated at eps-degree N and g-degree J.

    ``g_order=None`` means no truncation in g (every g-degree present at
    eps-degree <= N is exact).  Only nonzero coefficients are stored.
    """

    coefficients: Mapping[tuple[int, int], Fraction]
    eps_order: int
    g_order: int | None = None

    def __post_init__(self) -> None:
        clean = {}
        for (i, j), c in self.coefficients.items():
            if i > self.eps_order or (self.g_order is not None and j > self.g_order):
                raise UsageError(f"coefficient ({i}, {j}) outside truncation")
            if c:
                clean[(i, j)] = as_rational(c)
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    def coeff(self, i: int, j: int) -> Fraction:
        if i > self.eps_order or (self.g_order is not None and j > self.g_order):
            raise IndexError(f"({i}, {j}) outside truncation ({self.eps_order}, {self.g_order})")
        return self.coefficients.get((i, j), Fraction(0))

    def eps_coefficient(self, i: int) -> BiPoly:
        """The coefficient of eps^i as a polynomial in g."""
        return BiPoly({(0, j): c for (a, j), c in self.coefficients.items() if a == i})

    def as_bipoly(self) -> BiPoly:
        return BiPoly(self.coefficients)

    def max_g_degree(self) -> int:
        return max((j for _, j in self.coefficients), default=0)

    def items(self):
        return self.coefficients.items()


def _truncator(eps_order: int, g_order: int | None) -> Callable[[BiPoly], BiPoly]:
    return lambda p: p.truncate(eps_order, g_order)


def _amplitude_series(amp: Callable[[int], BiPoly], k_max: int,
                      reduce: Callable[[BiPoly], BiPoly]) -> TruncSeries:
    coeffs = [BiPoly.zero()]
    for m in range(1, k_max + 1):
        coeffs.append(reduce(amp(m)) * Fraction(1, math.factorial(m)))
    return TruncSeries(coeffs, k_max)


def _exp_reduced(s: TruncSeries, reduce: Callable[[BiPoly], BiPoly]) -> TruncSeries:
    # exp recurrence with truncation applied at every step; truncation in
    # (eps, g) is a ring homomorphism so this equals truncating afterwards
    a = s.coeffs
    e = [BiPoly.one()]
    for n in range(1, len(a)):
        acc = BiPoly.zero()
        for k in range(1, n + 1):
            if a[k] and e[n - k]:
                acc = acc + reduce(a[k] * e[n - k]) * k
        e.append(acc * Fraction(1, n))
    return TruncSeries(e, s.order)


def partition_function(model: ModelSpec, eps_order: int,
                       g_order: int | None = None) -> PartitionSeries:
    """Z(eps, g) truncated at eps-degree ``eps_order`` and g-degree ``g_order``."""
    k_max = pairing_bound(model, eps_order, g_order)
    reduce = _truncator(eps_order, g_order)
    lines = _exp_reduced(_amplitude_series(model.line_amplitude, k_max, reduce), reduce)
    verts = _exp_reduced(_amplitude_series(model.vertex_amplitude, k_max, reduce), reduce)
    z = BiPoly.zero()
    for k in range(k_max + 1):
        a, b = lines[k], verts[k]
        if a and b:
            z = z + reduce(a * b) * math.factorial(k)
    return PartitionSeries(z.terms, eps_order, g_order)


def _graded_series(table: PartitionSeries, weight: int) -> TruncSeries:
    # grade of eps^i g^j is i + weight*j
    order = table.eps_order + weight * (table.g_order or 0)
    buckets: dict[int, dict[tuple[int, int], Fraction]] = {}
    for (i, j), c in table.items():
        buckets.setdefault(i + weight * j, {})[(i, j)] = c
    return TruncSeries([BiPoly(buckets.get(d, {})) for d in range(order + 1)], order)


def _ungraded(s: TruncSeries, eps_order: int, g_order: int | None) -> PartitionSeries:
    total = BiPoly.zero()
    for c in s.coeffs:
        total = total + c
    return PartitionSeries(total.truncate(eps_order, g_order).terms, eps_order, g_order)


def _grading_weight(table: PartitionSeries) -> int:
    """0 (grade by eps alone) when the eps^0 row is constant, else 1 (grade by
    total degree, which needs a finite g-order)."""
    if all(i > 0 or j == 0 for i, j in table.coefficients):
        return 0
    if table.g_order is None:
        raise DomainError("the eps^0 coefficient depends on g; a finite g_order is required")
    return 1


def _log_reduced(s: TruncSeries, reduce: Callable[[BiPoly], BiPoly]) -> TruncSeries:
    a = s.coeffs
    lg = [BiPoly.zero()]
    for n in range(1, len(a)):
        acc = a[n] * n
        for k in range(1, n):
            if lg[k] and a[n - k]:
                acc = acc - reduce(lg[k] * a[n - k]) * k
        lg.append(acc * Fraction(1, n))
    return TruncSeries(lg, s.order)


def free_energy(z: PartitionSeries) -> PartitionSeries:
    """``+ln Z``: the generating function of connected diagrams.

    The physics convention is F = -ln Z; the positive sign is kept here so that
    connected counts come out positive.
    """
    if z.coeff(0, 0) != 1:
        raise DomainError(f"free energy needs Z(0,0) = 1, got {z.coeff(0, 0)}")
    weight = _grading_weight(z)
    reduce = _truncator(z.eps_order, z.g_order)
    # grade-0 part is exactly the constant 1, so the graded log is defined
    return _ungraded(_log_reduced(_graded_series(z, weight), reduce), z.eps_order, z.g_order)


def exponentiate(c: PartitionSeries) -> PartitionSeries:
    """Inverse of :func:`free_energy`."""
    if c.coeff(0, 0) != 0:
        raise DomainError(f"exp needs a zero constant term, got {c.coeff(0, 0)}")
    weight = _grading_weight(c)
    reduce = _truncator(c.eps_order, c.g_order)
    return _ungraded(_exp_reduced(_graded_series(c, weight), reduce), c.eps_order, c.g_order)


def stirling_coefficients(n_max: int) -> list[list[int]]:
    """Rows ``[S(n,1), ..., S(n,n)]`` for n = 1..n_max, read off the
    partitions model as ``n! [eps^n g^k] Z``."""
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    z = partition_function(builtin_model("partitions"), n_max, n_max)
    rows = []
    for n in range(1, n_max + 1):
        row = [z.coeff(n, k) * math.factorial(n) for k in range(1, n + 1)]
        if any(v.denominator != 1 for v in row):
            raise AssertionError(f"non-integral Stirling row {n}: {row}")
        rows.append([int(v) for v in row])
    return rows


def egf_row(z: PartitionSeries, g_degree: int = 0) -> list[Fraction]:
    """``n! [eps^n g^j] Z`` for n = 0..N at a fixed g-degree."""
    return [z.coeff(n, g_degree) * math.factorial(n) for n in range(z.eps_order + 1)]
