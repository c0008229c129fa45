"""Cross-checks between independent routes to the same numbers.

Each ``check_*`` function returns a :class:`CheckResult`; a failed check is a
finding, reported through ``mismatches`` rather than raised.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from feyncount import combinatorics, engine, orders, wick
from feyncount.series import BiPoly

CHECKS = ("bell-squared", "stirling-model", "topology-identity", "oracle-agreement", "exp-log")

# minimum eps-degree per line arity; keeps legs <= 1.5 * eps-order
_LINE_MIN_EPS = {1: 1, 2: 2, 3: 2}


@dataclass
class CheckResult:
    check: str
    n: int
    passed: bool = True
    details: dict[str, Any] = field(default_factory=dict)
    mismatches: list[str] = field(default_factory=list)

    def expect(self, ok: bool, message: str) -> None:
        if not ok:
            self.passed = False
            self.mismatches.append(message)


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))


def random_finite_model(rng: random.Random) -> engine.ModelSpec:
    """A random FiniteSupport model with line and vertex arities <= 3.

    Line amplitudes carry enough eps that an eps-order of 4 bounds the
    diagrams at 6 legs; both amplitudes may mix in the other variable.
    """
    lines: dict[int, BiPoly] = {}
    for m in rng.sample([1, 2, 3], rng.randint(1, 3)):
        low = _LINE_MIN_EPS[m]
        poly = BiPoly.zero()
        for _ in range(rng.randint(1, 2)):
            poly = poly + BiPoly.monomial(_random_rational(rng), rng.randint(low, low + 1),
                                          rng.randint(0, 1))
        if poly.is_zero() or poly.min_eps_degree() < low:
            poly = BiPoly.monomial(1, low, 0)
        lines[m] = poly
    vertices: dict[int, BiPoly] = {}
    for n in rng.sample([1, 2, 3], rng.randint(1, 3)):
        poly = BiPoly.zero()
        for _ in range(rng.randint(1, 2)):
            poly = poly + BiPoly.monomial(_random_rational(rng), rng.randint(0, 1),
                                          rng.randint(0, 2))
        vertices[n] = poly if poly else BiPoly.monomial(1, 0, 1)
    return engine.ModelSpec(lines=lines, vertices=vertices, name="random")


def check_bell_squared(n: int) -> CheckResult:
    res = CheckResult("bell-squared", n)
    z = engine.partition_function(engine.builtin_model("bell-squared"), n)
    bell = combinatorics.bell_recurrence(n)
    for k in range(n + 1):
        got = z.coeff(k, 0) * math.factorial(k)
        res.expect(got == bell[k] ** 2, f"n={k}: n![eps^n]Z = {got}, B_n^2 = {bell[k] ** 2}")
    res.details["last"] = {"n": n, "B_n": str(bell[n]), "B_n_squared": str(bell[n] ** 2)}
    return res


def check_stirling_model(n: int) -> CheckResult:
    res = CheckResult("stirling-model", n)
    from_series = engine.stirling_coefficients(n)
    table = combinatorics.stirling2_table(n)
    bell = combinatorics.bell_recurrence(n)
    for k, row in enumerate(from_series, start=1):
        res.expect(row == table.row(k), f"row {k}: series {row} != recurrence {table.row(k)}")
        res.expect(sum(row) == bell[k], f"row {k}: sum {sum(row)} != B_{k} = {bell[k]}")
    res.details["last_row"] = [str(v) for v in from_series[-1]]
    return res


def check_topology_identity(n: int) -> CheckResult:
    res = CheckResult("topology-identity", n)
    reports = []
    for k in range(1, n + 1):
        rep = orders.verify_stirling_identity(k)
        reports.append({
            "n": k,
            "t_n": str(rep.t_n),
            "sum_S_d": str(rep.rhs),
            "fibers": {str(b): str(c) for b, c in rep.fibers.items()},
        })
        res.expect(rep.passed, f"n={k}: t_n={rep.t_n}, sum S(n,k)d_k={rep.rhs}, "
                               f"fibers {rep.fibers} vs {rep.expected_fibers}")
    res.details["t_n"] = reports[-1]["t_n"] if reports else "0"
    res.details["reports"] = reports
    return res


def check_oracle_agreement(n: int, seed: int = 0, models: int = 20) -> CheckResult:
    """Engine vs diagram oracle on ``models`` random models at eps/g order n,
    for Z and for ln Z (connected diagrams)."""
    res = CheckResult("oracle-agreement", n)
    rng = random.Random(seed)
    compared = 0
    for idx in range(models):
        model = random_finite_model(rng)
        z = engine.partition_function(model, n, n)
        oracle = wick.oracle_table(model, n, n)
        res.expect(dict(z.coefficients) == oracle, f"model {idx}: Z differs from oracle")
        c = engine.free_energy(z)
        oracle_c = wick.oracle_table(model, n, n, connected=True)
        res.expect(dict(c.coefficients) == oracle_c, f"model {idx}: ln Z differs from oracle")
        compared += len(oracle) + len(oracle_c)
    res.details.update(seed=seed, models=models, nonzero_coefficients_compared=compared)
    return res


def check_exp_log(n: int) -> CheckResult:
    res = CheckResult("exp-log", n)
    for name in engine.BUILTIN_MODELS:
        z = engine.partition_function(engine.builtin_model(name), n, n)
        res.expect(engine.exponentiate(engine.free_energy(z)) == z,
                   f"{name}: exp(ln Z) != Z at order {n}")
    n_orders = min(n, orders.DEFAULT_CAP)
    if n_orders >= 1:
        for chk in orders.connected_totals_cross_check(n_orders):
            res.details[chk.kind] = {
                "connected": [str(v) for v in chk.connected],
                "totals": [str(v) for v in chk.totals],
            }
            res.expect(chk.passed, f"{chk.kind}: exp gives {chk.from_exp}, direct {chk.totals}")
    return res


def run_check(name: str, n: int, seed: int = 0) -> CheckResult:
    if name == "bell-squared":
        return check_bell_squared(n)
    if name == "stirling-model":
        return check_stirling_model(n)
    if name == "topology-identity":
        return check_topology_identity(n)
    if name == "oracle-agreement":
        return check_oracle_agreement(n, seed)
    if name == "exp-log":
        return check_exp_log(n)
    raise ValueError(f"unknown check {name!r}")
