import math
import random
from fractions import Fraction

import pytest

from feyncount import wick
from feyncount.checks import random_finite_model
from feyncount.combinatorics import bell_recurrence, stirling2_table
from feyncount.engine import (
    ArityFamily,
    Mode,
    ModelSpec,
    PartitionSeries,
    builtin_model,
    egf_row,
    exponentiate,
    free_energy,
    load_model,
    model_from_dict,
    pairing_bound,
    partition_function,
    stirling_coefficients,
)
from feyncount.errors import DomainError, FinitenessError, UsageError
from feyncount.series import EPS, G, BiPoly, TruncSeries


def phi4_closed_form(n):
    # leg bijections over the relabelling group of n 4-vertices and 2n lines
    return Fraction(math.factorial(4 * n),
                    math.factorial(n) * 24 ** n * 2 ** (2 * n) * math.factorial(2 * n))


class TestBuiltinModels:
    def test_partitions(self):
        m = builtin_model("partitions")
        assert m.lines == {1: EPS}
        assert all(m.vertex_amplitude(n) == G for n in range(1, 20))
        assert m.mode is Mode.FINITE_SUPPORT

    def test_phi4(self):
        m = builtin_model("phi4")
        assert m.lines == {2: EPS} and m.vertices == {4: G}

    def test_bell_squared(self):
        m = builtin_model("bell-squared")
        assert all(m.line_amplitude(k) == EPS ** k for k in range(1, 10))
        assert all(m.vertex_amplitude(k) == 1 for k in range(1, 10))
        assert m.mode is Mode.LEGS_GRADED

    def test_unknown(self):
        with pytest.raises(UsageError):
            builtin_model("phi3")


class TestPairingBound:
    def test_bell_squared(self):
        assert pairing_bound(builtin_model("bell-squared"), 4) == 4

    def test_phi4(self):
        assert pairing_bound(builtin_model("phi4"), 4) == 8
        assert pairing_bound(builtin_model("phi4"), 4, 2) == 8
        assert pairing_bound(builtin_model("phi4"), 4, 1) == 4

    def test_partitions(self):
        assert pairing_bound(builtin_model("partitions"), 10) == 10

    def test_divergent(self):
        m = ModelSpec(line_family=ArityFamily(((Fraction(1), 1, 0),)),
                      vertex_family=ArityFamily(((Fraction(1), 0, 1),)))
        with pytest.raises(FinitenessError):
            pairing_bound(m, 2, 2)
        with pytest.raises(FinitenessError):
            partition_function(m, 2, 2)

    def test_vertex_side_bound(self):
        # lines free in eps, vertices each carry g
        m = ModelSpec(lines={1: BiPoly.one()}, vertices={2: G})
        assert pairing_bound(m, 0, 3) == 6
        with pytest.raises(FinitenessError):
            pairing_bound(m, 3)

    def test_bound_is_sufficient(self):
        # raising the truncation and cutting back must not change coefficients
        rng = random.Random(3)
        for _ in range(10):
            m = random_finite_model(rng)
            small = partition_function(m, 3, 3)
            big = partition_function(m, 5, 5)
            cut = {k: v for k, v in big.items() if k[0] <= 3 and k[1] <= 3}
            assert dict(small.coefficients) == cut


class TestPartitionFunction:
    def test_partitions_eps3(self):
        z = partition_function(builtin_model("partitions"), 3, 3)
        assert z.eps_coefficient(3) == (G + 3 * G ** 2 + G ** 3) * Fraction(1, 6)

    def test_phi4(self):
        z = partition_function(builtin_model("phi4"), 4, 2)
        assert z.coeff(2, 1) == Fraction(1, 8) == phi4_closed_form(1)
        assert z.coeff(4, 2) == Fraction(35, 384) == phi4_closed_form(2)
        assert z.coeff(0, 0) == 1

    def test_phi4_closed_form_higher(self):
        z = partition_function(builtin_model("phi4"), 8, 4)
        for n in range(5):
            assert z.coeff(2 * n, n) == phi4_closed_form(n)
        assert set(z.coefficients) == {(2 * n, n) for n in range(5)}

    def test_bell_squared(self):
        z = partition_function(builtin_model("bell-squared"), 6)
        assert z.coeff(4, 0) == Fraction(225, 24)
        bell = bell_recurrence(6)
        assert egf_row(z) == [b * b for b in bell]

    def test_constant_term(self):
        for name in ("phi4", "partitions", "bell-squared"):
            assert partition_function(builtin_model(name), 0, 0).coefficients == {(0, 0): 1}

    def test_shift_operator(self):
        # only L_1 = eps: Z(eps, g) is the vertex exponential evaluated at x = eps
        rng = random.Random(8)
        for _ in range(5):
            verts = {n: BiPoly.monomial(Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 4)),
                                        0, rng.randint(1, 2))
                     for n in rng.sample(range(1, 6), 3)}
            m = ModelSpec(lines={1: EPS}, vertices=verts)
            z = partition_function(m, 10)
            pot = TruncSeries([BiPoly.zero()] + [
                verts.get(n, BiPoly.zero()) * Fraction(1, math.factorial(n)) for n in range(1, 11)
            ])
            f = pot.exp()
            shifted = BiPoly.zero()
            for n in range(11):
                shifted = shifted + f[n] * EPS ** n
            assert z.as_bipoly() == shifted

    def test_linearity_in_one_amplitude(self):
        # L_m -> lam * mu * L_m: d Z / d lam at 0 is the one-m-line diagram sum
        rng = random.Random(21)
        for _ in range(6):
            base = random_finite_model(rng)
            m = rng.choice(sorted(base.lines))
            mu = Fraction(rng.randint(1, 5), rng.randint(1, 5))
            k_max = pairing_bound(base, 3, 3)
            degree = k_max // m
            values = []
            for t in range(degree + 1):
                lines = dict(base.lines)
                lines[m] = lines[m] * (t * mu)
                values.append(partition_function(
                    ModelSpec(lines=lines, vertices=base.vertices), 3, 3))
            first_order = {}
            for s in wick._model_diagrams(base, k_max):
                if s.diagram.line_arities.count(m) == 1:
                    for key, c in s.amplitude.terms.items():
                        if key[0] <= 3 and key[1] <= 3:
                            first_order[key] = first_order.get(key, 0) + c * mu * s.symmetry_number
            keys = set(first_order).union(*(z.coefficients for z in values))
            weights = _derivative_weights(degree)
            for key in keys:
                slope = sum(w * z.coefficients.get(key, 0) for w, z in zip(weights, values))
                assert slope == first_order.get(key, 0)


def _derivative_weights(degree):
    """w_t with sum_t w_t p(t) = p'(0) for every polynomial p of this degree."""
    nodes = range(degree + 1)
    weights = []
    for t in nodes:
        if t == 0:
            weights.append(-sum(Fraction(1, s) for s in nodes if s))
            continue
        num = math.prod(-s for s in nodes if s not in (0, t))
        den = math.prod(t - s for s in nodes if s != t)
        weights.append(Fraction(num, den))
    return weights


class TestFreeEnergy:
    def test_bell_squared_eps2(self):
        m = builtin_model("bell-squared")
        c = free_energy(partition_function(m, 4, 0))
        assert c.coeff(2, 0) == Fraction(3, 2)
        connected = wick.connected_filter(wick.enumerate_diagrams(m, 2))
        assert wick.symmetry_sum(connected) == Fraction(3, 2)

    def test_roundtrip_known_series(self):
        target = PartitionSeries({(1, 0): 1, (1, 1): Fraction(1, 3), (2, 2): -2}, 4, 3)
        z = exponentiate(target)
        assert free_energy(z) == target

    def test_labelled_posets(self):
        z = PartitionSeries({(n, 0): Fraction(v, math.factorial(n))
                             for n, v in enumerate([1, 1, 3, 19, 219])}, 4, 0)
        assert egf_row(free_energy(z)) == [0, 1, 2, 12, 146]

    def test_g_dependent_constant_row(self):
        # eps^0 row depends on g: handled by total-degree grading
        z = exponentiate(PartitionSeries({(0, 1): 1, (1, 0): 1, (1, 2): Fraction(1, 2)}, 3, 3))
        assert z.coeff(0, 2) == Fraction(1, 2)
        assert free_energy(z) == PartitionSeries({(0, 1): 1, (1, 0): 1, (1, 2): Fraction(1, 2)}, 3, 3)
        with pytest.raises(DomainError):
            free_energy(PartitionSeries(z.coefficients, 3, None))

    def test_constant_must_be_one(self):
        with pytest.raises(DomainError):
            free_energy(PartitionSeries({(0, 0): 2}, 2, 2))

    @pytest.mark.parametrize("name", ["phi4", "partitions", "bell-squared"])
    def test_exp_of_free_energy(self, name):
        z = partition_function(builtin_model(name), 10, 10)
        assert exponentiate(free_energy(z)) == z


class TestStirlingCoefficients:
    def test_rows(self):
        rows = stirling_coefficients(3)
        assert rows[1] == [1, 1]
        assert rows[2] == [1, 3, 1]

    def test_against_table_and_bell(self):
        rows = stirling_coefficients(10)
        table = stirling2_table(10)
        bell = bell_recurrence(10)
        for n, row in enumerate(rows, start=1):
            assert row == table.row(n)
            assert sum(row) == bell[n]


class TestModelFiles:
    def test_roundtrip_builtins(self):
        for name in ("phi4", "partitions", "bell-squared"):
            m = builtin_model(name)
            again = model_from_dict(m.to_dict())
            assert partition_function(again, 5, 5) == partition_function(m, 5, 5)

    def test_file(self, tmp_path):
        doc = {"mode": "finite",
               "lines": [{"arity": 2, "amplitude": [{"coef": "1", "eps": 1, "g": 0}]}],
               "vertices": [{"arity": 4, "amplitude": [{"coef": "1", "eps": 0, "g": 1}]}]}
        path = tmp_path / "phi4.json"
        import json
        path.write_text(json.dumps(doc))
        m = load_model(path)
        assert partition_function(m, 4, 2) == partition_function(builtin_model("phi4"), 4, 2)

    def test_rational_coefficients(self):
        m = model_from_dict({"lines": [{"arity": 1, "amplitude": [{"coef": "3/4", "eps": 1}]}],
                             "vertices": [{"arity": 1, "amplitude": [{"coef": "-2/3", "g": 1}]}]})
        assert m.lines[1] == EPS * Fraction(3, 4)
        assert m.vertices[1] == G * Fraction(-2, 3)

    @pytest.mark.parametrize("doc", [
        {"mode": "bogus"},
        {"lines": [{"arity": 0, "amplitude": []}]},
        {"lines": [{"arity": 1, "amplitude": [{"coef": "1/0"}]}]},
        {"lines": [{"arity": 1, "amplitude": [{"coef": 0.5}]}]},
        {"lines": [{"arity": 2, "amplitude": [{"coef": "1", "eps": "m"}]}]},
        {"mode": "legs-graded", "lines": [{"arity": 2, "amplitude": [{"coef": "1", "eps": 1}]}]},
        {"mode": "legs-graded", "lines": [{"arity": "all", "amplitude": [{"coef": "1", "eps": 0}]}]},
        [],
    ])
    def test_bad_documents(self, doc):
        with pytest.raises(UsageError):
            model_from_dict(doc)

    def test_missing_file(self):
        with pytest.raises(UsageError):
            load_model("/nonexistent/model.json")
