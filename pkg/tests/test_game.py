import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infocore.errors import (
    EmptySetInCollection,
    EmptySubset,
    InvalidOrder,
    LengthMismatch,
    NegativeValue,
    NonzeroEmptySet,
    TooManyPlayers,
    WrongLength,
)
from infocore.game import (
    FractionalPartition,
    Modularity,
    Orientation,
    additive_game,
    aspiration_contains,
    check_modularity,
    core_contains,
    is_fractional_partition,
    marginal_vector,
    new_game,
    shapley_value,
    subgame,
    to_fraction,
    uniform_degree_partition,
)
from infocore.generators import random_game, random_supermodular_game
from infocore.infogames import gmac_game, joint_pmf, power_profile, slepian_wolf_game

from oracles import shapley_by_permutations

H25 = 0.8112781244591328  # binary entropy of 1/4


def dsbs():
    return slepian_wolf_game(joint_pmf([2, 2], [0.375, 0.125, 0.125, 0.375]))


class TestNewGame:
    def test_smallest_game(self):
        g = new_game(1, "cost", [0, 5])
        assert g.n == 1 and g.total == 5 and g.exact

    def test_nonzero_empty_set(self):
        with pytest.raises(NonzeroEmptySet):
            new_game(2, "cost", [0.1, 1, 1, 2])

    def test_negative_value(self):
        with pytest.raises(NegativeValue):
            new_game(2, "cost", [0, -1, 1, 2])

    def test_wrong_length(self):
        with pytest.raises(WrongLength):
            new_game(2, "cost", [0, 1, 1])

    def test_too_many_players(self):
        with pytest.raises(TooManyPlayers):
            new_game(21, "cost", [0] * 8)

    def test_non_finite(self):
        with pytest.raises(Exception):
            new_game(1, "cost", [0, math.inf])

    def test_rational_strings(self):
        g = new_game(2, "cost", ["0", "1/2", "1/3", "5/6"])
        assert g.exact and g.values[3] == Fraction(5, 6)

    def test_dsbs_game_is_valid(self):
        g = dsbs()
        assert g.n == 2 and not g.exact and g.orientation is Orientation.COST

    def test_to_fraction_float_uses_repr(self):
        assert to_fraction(0.1) == Fraction(1, 10)


class TestSubgame:
    def test_relabel(self):
        g = new_game(3, "cost", [0, 1, 2, 3, 4, 5, 6, 7])
        u = subgame(g, 0b101)
        assert u.values == (0, 1, 4, 5)

    def test_identity(self):
        g = random_game(3, np.random.default_rng(0))
        assert subgame(g, 0b111).values == g.values

    def test_additive_stays_additive(self):
        g = additive_game([1, 2, 3, 4])
        for s in range(1, 16):
            assert check_modularity(subgame(g, s)).verdict is Modularity.ADDITIVE

    def test_empty(self):
        with pytest.raises(EmptySubset):
            subgame(additive_game([1, 2]), 0)


class TestModularity:
    def test_additive(self):
        assert check_modularity(additive_game([1, 2, 3])).verdict is Modularity.ADDITIVE

    def test_supermodular(self):
        r = check_modularity(new_game(2, "cost", [0, 1, 1, 3]))
        assert r.verdict is Modularity.SUPERMODULAR and r.supermodular_violation is None

    def test_adder_channel_submodular(self):
        r = check_modularity(new_game(2, "resource", [0, 1, 1, Fraction(3, 2)]))
        assert r.verdict is Modularity.SUBMODULAR

    def test_neither_reports_triples(self):
        g = new_game(3, "cost", [0, 1, 1, 3, 1, 1, 1, 4])
        r = check_modularity(g)
        assert r.verdict is Modularity.NEITHER
        assert r.supermodular_violation is not None and r.submodular_violation is not None

    def test_float_tolerance(self):
        g = new_game(2, "cost", [0.0, 1.0, 1.0, 2.0 - 1e-12], exact=False)
        assert check_modularity(g).verdict is Modularity.ADDITIVE

    def test_supermodular_subgames(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = random_supermodular_game(4, rng, exact=True)
            assert all(check_modularity(subgame(g, s)).verdict
                       in (Modularity.SUPERMODULAR, Modularity.ADDITIVE) for s in range(1, 16))


class TestMarginalAndShapley:
    def test_additive_marginals(self):
        g = additive_game([1, 2, 3])
        for order in itertools.permutations(range(3)):
            assert list(marginal_vector(g, order)) == [1, 2, 3]

    def test_two_player(self):
        g = new_game(2, "cost", [0, 0, 0, 1])
        assert list(marginal_vector(g, [0, 1])) == [0, 1]
        assert list(marginal_vector(g, [1, 0])) == [1, 0]

    def test_dsbs_marginal(self):
        m = marginal_vector(dsbs(), [0, 1])
        assert m == pytest.approx([H25, 1.0], abs=1e-6)

    def test_invalid_order(self):
        with pytest.raises(InvalidOrder):
            marginal_vector(additive_game([1, 2]), [0, 0])

    def test_shapley_fixtures(self):
        assert list(shapley_value(new_game(2, "cost", [0, 0, 0, 1]))) == [Fraction(1, 2)] * 2
        assert list(shapley_value(additive_game([1, 2, 3]))) == [1, 2, 3]
        g = new_game(3, "cost", [0, 0, 0, 1, 0, 1, 1, 2])
        assert list(shapley_value(g)) == [Fraction(2, 3)] * 3

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_shapley_equals_permutation_average(self, n):
        rng = np.random.default_rng(n)
        g = random_game(n, rng, exact=True)
        assert list(shapley_value(g)) == shapley_by_permutations(g.values, n)

    def test_shapley_axioms(self):
        rng = np.random.default_rng(11)
        u, v = random_game(4, rng), random_game(4, rng)
        phi_u, phi_v = shapley_value(u), shapley_value(v)
        assert sum(phi_u) == u.total
        assert list(shapley_value(u + v)) == list(phi_u + phi_v)
        perm = [2, 0, 3, 1]  # new player perm[i] is old player i
        vals = [None] * 16
        for s in range(16):
            t = sum(1 << perm[i] for i in range(4) if s >> i & 1)
            vals[t] = u.values[s]
        phi_p = shapley_value(new_game(4, "cost", vals))
        assert [phi_p[perm[i]] for i in range(4)] == list(phi_u)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10_000))
def test_marginal_vectors_telescope(n, seed):
    rng = np.random.default_rng(seed)
    g = random_game(n, rng, exact=True)
    order = list(rng.permutation(n))
    assert sum(marginal_vector(g, order)) == g.total


class TestMembership:
    def test_cost_fixtures(self):
        g = new_game(2, "cost", [0, 0, 0, 1])
        assert aspiration_contains(g, [1, 1])
        assert not aspiration_contains(g, [0.4, 0.4])
        assert core_contains(g, [0.5, 0.5])
        assert not core_contains(g, [1, 1])

    def test_gmac_resource(self):
        g = gmac_game(power_profile([3, 3], 1))
        assert not aspiration_contains(g, [1.0, 1.0])

    def test_dsbs_shapley_in_core(self):
        assert core_contains(dsbs(), [0.905639, 0.905639]) is False  # 6 decimals miss 1e-9
        g = dsbs().as_float(tol=1e-6)
        assert core_contains(g, [0.905639, 0.905639])
        assert core_contains(dsbs(), shapley_value(dsbs()))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            core_contains(additive_game([1, 2]), [1])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_aspiration_upward_closed(self, seed):
        rng = np.random.default_rng(seed)
        g = random_game(3, rng, exact=True)
        t = [g.values[-1]] * 3
        t = [max(x, max(g.values)) for x in t]
        assert aspiration_contains(g, t)
        bump = [x + Fraction(int(rng.integers(0, 5)), 3) for x in t]
        assert aspiration_contains(g, bump)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_nonnegativity_redundant_for_cost(self, seed):
        # singleton constraints already force t_i >= v({i}) >= 0
        rng = np.random.default_rng(seed)
        g = random_game(3, rng, exact=True)
        t = [Fraction(int(x), 2) - 1 for x in rng.integers(0, 25, size=3)]
        sums_ok = all(sum(t[i] for i in range(3) if s >> i & 1) >= g.values[s]
                      for s in range(1, 8))
        assert aspiration_contains(g, t) == sums_ok


class TestFractionalPartitions:
    def test_fixtures(self):
        assert is_fractional_partition(FractionalPartition((1, 2, 4), (1, 1, 1)), 3)
        pairs = FractionalPartition((3, 5, 6), (Fraction(1, 2),) * 3)
        assert is_fractional_partition(pairs, 3)
        assert not is_fractional_partition(FractionalPartition((3,), (1,)), 3)

    def test_empty_set(self):
        with pytest.raises(EmptySetInCollection):
            is_fractional_partition(FractionalPartition((0, 1), (1, 1)), 2)

    def test_degree(self):
        fp = uniform_degree_partition((3, 5, 6), 3)
        assert fp.max_degree(3) == 2 and fp.weights == (Fraction(1, 2),) * 3
