import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lipfree.errors import NotZeroSum, SpaceMismatch
from lipfree.fixtures import random_space, random_zero_sum
from lipfree.freespace import (
    FreeVector,
    extreme_molecules,
    free_norm_dual,
    free_norm_primal,
    is_extreme_molecule,
    is_norming,
    molecule,
    molecule_distance,
    pairing,
)
from lipfree.lipschitz import LipschitzFunction, lipschitz_norm
from lipfree.metric_core import (
    PointPair,
    circle_net,
    from_weighted_graph,
    intermediate_points,
    interval_net,
    validate_space,
)


@pytest.fixture
def path3():
    return from_weighted_graph(3, [(0, 1, 1), (1, 2, 1)])


class TestFreeVector:
    def test_zero_sum_enforced(self, path3):
        with pytest.raises(NotZeroSum):
            FreeVector(path3, [1.0, 0.0, 0.5])

    def test_point_masses_balance_at_base(self, path3):
        mu = FreeVector.from_point_masses(path3, {2: 1.0, 1: 0.5})
        assert mu.coeffs[path3.base] == -1.5
        assert mu.coeffs.sum() == 0.0

    def test_space_mismatch(self, path3):
        other = from_weighted_graph(3, [(0, 1, 2), (1, 2, 2)])
        with pytest.raises(SpaceMismatch):
            FreeVector(path3, [1, -1, 0]) + FreeVector(other, [1, -1, 0])


class TestFreeNormPrimal:
    def test_unnormalized_molecule_costs_distance(self, path3):
        mu = FreeVector(path3, [-1.0, 0.0, 1.0])
        value, plan = free_norm_primal(mu)
        assert value == 2.0
        assert plan == ((2, 0, 1.0),)

    def test_molecule_has_norm_one(self, path3):
        assert free_norm_primal(molecule(path3, 0, 2).to_free_vector()).value == 1.0

    def test_zero_vector(self, path3):
        assert free_norm_primal(FreeVector(path3, np.zeros(3))) == (0.0, ())

    def test_plan_is_a_feasible_transport(self):
        rng = np.random.default_rng(5)
        space = random_space(rng, 9)
        mu = random_zero_sum(rng, space)
        value, plan = free_norm_primal(mu)
        moved = np.zeros(space.n)
        for src, dst, mass in plan:
            assert mass > 0
            moved[src] += mass
            moved[dst] -= mass
        assert np.allclose(moved, mu.coeffs, atol=1e-12 * np.abs(mu.coeffs).sum())
        assert value == pytest.approx(
            sum(m * space.d(s, t) for s, t, m in plan), abs=1e-12)


class TestFreeNormDual:
    def test_molecule_maximizer_is_certified(self, path3):
        value, maximizer = free_norm_dual(molecule(path3, 0, 2).to_free_vector())
        assert value == pytest.approx(1.0, abs=1e-9)
        assert lipschitz_norm(maximizer).value <= 1 + 1e-9
        assert maximizer.values[path3.base] == 0.0

    def test_zero_vector(self, path3):
        assert free_norm_dual(FreeVector(path3, np.zeros(3))).value == pytest.approx(0.0, abs=1e-12)

    def test_opposite_molecules_cancel(self, path3):
        mu = molecule(path3, 0, 2).to_free_vector() + molecule(path3, 2, 0).to_free_vector()
        assert free_norm_dual(mu).value == pytest.approx(0.0, abs=1e-12)

    def test_agrees_with_primal_on_random_vectors(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            space = random_space(rng, int(rng.integers(3, 10)))
            mu = random_zero_sum(rng, space)
            flow = free_norm_primal(mu).value
            lp = free_norm_dual(mu).value
            assert abs(flow - lp) <= 1e-8 * max(1.0, flow)

    def test_pairing_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(15):
            space = random_space(rng, 6)
            mu = random_zero_sum(rng, space)
            f = LipschitzFunction(space, rng.normal(size=6))
            bound = lipschitz_norm(f).value * free_norm_primal(mu).value
            assert abs(pairing(f, mu)) <= bound + 1e-8


class TestNormProperties:
    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(st.floats(-3, 3), st.integers(0, 10_000))
    def test_homogeneity(self, a, seed):
        rng = np.random.default_rng(seed)
        space = random_space(rng, 5)
        mu = random_zero_sum(rng, space)
        lhs = free_norm_primal(a * mu).value
        rhs = abs(a) * free_norm_primal(mu).value
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-8)

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(st.integers(0, 10_000))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        space = random_space(rng, 5)
        mu, nu = random_zero_sum(rng, space), random_zero_sum(rng, space)
        assert (
            free_norm_primal(mu + nu).value
            <= free_norm_primal(mu).value + free_norm_primal(nu).value + 1e-8
        )


class TestMoleculeDistance:
    def test_same_molecule(self, path3):
        m = molecule(path3, 0, 1)
        assert molecule_distance(m, m) == 0.0

    def test_opposite_orientation(self, path3):
        assert molecule_distance(molecule(path3, 0, 1), molecule(path3, 1, 0)) == \
            pytest.approx(2.0, abs=1e-12)

    def test_path_pair_matches_dual_oracle(self, path3):
        diff = molecule(path3, 0, 1).to_free_vector() - \
            molecule(path3, 0, 2).to_free_vector()
        oracle = free_norm_dual(diff).value
        value = molecule_distance(molecule(path3, 0, 1), molecule(path3, 0, 2))
        assert value == pytest.approx(oracle, abs=1e-9)
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_space_mismatch(self, path3):
        other = from_weighted_graph(3, [(0, 1, 1), (1, 2, 1)])
        with pytest.raises(SpaceMismatch):
            molecule_distance(molecule(path3, 0, 1), molecule(other, 0, 1))


class TestExtremeMolecules:
    def test_two_point_space(self):
        two = validate_space([[0, 1], [1, 0]])
        assert is_extreme_molecule(two, PointPair(0, 1)).is_extreme
        assert [p.as_tuple() for p in extreme_molecules(two)] == [(0, 1)]

    def test_path_long_pair_has_certificate(self, path3):
        result = is_extreme_molecule(path3, PointPair(0, 2))
        assert not result.is_extreme
        support = dict(result.certificate)
        assert support == {(0, 1): pytest.approx(0.5), (1, 2): pytest.approx(0.5)}
        # certificate really reconstructs the molecule
        target = molecule(path3, 0, 2).to_free_vector().coeffs
        rebuilt = sum(
            w * molecule(path3, u, v).to_free_vector().coeffs
            for (u, v), w in result.certificate
        )
        assert np.allclose(rebuilt, target, atol=1e-9)

    def test_triangle_pairs_all_extreme(self):
        tri = from_weighted_graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        for pair in tri.pairs():
            assert is_extreme_molecule(tri, pair).is_extreme

    def test_interval_net_extremes_are_adjacent(self):
        for n in (1, 2, 5, 8):
            net = interval_net(n)
            assert [p.as_tuple() for p in extreme_molecules(net)] == [
                (k, k + 1) for k in range(n)
            ]

    def test_square_keeps_diameters(self):
        net = circle_net(4)
        assert [p.as_tuple() for p in extreme_molecules(net)] == [
            (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)
        ]

    def test_oracle_matches_betweenness_on_random_spaces(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            space = random_space(rng, int(rng.integers(3, 7)))
            for pair in space.pairs():
                lp_says = is_extreme_molecule(space, pair).is_extreme
                metric_says = not intermediate_points(space, pair)
                assert lp_says == metric_says


class TestIsNorming:
    def test_all_pairs_always_norming(self, path3):
        assert is_norming(path3, list(path3.pairs())).is_norming

    def test_missing_adjacent_pair_detected(self):
        net = interval_net(2)
        result = is_norming(net, [PointPair(0, 2)])
        assert not result.is_norming
        assert result.failing_vertex.as_tuple() in {(0, 1), (1, 2)}

    def test_extreme_set_is_norming(self):
        net = interval_net(3)
        assert is_norming(net, extreme_molecules(net)).is_norming

    def test_empty_set_rejected(self, path3):
        with pytest.raises(ValueError):
            is_norming(path3, [])


class TestMoleculeNormInvariant:
    @pytest.mark.parametrize("make", [
        lambda: interval_net(6),
        lambda: circle_net(7),
        lambda: from_weighted_graph(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)]),
    ])
    def test_every_molecule_is_unit(self, make):
        space = make()
        for pair in space.pairs():
            value = free_norm_primal(molecule(space, pair.x, pair.y).to_free_vector()).value
            assert abs(value - 1.0) <= 1e-9
