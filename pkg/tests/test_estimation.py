import numpy as np
import pytest

from infocore.analysis import check_balanced, enumerate_minimal_balanced_collections
from infocore.errors import InfiniteVariance, InputError, UnsupportedSampleSize
from infocore.estimation import (
    Grid,
    QuadratureSpec,
    de_game,
    gaussian,
    grid,
    pitman_risk,
    realize,
    sum_of,
    uniform,
    variance,
)
from infocore.game import Modularity, check_modularity


class TestPitmanRisk:
    @pytest.mark.parametrize("M", [1, 2, 3])
    def test_gaussian(self, M):
        assert pitman_risk(gaussian(1.0), M).risk == pytest.approx(1 / M, abs=1e-3)

    def test_uniform_fixtures(self):
        assert pitman_risk(uniform(0, 1), 1).risk == pytest.approx(1 / 12, abs=1e-3)
        assert pitman_risk(uniform(0, 1), 2).risk == pytest.approx(1 / 24, abs=1e-3)

    def test_uniform_three_samples(self):
        # posterior is uniform on an interval of length 1 - range
        assert pitman_risk(uniform(0, 1), 3).risk == pytest.approx(1 / 40, abs=1e-3)

    def test_triangular(self):
        assert pitman_risk(sum_of(uniform(0, 1), uniform(0, 1)), 1).risk == pytest.approx(
            1 / 6, abs=1e-3)

    def test_error_bound_reported(self):
        est = pitman_risk(uniform(0, 1), 2)
        assert 0 <= est.error < 1e-3
        assert abs(est.risk - 1 / 24) <= 1e-3

    @pytest.mark.parametrize("f", [gaussian(2.0), uniform(0, 1), sum_of(uniform(0, 1), gaussian(0.5))])
    @pytest.mark.parametrize("M", [1, 2])
    def test_location_invariance(self, f, M):
        if isinstance(f, type(gaussian(1.0))):
            g = gaussian(f.var, 3.7)
        elif isinstance(f, type(uniform(0, 1))):
            g = uniform(f.a + 3.7, f.b + 3.7)
        else:
            g = sum_of(uniform(3.7, 4.7), gaussian(0.5))
        assert pitman_risk(f, M).risk == pytest.approx(pitman_risk(g, M).risk, abs=1e-6)

    def test_grid_density(self):
        x = np.linspace(0, 1, 1001)
        f = grid(0.0, 0.001, np.ones_like(x))
        assert pitman_risk(f, 1).risk == pytest.approx(1 / 12, abs=1e-3)

    def test_errors(self):
        with pytest.raises(UnsupportedSampleSize):
            pitman_risk(gaussian(1.0), 4)
        with pytest.raises(InputError):
            grid(0.0, 0.1, [1.0, 1.0])
        with pytest.raises(InputError):
            QuadratureSpec(theta_points=100)
        with pytest.raises(InfiniteVariance):
            pitman_risk(Grid(0.0, 1.0, (0.0, 0.0)), 1)


class TestRealize:
    def test_variance_additive(self):
        f = realize(sum_of(uniform(0, 1), uniform(0, 2), gaussian(0.3)))
        assert variance(f) == pytest.approx(1 / 12 + 4 / 12 + 0.3, abs=1e-5)

    def test_gaussians_closed_form(self):
        f = realize(sum_of(gaussian(1.0, 1.0), gaussian(2.0)))
        assert f == gaussian(3.0, 1.0)


class TestDeGame:
    def test_gaussian_closed_form(self):
        g = de_game([gaussian(1.0), gaussian(2.0)], 1)
        assert g.values == (0, 1.0, 2.0, 3.0)
        assert check_modularity(g).verdict is Modularity.ADDITIVE

    def test_quadrature_agrees_with_closed_form(self):
        for M in (1, 2, 3):
            assert pitman_risk(sum_of(gaussian(1.0), gaussian(2.0)), M).risk == pytest.approx(
                3.0 / M, abs=1e-3)

    def test_uniforms_one_sample(self):
        g = de_game([uniform(0, 1), uniform(0, 1)], 1)
        assert g.values[3] == pytest.approx(1 / 6, abs=1e-3)
        assert g.values[3] == pytest.approx(g.values[1] + g.values[2], abs=1e-3)

    def test_uniforms_two_samples(self):
        g, err = de_game([uniform(0, 1), uniform(0, 1)], 2, return_errors=True)
        assert g.values[1] == pytest.approx(1 / 24, abs=1e-3)
        assert g.values[3] >= 1 / 12 - 5e-3
        assert set(err) == {1, 2, 3}
        assert check_balanced(g).balanced

    def test_minimal_balanced_collections(self):
        g = de_game([uniform(0, 1), gaussian(0.2), uniform(0, 2)], 2)
        for fp in enumerate_minimal_balanced_collections(3):
            assert fp.value(g) <= g.total + 5e-3
