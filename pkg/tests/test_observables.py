import numpy as np
import pytest
from scipy.integrate import quad

from randecon.ensemble import EnsembleParams
from randecon.observables import (ObservableSet, active_fraction,
                                  conditional_consumption, goods_atom,
                                  goods_density, jump_decomposition,
                                  mean_scale, observable_csv_row,
                                  observable_set, scale_density,
                                  utility_per_final_good)
from randecon.replica import OrderParams, RescaledParams, solve_saddle

PARAMS = EnsembleParams(n=3.0, pi=0.65, f=0.5, eps=0.1)


@pytest.fixture(scope="module")
def sol():
    out = solve_saddle(PARAMS)
    assert out.branch == "industrial"
    return out


@pytest.fixture(scope="module")
def obs(sol):
    return observable_set(sol)


class TestActiveFraction:
    def test_limits(self):
        op_small = OrderParams(0.1, 0.1, 1e-14, 1.0, 0.1, 1.0)
        assert active_fraction(op_small, 0.1) == pytest.approx(0.5, abs=1e-12)
        op_large = OrderParams(0.1, 0.1, 1e6, 1.0, 0.1, 1.0)
        assert active_fraction(op_large, 0.1) == pytest.approx(0.0, abs=1e-200)

    def test_in_unit_interval(self, sol):
        assert 0.0 < active_fraction(sol.op, PARAMS.eps) < 1.0


class TestScaleDensity:
    def test_normalization(self, sol):
        op = sol.op
        phi = active_fraction(op, PARAMS.eps)
        integral, _ = quad(lambda s: scale_density(s, op, PARAMS.eps), 0, 50,
                           limit=300)
        assert (1 - phi) + integral == pytest.approx(1.0, abs=1e-9)

    def test_mean_consistency(self, sol):
        op = sol.op
        integral, _ = quad(lambda s: s * scale_density(s, op, PARAMS.eps),
                           0, 50, limit=300)
        assert integral == pytest.approx(mean_scale(op, PARAMS.eps), abs=1e-9)

    def test_value_at_origin(self, sol):
        op = sol.op
        want = (op.chi_hat / (np.sqrt(2 * np.pi) * op.sigma)) * np.exp(
            -(PARAMS.eps * op.p) ** 2 / (2 * op.sigma ** 2))
        assert scale_density(0.0, op, PARAMS.eps) == pytest.approx(want,
                                                                  abs=1e-12)


class TestGoodsDensity:
    def test_atom_half_at_coincidence(self, sol):
        op = sol.op
        modified = OrderParams(op.Omega, 1.0, op.p, op.sigma, op.chi,
                               op.chi_hat)
        assert goods_atom(1, 0, modified, PARAMS) == 0.5

    def test_final_good_no_atom(self, sol):
        assert goods_atom(1, 1, sol.op, PARAMS) == 0.0

    @pytest.mark.parametrize("x0", [0, 1])
    def test_k1_normalization(self, sol, x0):
        integral, _ = quad(
            lambda x: goods_density(x, x0, 1, sol.op, PARAMS), 1e-12, 60,
            limit=400)
        assert integral == pytest.approx(1.0, abs=1e-7)

    @pytest.mark.parametrize("x0", [0, 1])
    def test_k0_normalization(self, sol, x0):
        atom = goods_atom(x0, 0, sol.op, PARAMS)
        integral, _ = quad(
            lambda x: goods_density(x, x0, 0, sol.op, PARAMS), 0, 60,
            limit=400)
        assert atom + integral == pytest.approx(1.0, abs=1e-9)

    def test_k0_mean_matches_conditional(self, sol):
        x11, x01, x10, x00 = conditional_consumption(sol.op, PARAMS)
        for x0, want in ((1, x10), (0, x00)):
            mean, _ = quad(
                lambda x: x * goods_density(x, x0, 0, sol.op, PARAMS), 0, 60,
                limit=400)
            assert mean == pytest.approx(want, abs=1e-9)

    def test_k1_mean_matches_conditional(self, sol):
        x11, x01, _, _ = conditional_consumption(sol.op, PARAMS)
        for x0, want in ((1, x11), (0, x01)):
            mean, _ = quad(
                lambda x: x * goods_density(x, x0, 1, sol.op, PARAMS), 1e-12,
                60, limit=400)
            assert mean == pytest.approx(want, abs=1e-7)


class TestObservableSet:
    def test_consumption_waste_identity(self, obs):
        want_xc = PARAMS.f * (PARAMS.pi * obs.x11 + (1 - PARAMS.pi) * obs.x01)
        want_xw = (1 - PARAMS.f) * (PARAMS.pi * obs.x10
                                    + (1 - PARAMS.pi) * obs.x00)
        assert obs.consumption == pytest.approx(want_xc, abs=1e-12)
        assert obs.waste == pytest.approx(want_xw, abs=1e-12)
        assert obs.consumption + obs.waste == pytest.approx(obs.x_mean,
                                                            abs=1e-9)

    def test_mean_availability_identity(self, obs):
        want = PARAMS.pi - PARAMS.n * PARAMS.eps * obs.s_mean
        assert obs.x_mean == pytest.approx(want, abs=1e-6)

    def test_csv_row_shape(self, sol, obs):
        row = observable_csv_row(sol, obs)
        assert len(row) == 15
        assert row[4] == "industrial"


class TestCollapsedBranch:
    def test_conditional_consumption(self):
        op = RescaledParams(0.0, 0.0, 0.0, 0.0, float("nan"))
        assert conditional_consumption(op, PARAMS) == (1.0, 0.0, 1.0, 0.0)

    def test_aggregates(self):
        sol = solve_saddle(EnsembleParams(n=0.2, pi=0.05, f=0.5, eps=0.1))
        assert sol.branch == "collapsed"
        obs = observable_set(sol)
        assert obs.consumption == pytest.approx(0.5 * 0.05, abs=1e-12)
        assert obs.waste == pytest.approx(0.5 * 0.05, abs=1e-12)
        assert obs.utility == float("-inf")

    def test_utility_all_primary(self):
        op = RescaledParams(0.0, 0.0, 0.0, 0.0, float("nan"))
        assert utility_per_final_good(
            op, EnsembleParams(n=0.2, pi=1.0, f=0.5, eps=0.1)) == 0.0
        assert utility_per_final_good(
            op, EnsembleParams(n=0.2, pi=0.4, f=0.5, eps=0.1)) == float("-inf")


class TestJumpDecomposition:
    def test_consistency(self, sol, obs):
        xc, xw = jump_decomposition(sol.op, PARAMS)
        assert xc == pytest.approx(obs.consumption, abs=1e-12)
        assert xw == pytest.approx(obs.waste, abs=1e-12)
        # dX = dXC + dXW with dX = n eps <s*>
        d_x = PARAMS.n * PARAMS.eps * obs.s_mean
        d_xc = PARAMS.f * (PARAMS.pi * (1 - obs.x11)
                           - (1 - PARAMS.pi) * obs.x01)
        d_xw = (1 - PARAMS.f) * (PARAMS.pi * (1 - obs.x10)
                                 - (1 - PARAMS.pi) * obs.x00)
        assert d_x == pytest.approx(d_xc + d_xw, abs=1e-6)
        assert d_x >= 0.0
