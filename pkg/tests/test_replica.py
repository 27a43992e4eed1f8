import numpy as np
import pytest
from scipy.integrate import quad

from randecon.ensemble import EnsembleParams
from randecon.errors import DomainError
from randecon.gaussian import gauss_hermite_rule, std_normal_pdf
from randecon.replica import (DEFAULT_RULE, SOLUTION_CSV_COLUMNS, OrderParams,
                              RescaledParams, moments_M,
                              psi_exploited, rescaled_residual,
                              saddle_residual, solution_csv_rows, solve_saddle,
                              sweep, x_star)

PARAMS = EnsembleParams(n=3.0, pi=0.65, f=0.5, eps=0.1)


@pytest.fixture(scope="module")
def converged():
    sol = solve_saddle(PARAMS)
    assert sol.branch == "industrial"
    return sol


class TestXStar:
    OP = OrderParams(Omega=0.2, kappa=0.3, p=1.1, sigma=0.8, chi=0.2,
                     chi_hat=1.4)

    def test_clamp(self):
        # k=0 with a < 0 (large positive t) clamps at zero
        assert x_star(5.0, 0, 0, self.OP, n=1.0) == 0.0

    def test_at_gap_zero(self):
        # k=1, a=0: quadratic gives sqrt(chi)
        t0 = (0.0 - self.OP.kappa) / np.sqrt(1.0 * self.OP.Omega)
        assert x_star(t0, 0, 1, self.OP, n=1.0) == pytest.approx(
            np.sqrt(0.2), abs=1e-12)

    def test_fixed_point_residual(self):
        rng = np.random.default_rng(3)
        for t in rng.normal(size=20):
            for x0 in (0, 1):
                xs = x_star(t, x0, 1, self.OP, n=1.0)
                a = x0 - self.OP.kappa - np.sqrt(self.OP.Omega) * t
                assert self.OP.chi / xs == pytest.approx(xs - a, abs=1e-12)

    def test_generic_utility_path_matches_log(self):
        rng = np.random.default_rng(4)
        for t in rng.normal(size=10):
            closed = x_star(t, 1, 1, self.OP, n=2.0, utility="log")
            a = 1 - self.OP.kappa - np.sqrt(2.0 * self.OP.Omega) * t
            from randecon.replica import _x_star_generic
            generic = _x_star_generic(np.array([a]), self.OP.chi, "log")[0]
            assert generic == pytest.approx(closed, abs=1e-10)


class TestMomentsM:
    OP = OrderParams(Omega=0.15, kappa=0.42, p=1.3, sigma=0.9, chi=0.12,
                     chi_hat=1.7)

    def brute_force(self, params):
        """Independent double quadrature: adaptive in t, exact in (x0, k)."""
        out = np.zeros(3)
        n_omega = params.n * self.OP.Omega
        w = np.sqrt(n_omega)
        for x0, wx in ((0.0, 1 - params.pi), (1.0, params.pi)):
            for k, wk in ((0, 1 - params.f), (1, params.f)):
                def g(t):
                    a = x0 - self.OP.kappa - w * t
                    if k == 1:
                        xs = 0.5 * (a + np.sqrt(a * a + 4 * self.OP.chi))
                    else:
                        xs = max(a, 0.0)
                    return xs - a
                kink = (x0 - self.OP.kappa) / w
                for j, f in enumerate((lambda t: g(t),
                                       lambda t: g(t) * t,
                                       lambda t: g(t) ** 2)):
                    val, _ = quad(lambda t: f(t) * std_normal_pdf(t),
                                  -12, 12, points=[kink] if abs(kink) < 12 else None,
                                  limit=400, epsabs=1e-12, epsrel=1e-12)
                    out[j] += wx * wk * val
        return out

    @pytest.mark.parametrize("pi,f,n", [(0.65, 0.5, 3.0), (0.3, 0.0, 1.0),
                                        (1.0, 0.8, 0.7), (0.5, 1.0, 2.0)])
    def test_against_double_quadrature(self, pi, f, n):
        params = EnsembleParams(n=n, pi=pi, f=f, eps=0.1)
        got = moments_M(self.OP, params)
        want = self.brute_force(params)
        np.testing.assert_allclose(got, want, atol=1e-7)

    def test_psi_half_at_coincidence(self):
        assert psi_exploited(1.0, 1.0, 0.3) == 0.5


class TestSaddleSolve:
    def test_industrial_point(self, converged):
        assert converged.residual_norm < 1e-9
        resid = saddle_residual(converged.op, PARAMS)
        assert np.linalg.norm(resid) < 1e-9

    def test_phi_in_unit_interval(self, converged):
        from randecon.observables import active_fraction
        phi = active_fraction(converged.op, PARAMS.eps)
        assert 0.0 < phi < 1.0

    def test_industrial_above_line(self):
        sol = solve_saddle(EnsembleParams(n=3.0, pi=0.9, f=0.5, eps=0.1))
        assert sol.branch == "industrial"

    def test_collapsed_below_line(self):
        sol = solve_saddle(EnsembleParams(n=0.2, pi=0.05, f=0.5, eps=0.1))
        assert sol.branch == "collapsed"

    def test_continuation_converges(self, converged):
        sol = solve_saddle(PARAMS.with_(n=2.9), init=converged.op)
        assert sol.branch == "industrial"
        assert sol.residual_norm < 1e-9

    def test_saddle_equation_restatements(self, converged):
        from randecon.gaussian import truncated_scale_moments
        op = converged.op
        _, s1, st, _ = truncated_scale_moments(op.p, op.sigma, op.chi_hat,
                                               PARAMS.eps)
        assert op.kappa == pytest.approx(
            op.p * op.chi + PARAMS.n * PARAMS.eps * s1, abs=1e-9)
        assert op.chi * op.sigma == pytest.approx(PARAMS.n * st, abs=1e-9)

    def test_omega_dominates_mean_squared(self, converged):
        from randecon.gaussian import truncated_scale_moments
        op = converged.op
        _, s1, _, s2 = truncated_scale_moments(op.p, op.sigma, op.chi_hat,
                                               PARAMS.eps)
        assert op.Omega == pytest.approx(s2, abs=1e-9)
        assert op.Omega >= s1 ** 2

    def test_node_doubling_stability(self, converged):
        fine = gauss_hermite_rule(240)
        sol = solve_saddle(PARAMS, init=converged.op, rule=fine)
        assert np.max(np.abs(sol.op.as_array() - converged.op.as_array())) < 1e-7

    def test_collapsed_f_independence(self):
        a = solve_saddle(EnsembleParams(n=1.0, pi=0.31, f=0.2, eps=0.1))
        b = solve_saddle(EnsembleParams(n=1.0, pi=0.31, f=0.8, eps=0.1))
        assert a.branch == b.branch == "collapsed"
        np.testing.assert_allclose(a.op.as_array(), b.op.as_array(), atol=1e-8)

    def test_collapsed_sentinel_shape(self):
        # the chi=0 system has only the all-zero corner solution in the
        # collapsed phase; the sentinel encodes it with residual zero
        sol = solve_saddle(EnsembleParams(n=1.0, pi=0.31, f=0.5, eps=0.1))
        assert sol.branch == "collapsed"
        assert sol.op.Omega == 0.0 and sol.op.ell == 0.0 and sol.op.gamma == 0.0
        assert sol.residual_norm == 0.0

    def test_rescaled_residual_definition(self):
        # independent recomputation of the five chi=0 residuals
        from randecon.gaussian import (gauss_moment_I,
                                       truncated_scale_moments)
        op = RescaledParams(Omega=0.2, kappa=0.4, ell=0.1, gamma=0.7, delta=1.1)
        params = EnsembleParams(n=1.5, pi=0.3, f=0.5, eps=0.1)
        w = np.sqrt(params.n * op.Omega)
        m1 = mt = m2 = 0.0
        for x0, wx in ((0.0, 1 - params.pi), (1.0, params.pi)):
            b = (op.kappa - x0) / w
            m1 += wx * w * gauss_moment_I(1, b)
            mt += wx * w * gauss_moment_I(0, b)
            m2 += wx * w ** 2 * gauss_moment_I(2, b)
        _, s1, _, s2 = truncated_scale_moments(op.ell, op.gamma, op.delta,
                                               params.eps)
        want = np.array([
            op.ell - m1,
            op.delta - mt / w,
            op.gamma - np.sqrt(m2 - op.ell ** 2),
            op.Omega - s2,
            op.kappa - op.ell - params.n * params.eps * s1,
        ])
        np.testing.assert_allclose(rescaled_residual(op, params), want,
                                   atol=1e-12)

    def test_residual_domain_errors(self):
        bad = OrderParams(Omega=0.1, kappa=0.1, p=1.0, sigma=-1.0, chi=0.1,
                          chi_hat=1.0)
        with pytest.raises(DomainError):
            saddle_residual(bad, PARAMS)
        with pytest.raises(DomainError):
            rescaled_residual(RescaledParams(0.1, 0.1, 0.1, -1.0, 1.0), PARAMS)


class TestSweep:
    def test_empty_grid(self):
        assert sweep([]) == []

    def test_branch_switches_once(self):
        # pi-grid crossing the transition at n=1, eps=0.1 (pi_c ~ 0.330)
        grid = [EnsembleParams(n=1.0, pi=pi, f=0.5, eps=0.1)
                for pi in np.linspace(0.45, 0.25, 21)]
        sols = sweep(grid)
        labels = [s.branch for s in sols]
        assert "failed" not in labels
        switches = sum(1 for a, b in zip(labels, labels[1:]) if a != b)
        assert switches == 1
        assert labels[0] == "industrial" and labels[-1] == "collapsed"

    def test_csv_schema(self):
        grid = [EnsembleParams(n=1.0, pi=pi, f=0.5, eps=0.1)
                for pi in (0.5, 0.28)]
        sols = sweep(grid)
        rows = solution_csv_rows(sols)
        assert len(SOLUTION_CSV_COLUMNS) == 13
        assert all(len(r) == 13 for r in rows)
        collapsed = rows[1]
        assert collapsed[4] == "collapsed"
        # chi column holds exactly zero on the collapsed branch
        assert collapsed[9] == 0.0


# branch_switch_pi agreement with the analytic critical line is exercised
# in tests/test_acceptance.py (f-independence plus the 3-point n-grid).
