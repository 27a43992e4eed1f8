"""Finite-size ground truth: single-instance equilibria and geometry probes.

Three numerical experiments on sampled economies:

* ``solve_equilibrium``: the consumer's concave program
  max_{s >= 0} sum_c k_c log(x0_c + (q^T s)_c), subject to nonnegative
  availability of every good, via a log-barrier Newton method.  Shadow
  prices come with the barrier for free and are certified against the
  KKT conditions (zero profit, complementary slackness, Walras' law).
* ``lp_feasibility_fraction``: does the homogeneous cone
  {s >= 0 : (q^T s)_c >= 0 for non-primary c} contain more than the
  origin?  A bounded LP answers per instance; the fraction over trials
  estimates the probability, which drops from 1 to 0 across the
  critical line.
* ``pca_probe``: samples vertices of the full feasible polytope by
  maximizing random linear objectives, and measures the elongation of
  the sampled cloud by the top eigenvalue of its correlation matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import linprog

from .ensemble import EconomyInstance, EnsembleParams, sample_economy
from .errors import DomainError, NoConvergenceError

#: production scales below this are treated as shut down
ACTIVE_THRESHOLD = 1e-4

_MU_FINAL = 1e-9
_MU_SHRINK = 0.2


@dataclass(frozen=True)
class EquilibriumSolution:
    s_star: np.ndarray = field(repr=False)   # (N,)
    x_star: np.ndarray = field(repr=False)   # (C,)
    duals: np.ndarray = field(repr=False)    # (C,) shadow prices
    active_set: np.ndarray = field(repr=False)
    objective: float
    kkt_residual: float
    status: str = "optimal"                  # or "infeasible" (utility -inf)

    @property
    def n_active(self) -> int:
        return int(self.active_set.size)


def _phase_one(q: np.ndarray, x0: np.ndarray, eps: float):
    """Strictly feasible start: LP max t s.t. x0 + q^T s >= t, 0 <= s <= S.

    Returns (s0, t*) with every availability at least t* at s0; t* <= 0
    means the feasible set has empty interior (collapsed instance).
    """
    n_act, n_goods = q.shape
    s_cap = float(x0.sum()) / eps + 1.0
    # variables (s_1..s_N, t); linprog minimizes, so objective is -t
    c = np.zeros(n_act + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-q.T, np.ones((n_goods, 1))])   # t - (q^T s)_c <= x0_c
    res = linprog(c, A_ub=a_ub, b_ub=x0,
                  bounds=[(0.0, s_cap)] * n_act + [(None, 0.25)],
                  method="highs-ds")
    if res.status != 0:
        raise NoConvergenceError(f"phase-one LP failed: {res.message}")
    s0, t = res.x[:-1], float(res.x[-1])
    if t <= 1e-7:
        return s0, t
    # push s strictly inside without losing more than half the margin
    drift = q.sum(axis=0)     # d(x)/d(uniform s shift)
    worst = float(np.abs(drift).max()) + 1e-12
    delta = min(1e-4, 0.5 * t / worst)
    return s0 + delta, t


def _barrier_newton(q, x0, weights, s, mu, gtol=1e-9, max_iter=120):
    """Inner Newton loop for F(s) = sum_c w_c log x_c + mu sum_i log s_i.

    Convergence is measured on the gradient itself, not the Newton
    decrement: the barrier makes shut-down coordinates extremely stiff,
    so a tiny decrement can hide order-1e-3 gradient components (exactly
    the profit residuals the KKT certificate looks at).  Once inside the
    quadratic basin the objective changes by less than float precision,
    so backtracking compares F only while the decrement is still large.
    """
    for _ in range(max_iter):
        x = x0 + s @ q
        grad = q @ (weights / x) + mu / s
        if float(np.abs(grad).max()) < gtol:
            return s
        curv = (q * (weights / x**2)) @ q.T
        curv[np.diag_indices_from(curv)] += mu / s**2
        step = cho_solve(cho_factor(curv), grad)
        decrement = float(grad @ step)
        # ratio test: stay strictly inside x > 0, s > 0
        dx = step @ q
        alpha = 1.0
        for val, dv in ((x, dx), (s, step)):
            shrink = dv < 0
            if np.any(shrink):
                alpha = min(alpha, 0.99 * float(np.min(-val[shrink] / dv[shrink])))
        if decrement > 1e-6:
            # backtracking on the barrier objective while far from center
            f0 = float(weights @ np.log(x) + mu * np.log(s).sum())
            while alpha > 1e-14:
                s_try = s + alpha * step
                x_try = x0 + s_try @ q
                if np.all(x_try > 0) and np.all(s_try > 0):
                    f_try = float(weights @ np.log(x_try) + mu * np.log(s_try).sum())
                    if f_try > f0:
                        break
                alpha *= 0.5
            else:
                return s
        s = s + alpha * step
    return s


def solve_equilibrium(econ: EconomyInstance, tol: float = 1e-8) -> EquilibriumSolution:
    """Equilibrium scales, availabilities and shadow prices of one instance.

    Log-barrier Newton with a decreasing barrier weight; the final
    barrier gives dual prices mu/x_c for non-final goods and 1/x_c
    (marginal log utility) for final goods.  When the feasible set has
    empty interior the economy cannot operate: s* = 0 and, unless every
    final good is primary, the utility is -inf (status "infeasible").
    """
    q, x0, k = econ.q, econ.x0.astype(bool), econ.k.astype(bool)
    if not k.any():
        # nothing enters the utility: s* = 0 is an admissible optimum
        x = econ.x0.copy()
        return EquilibriumSolution(
            s_star=np.zeros(econ.N), x_star=x, duals=np.zeros(econ.C),
            active_set=np.array([], dtype=int), objective=0.0,
            kkt_residual=0.0, status="optimal")
    s0, t = _phase_one(q, econ.x0, econ.eps)
    if t <= 1e-7:
        x = econ.x0.copy()
        stuck = k & (x <= 0)
        objective = float("-inf") if stuck.any() else 0.0
        duals = np.where(k & (x > 0), 1.0 / np.where(x > 0, x, 1.0), 0.0)
        profits = q @ duals
        return EquilibriumSolution(
            s_star=np.zeros(econ.N), x_star=x, duals=duals,
            active_set=np.array([], dtype=int), objective=objective,
            kkt_residual=float(max(0.0, profits.max(initial=0.0))),
            status="infeasible" if stuck.any() else "optimal")
    s = np.maximum(s0, 1e-10)
    mu = 1.0
    while True:
        weights = np.where(k, 1.0, mu)
        s = _barrier_newton(q, econ.x0, weights, s, mu)
        if mu <= _MU_FINAL:
            break
        mu = max(mu * _MU_SHRINK, _MU_FINAL)
    x = econ.x0 + s @ q
    duals = np.where(k, 1.0, mu) / x
    active = np.flatnonzero(s > ACTIVE_THRESHOLD)
    profits = q @ duals
    kkt = max(
        float(np.max(profits, initial=-np.inf)),          # dual feasibility
        float(np.max(np.abs(s * profits))),               # compl. slackness
        float(max(0.0, -x.min(), -s.min())),              # primal feasibility
    )
    objective = float(np.log(x[k]).sum())
    return EquilibriumSolution(s_star=s, x_star=x, duals=duals,
                               active_set=active, objective=objective,
                               kkt_residual=kkt, status="optimal")


def certify_equilibrium(econ: EconomyInstance, sol: EquilibriumSolution,
                        tol: float = 1e-6) -> dict:
    """Named KKT/accounting checks, each entry (value, passed).

    zero_profit: operating activities earn nothing; no activity earns a
    strictly positive profit.  walras: the value of total availability
    equals the value of endowments.  excess_supply: wasted non-final
    goods are free.  capacity: at most C activities operate, and total
    scale is bounded by (number of primary goods)/eps.
    """
    q, x0, k = econ.q, econ.x0, econ.k.astype(bool)
    s, x, p = sol.s_star, sol.x_star, sol.duals
    scale = float(np.linalg.norm(p)) + 1e-300
    profits = q @ p
    active = sol.active_set
    checks = {}
    # Zero profit is asserted for activities clearly above the activity
    # threshold; barrier bias makes the profit of a marginally active
    # activity (s ~ ACTIVE_THRESHOLD) indistinguishable from zero at the
    # solver's resolution, and complementary slackness below already
    # covers every activity at every scale.
    operating = s > 10.0 * ACTIVE_THRESHOLD
    zp = float(np.max(np.abs(profits[operating]), initial=0.0)) / scale
    checks["zero_profit"] = (zp, zp <= tol)
    dual_feas = float(np.max(profits, initial=0.0)) / scale
    checks["no_positive_profit"] = (dual_feas, dual_feas <= tol)
    cs = float(np.max(np.abs(s * profits), initial=0.0)) / scale
    checks["complementary_slackness"] = (cs, cs <= tol)
    walras = abs(float(p @ x - p @ x0)) / scale
    checks["walras"] = (walras, walras <= tol)
    wasted = (~k) & (x > 1e-6)
    es = float(np.max(p[wasted], initial=0.0))
    checks["excess_supply_free"] = (es, es <= tol)
    checks["capacity"] = (sol.n_active, sol.n_active <= econ.C)
    total = float(s.sum())
    bound = float(x0.sum()) / econ.eps
    checks["scale_bound"] = (total, total <= bound + 1e-6)
    recon = float(np.max(np.abs(x - (x0 + s @ q))))
    checks["market_clearing"] = (recon, recon <= 1e-8)
    return checks


@dataclass(frozen=True)
class MonteCarloSummary:
    params: EnsembleParams
    C: int
    instances: int
    failures: int
    s_mean: float
    s_stderr: float
    phi: float
    phi_stderr: float
    x_mean: float
    x_stderr: float
    consumption: float
    consumption_stderr: float
    waste: float
    waste_stderr: float
    utility: float
    utility_stderr: float


def monte_carlo_observables(params: EnsembleParams, C: int, instances: int,
                            base_seed: int) -> MonteCarloSummary:
    """Sample means and standard errors of the per-instance observables.

    Seeds are base_seed + index, so runs are reproducible and extensible.
    Utility is averaged per final good; instances whose equilibrium is
    infeasible (utility -inf) propagate -inf into the utility mean but
    are kept in the other statistics.
    """
    if instances < 2:
        raise DomainError("need at least two instances for a standard error")
    rows, failures = [], 0
    for idx in range(instances):
        econ = sample_economy(params, C, base_seed + idx)
        try:
            sol = solve_equilibrium(econ)
        except NoConvergenceError:
            failures += 1
            continue
        k = econ.k.astype(bool)
        n_final = int(k.sum())
        if sol.status == "infeasible" or (n_final > 0 and np.any(sol.x_star[k] <= 0)):
            util = float("-inf")
        elif n_final == 0:
            util = 0.0
        else:
            util = float(np.log(sol.x_star[k]).mean())
        rows.append((
            float(sol.s_star.mean()),
            float(np.mean(sol.s_star > ACTIVE_THRESHOLD)),
            float(sol.x_star.mean()),
            float(np.mean(econ.k * sol.x_star)),
            float(np.mean((1 - econ.k) * sol.x_star)),
            util,
        ))
    if len(rows) < 2:
        raise NoConvergenceError(f"only {len(rows)} instances solved")
    data = np.array(rows)
    # -inf utilities make the mean -inf and the spread NaN; both are the
    # documented sentinel values, so the arithmetic warnings are noise
    with np.errstate(invalid="ignore"):
        mean = data.mean(axis=0)
        stderr = data.std(axis=0, ddof=1) / np.sqrt(len(rows))
    return MonteCarloSummary(
        params=params, C=C, instances=instances, failures=failures,
        s_mean=mean[0], s_stderr=stderr[0],
        phi=mean[1], phi_stderr=stderr[1],
        x_mean=mean[2], x_stderr=stderr[2],
        consumption=mean[3], consumption_stderr=stderr[3],
        waste=mean[4], waste_stderr=stderr[4],
        utility=mean[5], utility_stderr=stderr[5])


@dataclass(frozen=True)
class FeasibilityRecord:
    n: float
    pi: float
    eps: float
    N: int
    trials: int
    feasible_count: int
    failures: int

    @property
    def fraction(self) -> float:
        return self.feasible_count / self.trials


def lp_feasibility_fraction(params: EnsembleParams, C: int, trials: int,
                            base_seed: int,
                            threshold: float = 1e-6) -> FeasibilityRecord:
    """Fraction of instances whose homogeneous cone is nontrivial.

    Per trial: maximize sum_i s_i subject to (q^T s)_c >= 0 for every
    non-primary good c and 0 <= s_i <= 1.  The origin is always
    admissible, so the LP never fails for feasibility reasons; the trial
    counts as feasible when the optimum exceeds ``threshold``.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    feasible = failures = 0
    N = None
    for idx in range(trials):
        econ = sample_economy(params, C, base_seed + idx)
        N = econ.N
        non_primary = econ.x0 == 0
        a_ub = -econ.q.T[non_primary]
        res = linprog(-np.ones(econ.N), A_ub=a_ub if a_ub.size else None,
                      b_ub=np.zeros(int(non_primary.sum())) if a_ub.size else None,
                      bounds=(0.0, 1.0), method="highs-ds")
        if res.status != 0:
            failures += 1
            continue
        if -res.fun > threshold:
            feasible += 1
    return FeasibilityRecord(n=params.n, pi=params.pi, eps=params.eps, N=N,
                             trials=trials, feasible_count=feasible,
                             failures=failures)


@dataclass(frozen=True)
class GeometryRecord:
    n: float
    pi: float
    eps: float
    N: int
    C: int
    samples: int
    lambda_max: float
    collapsed: bool

    @property
    def lambda_max_over_N(self) -> float:
        return self.lambda_max / self.N


def _power_iteration(mat: np.ndarray, iters: int = 500, tol: float = 1e-10) -> float:
    rng = np.random.default_rng(0)
    v = rng.standard_normal(mat.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = mat @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 0.0
        v_new = w / nrm
        if abs(nrm - lam) < tol * max(1.0, nrm):
            return nrm
        lam, v = nrm, v_new
    return lam


def pca_probe(params: EnsembleParams, C: int, n_tech_draws: int,
              n_objective_draws: int, base_seed: int) -> GeometryRecord:
    """Elongation of the feasible polytope via sampled vertices.

    For each technology draw, maximize ``n_objective_draws`` random
    nonnegative unit objectives over the full feasible set (endowments
    included, total scale capped by primary-count/eps), take the
    coordinate correlation matrix of the resulting vertex cloud, and
    extract its top eigenvalue by power iteration; the reported
    lambda_max averages over technology draws.  Zero-variance
    coordinates enter as uncorrelated unit-diagonal rows.  A draw whose
    vertices are all at the origin is degenerate; if every draw is
    degenerate the probe reports NaN with the collapsed flag set.
    """
    if n_tech_draws < 2 or n_objective_draws < 2:
        raise DomainError("need at least two draws of each kind")
    lams = []
    N = None
    for tech in range(n_tech_draws):
        seed = base_seed + 1000 * tech
        econ = sample_economy(params, C, seed)
        N = econ.N
        rng = np.random.default_rng(seed + 500)
        vertices = []
        for _ in range(n_objective_draws):
            x0 = (rng.random(C) < params.pi).astype(float)
            obj = np.abs(rng.standard_normal(econ.N))
            obj /= np.linalg.norm(obj)
            cap = max(float(x0.sum()), 1.0) / params.eps
            res = linprog(
                -obj,
                A_ub=np.vstack([-econ.q.T, np.ones((1, econ.N))]),
                b_ub=np.concatenate([x0, [cap]]),
                bounds=(0.0, None), method="highs-ds")
            if res.status == 0:
                vertices.append(res.x)
        verts = np.array(vertices)
        if len(verts) < 2 or np.all(np.abs(verts) < 1e-12):
            continue
        std = verts.std(axis=0)
        live = std > 1e-12
        corr = np.eye(econ.N)
        if live.sum() >= 2:
            sub = np.corrcoef(verts[:, live], rowvar=False)
            corr[np.ix_(live, live)] = sub
        lams.append(_power_iteration(corr))
    if not lams:
        return GeometryRecord(n=params.n, pi=params.pi, eps=params.eps,
                              N=N, C=C, samples=0, lambda_max=float("nan"),
                              collapsed=True)
    return GeometryRecord(n=params.n, pi=params.pi, eps=params.eps, N=N, C=C,
                          samples=len(lams) * n_objective_draws,
                          lambda_max=float(np.mean(lams)), collapsed=False)
