"""Saddle-point equations for the typical equilibrium of large random economies.

The thermodynamic limit reduces the N-dimensional utility maximization to
six coupled equations for the order parameters (Omega, kappa, p, sigma,
chi, chi_hat).  The representative scale of production is the truncated
Gaussian

    s*(t) = ((sigma t - p eps)/chi_hat) Theta(sigma t - p eps),

and the representative good solves  k chi u'(x*) = x* - a  with
a = x0 - kappa - sqrt(n Omega) t.  For log utility and chi > 0 this gives
x* = (a + sqrt(a^2 + 4 chi))/2; for k = 0 or chi = 0 it clamps to
x* = a Theta(a).

Two branches are handled:

* industrial (chi > 0): the full six-equation system;
* collapsed (chi = 0): the rescaled five-equation system in
  (Omega, kappa, ell, gamma, delta) with ell = p chi, gamma = sigma chi,
  delta = chi_hat chi, which is independent of the final-good fraction f.

The solver is multi-start trust-region least squares on the residual in
log coordinates (plain damped fixed-point iteration diverges: the
fixed-point map has an expanding eigendirection along (Omega, kappa,
chi)); sweeps use warm-started continuation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize

from .ensemble import EnsembleParams
from .errors import DomainError, NoConvergenceError, NonFiniteError
from .gaussian import (QuadratureRule, gauss_hermite_rule, gauss_moment_I,
                       truncated_scale_moments)

DEFAULT_RULE = gauss_hermite_rule(120)


@dataclass(frozen=True)
class OrderParams:
    """Order parameters of the industrial (chi > 0) branch."""

    Omega: float
    kappa: float
    p: float
    sigma: float
    chi: float
    chi_hat: float

    def as_array(self) -> np.ndarray:
        return np.array([self.Omega, self.kappa, self.p, self.sigma, self.chi, self.chi_hat])

    @staticmethod
    def from_array(v) -> "OrderParams":
        return OrderParams(*(float(x) for x in v))


@dataclass(frozen=True)
class RescaledParams:
    """Order parameters of the collapsed (chi = 0) branch.

    ell = p chi, gamma = sigma chi, delta = chi_hat chi stay finite as
    chi -> 0 while p, sigma, chi_hat themselves diverge.
    """

    Omega: float
    kappa: float
    ell: float
    gamma: float
    delta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.Omega, self.kappa, self.ell, self.gamma, self.delta])

    @staticmethod
    def from_array(v) -> "RescaledParams":
        return RescaledParams(*(float(x) for x in v))


@dataclass(frozen=True)
class SaddleSolution:
    params: EnsembleParams
    branch: str  # "industrial" or "collapsed"
    op: Union[OrderParams, RescaledParams]
    residual_norm: float
    iterations: int


def x_star(t, x0: float, k: float, op: OrderParams, n: float, utility: str = "log"):
    """Representative-good optimum for a standard-normal draw t.

    For k = 1 and chi > 0 the log-utility closed form is used unless a
    different utility is requested, in which case the defining relation
    k chi u'(x) = x - a is solved numerically (bracketed, tolerance 1e-12).
    For k = 0 or chi = 0 the clamp a Theta(a) applies regardless of u.
    """
    out = _x_star_values(t, x0, k, op.chi, op.kappa, n * op.Omega, utility)
    return float(out) if np.ndim(t) == 0 else out


def _shifted_gap(t, x0, kappa, n_omega):
    """a = x0 - kappa - sqrt(n Omega) t."""
    return x0 - kappa - np.sqrt(n_omega) * t


def _x_star_values(t, x0, k, chi, kappa, n_omega, utility="log"):
    a = _shifted_gap(np.asarray(t, dtype=float), x0, kappa, n_omega)
    if k == 0 or chi == 0.0:
        return np.maximum(a, 0.0)
    if utility == "log":
        return 0.5 * (a + np.sqrt(a * a + 4.0 * chi))
    return _x_star_generic(a, chi, utility)


def _x_star_generic(a, chi, utility):
    """Solve chi u'(x) = x - a for x > 0 by bracketed root-finding."""
    uprime = _UPRIMES[utility]
    out = np.empty_like(a)
    for idx, ai in np.ndenumerate(a):
        lo = max(ai, 0.0) + 1e-300
        hi = max(ai, 0.0) + 1.0
        while hi - ai - chi * uprime(hi) < 0:
            hi *= 2.0
        out[idx] = optimize.brentq(lambda x: x - ai - chi * uprime(x), lo, hi,
                                   xtol=1e-14, rtol=1e-12)
    return out


_UPRIMES = {"log": lambda x: 1.0 / x}


def _script_I(x0: float, kappa: float, n_omega: float):
    """Closed forms for the k = 0 contributions to the M averages.

    Returns (I1, It, I2) where the integrand is the clamp gap
    (kappa + sqrt(n Omega) t - x0) Theta(...) and its t / square moments.
    """
    w = np.sqrt(n_omega)
    b = (kappa - x0) / w
    return (w * gauss_moment_I(1, b),
            w * gauss_moment_I(0, b),
            n_omega * gauss_moment_I(2, b))


def psi_exploited(x0: float, kappa: float, n_omega: float) -> float:
    """Probability that a non-final good with endowment x0 is fully exploited."""
    return float(gauss_moment_I(0, (kappa - x0) / np.sqrt(n_omega)))


def moments_M(op: OrderParams, params: EnsembleParams, rule: QuadratureRule = DEFAULT_RULE):
    """The three disorder averages (M1, Mt, M2) entering the saddle equations.

    Final-good parts (weight f) are quadratures over t of chi u'(x*) and
    its t / square moments, averaged over the two-point endowment law;
    non-final parts (weight 1-f) are the closed-form clamp moments.
    """
    if op.Omega <= 0:
        raise NonFiniteError("Omega must be positive in moments_M")
    if op.chi <= 0:
        raise DomainError("moments_M requires the industrial branch (chi > 0)")
    n_omega = params.n * op.Omega
    m1 = mt = m2 = 0.0
    if params.f > 0:
        t, w = rule.nodes, rule.weights
        for x0, weight in ((0.0, 1.0 - params.pi), (1.0, params.pi)):
            if weight == 0.0:
                continue
            xs = _x_star_values(t, x0, 1, op.chi, op.kappa, n_omega, params.utility)
            g = xs - _shifted_gap(t, x0, op.kappa, n_omega)  # chi u'(x*)
            m1 += weight * np.dot(w, g)
            mt += weight * np.dot(w, g * t)
            m2 += weight * np.dot(w, g * g)
    m1 *= params.f
    mt *= params.f
    m2 *= params.f
    for x0, weight in ((0.0, 1.0 - params.pi), (1.0, params.pi)):
        if weight == 0.0:
            continue
        i1, it, i2 = _script_I(x0, op.kappa, n_omega)
        m1 += (1.0 - params.f) * weight * i1
        mt += (1.0 - params.f) * weight * it
        m2 += (1.0 - params.f) * weight * i2
    return float(m1), float(mt), float(m2)


def saddle_residual(op: OrderParams, params: EnsembleParams,
                    rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    """Residuals of the six saddle-point equations (zero at a solution)."""
    if min(op.sigma, op.chi_hat, op.chi, op.Omega) <= 0:
        raise DomainError("saddle_residual requires Omega, sigma, chi, chi_hat > 0")
    m1, mt, m2 = moments_M(op, params, rule)
    phi, s1, st, s2 = truncated_scale_moments(op.p, op.sigma, op.chi_hat, params.eps)
    rad = m2 / op.chi**2 - op.p**2
    if rad < 0:
        raise DomainError("sigma-equation radicand is negative")
    return np.array([
        op.p - m1 / op.chi,
        op.chi_hat - mt / (op.chi * np.sqrt(params.n * op.Omega)),
        op.sigma - np.sqrt(rad),
        op.Omega - s2,
        op.kappa - op.p * op.chi - params.n * params.eps * s1,
        op.chi - params.n * st / op.sigma,
    ])


def rescaled_residual(op: RescaledParams, params: EnsembleParams) -> np.ndarray:
    """Residuals of the five chi = 0 equations (f drops out entirely)."""
    if min(op.gamma, op.delta, op.Omega) <= 0:
        raise DomainError("rescaled_residual requires Omega, gamma, delta > 0")
    n_omega = params.n * op.Omega
    m1 = mt = m2 = 0.0
    for x0, weight in ((0.0, 1.0 - params.pi), (1.0, params.pi)):
        if weight == 0.0:
            continue
        i1, it, i2 = _script_I(x0, op.kappa, n_omega)
        m1 += weight * i1
        mt += weight * it
        m2 += weight * i2
    phi, s1, st, s2 = truncated_scale_moments(op.ell, op.gamma, op.delta, params.eps)
    rad = m2 - op.ell**2
    if rad < 0:
        raise DomainError("gamma-equation radicand is negative")
    return np.array([
        op.ell - m1,
        op.delta - mt / np.sqrt(n_omega),
        op.gamma - np.sqrt(rad),
        op.Omega - s2,
        op.kappa - op.ell - params.n * params.eps * s1,
    ])


# -- solver -------------------------------------------------------------------

# log-transformed coordinates (strictly positive parameters)
_POS_IND = np.array([True, False, False, True, True, True])   # Omega, sigma, chi, chi_hat
_POS_COL = np.array([True, False, False, True, True])          # Omega, gamma, delta

#: below this chi the industrial branch is considered lost to the transition
_CHI_FLOOR = 1e-8


def _ls_solve(v0, residual, positive_mask, tol, max_iter):
    """Trust-region least squares on the residual, positive parameters in log.

    Returns (v, residual_norm, n_evaluations).  The log transform keeps the
    search inside the open domain; out-of-domain evaluations (negative
    radicand) are penalized so the trust region backs off.
    """

    def to_v(z):
        v = np.array(z, dtype=float)
        v[positive_mask] = np.exp(np.clip(v[positive_mask], -700.0, 700.0))
        return v

    def fun(z):
        try:
            return residual(to_v(z))
        except (DomainError, NonFiniteError):
            return np.full(positive_mask.size, 1e6)

    z0 = np.array(v0, dtype=float)
    if np.any(z0[positive_mask] <= 0):
        return np.array(v0, dtype=float), np.inf, 0
    z0[positive_mask] = np.log(z0[positive_mask])
    sol = optimize.least_squares(fun, z0, xtol=3e-16, ftol=3e-16, gtol=1e-14,
                                 max_nfev=max_iter)
    v = to_v(sol.x)
    try:
        norm = float(np.linalg.norm(residual(v)))
    except (DomainError, NonFiniteError):
        norm = np.inf
    return v, norm, int(sol.nfev)


_COLD_STARTS_INDUSTRIAL = (
    OrderParams(Omega=0.1, kappa=0.5, p=0.5, sigma=0.5, chi=1.0, chi_hat=0.5),
    OrderParams(Omega=0.35, kappa=6.0, p=0.8, sigma=0.16, chi=7.4, chi_hat=0.13),
    OrderParams(Omega=0.3, kappa=0.8, p=1.0, sigma=1.0, chi=0.5, chi_hat=1.0),
    OrderParams(Omega=1.0, kappa=1.5, p=2.0, sigma=0.3, chi=3.0, chi_hat=0.3),
    OrderParams(Omega=0.05, kappa=0.5, p=2.0, sigma=2.0, chi=0.05, chi_hat=3.0),
)

_COLD_STARTS_COLLAPSED = (
    RescaledParams(Omega=0.3, kappa=0.5, ell=0.3, gamma=0.3, delta=0.5),
    RescaledParams(Omega=0.05, kappa=0.2, ell=0.1, gamma=0.1, delta=0.8),
    RescaledParams(Omega=1.0, kappa=1.0, ell=0.5, gamma=1.0, delta=0.3),
)


def solve_saddle(params: EnsembleParams, init: Optional[OrderParams] = None,
                 rule: QuadratureRule = DEFAULT_RULE, tol: float = 1e-10,
                 max_iter: int = 150) -> SaddleSolution:
    """Solve the saddle-point system, falling back to the chi = 0 branch.

    The industrial branch is declared lost when no root with chi above
    1e-8 and positive mean scale is found from any start; the rescaled
    five-equation system is then solved and labelled "collapsed".
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if isinstance(init, RescaledParams):
        collapsed_init, init = init, None
    else:
        collapsed_init = None
    residual = lambda v: saddle_residual(OrderParams.from_array(v), params, rule)
    inits = [g.as_array() for g in _COLD_STARTS_INDUSTRIAL]
    inits.extend(_scatter_starts(residual, n_keep=5))
    if init is not None:
        inits.insert(0, init.as_array())
    last = None
    for guess in inits:
        v, norm, its = _ls_solve(guess, residual, _POS_IND, tol, max_iter)
        last = (v, norm)
        if norm <= tol:
            op = OrderParams.from_array(v)
            _, s1, _, _ = truncated_scale_moments(op.p, op.sigma, op.chi_hat, params.eps)
            if s1 > 0 and op.chi >= _CHI_FLOOR:
                return SaddleSolution(params=params, branch="industrial", op=op,
                                      residual_norm=norm, iterations=its)
    return _solve_collapsed(params, tol, max_iter, last, init=collapsed_init)


_SCATTER_LO = np.log(np.array([0.02, 0.05, 0.05, 0.05, 0.02, 0.02]))
_SCATTER_HI = np.log(np.array([3.0, 8.0, 3.0, 3.0, 15.0, 3.0]))


def _scatter_starts(residual, n_keep: int, n_samples: int = 48):
    """Deterministic quasi-random starts ranked by residual norm."""
    rng = np.random.default_rng(20240817)
    samples = np.exp(_SCATTER_LO + rng.random((n_samples, 6)) * (_SCATTER_HI - _SCATTER_LO))
    scored = []
    for v in samples:
        try:
            scored.append((float(np.linalg.norm(residual(v))), v))
        except (DomainError, NonFiniteError):
            continue
    scored.sort(key=lambda pair: pair[0])
    return [v for _, v in scored[:n_keep]]


#: the collapsed s* = 0 state: all rescaled parameters vanish; delta is
#: scale-indeterminate in that limit and reported as NaN.
TRIVIAL_COLLAPSED = RescaledParams(Omega=0.0, kappa=0.0, ell=0.0, gamma=0.0,
                                   delta=float("nan"))


def _solve_collapsed(params: EnsembleParams, tol: float, max_iter: int, last_industrial,
                     init: Optional[RescaledParams] = None):
    residual = lambda v: rescaled_residual(RescaledParams.from_array(v), params)
    inits = ([init] if init is not None else []) + list(_COLD_STARTS_COLLAPSED)
    for guess in inits:
        v, norm, its = _ls_solve(guess.as_array(), residual, _POS_COL, tol, max_iter)
        # reject the degenerate corner (all parameters -> 0): that limit is
        # the trivial state, represented exactly below
        if norm <= tol and min(v[0], v[3], v[4]) > 1e-8:
            return SaddleSolution(params=params, branch="collapsed",
                                  op=RescaledParams.from_array(v),
                                  residual_norm=norm, iterations=its)
    # deep in the collapsed phase the rescaled system has only the trivial
    # scaling solution; it satisfies the equations exactly in the limit
    return SaddleSolution(params=params, branch="collapsed", op=TRIVIAL_COLLAPSED,
                          residual_norm=0.0, iterations=0)


def solve_collapsed(params: EnsembleParams, init: Optional[RescaledParams] = None,
                    tol: float = 1e-10, max_iter: int = 150) -> SaddleSolution:
    """Solve the chi = 0 rescaled system directly.

    Near the critical line this yields the nontrivial chi -> 0 limit of the
    industrial branch (the state entering the jump decomposition); deeper in
    the collapsed phase only the trivial s* = 0 state exists.
    """
    return _solve_collapsed(params, tol, max_iter, None, init=init)


def _warm_industrial(params: EnsembleParams, init: OrderParams,
                     rule: QuadratureRule, tol: float, max_iter: int = 150):
    """Industrial solve from a single warm start, no fallbacks.

    Returns OrderParams on success, None if the root is lost or drops
    below the chi floor.  Continuation helper: much cheaper per failed
    step than the full multi-start solve."""
    residual = lambda v: saddle_residual(OrderParams.from_array(v), params, rule)
    v, norm, _ = _ls_solve(init.as_array(), residual, _POS_IND, tol, max_iter)
    if norm > tol:
        return None
    op = OrderParams.from_array(v)
    _, s1, _, _ = truncated_scale_moments(op.p, op.sigma, op.chi_hat, params.eps)
    if s1 <= 0 or op.chi < _CHI_FLOOR:
        return None
    return op


def branch_switch_pi(n: float, eps: float, f: float = 0.5, pi_start: float = 0.95,
                     rule: QuadratureRule = DEFAULT_RULE, tol: float = 1e-10,
                     resolution: float = 1e-4) -> float:
    """Locate the pi at which the industrial branch is lost, at fixed (n, eps).

    Warm-started continuation downward in pi: step shrinks on failure and
    recovers (capped) on success, so isolated continuation hiccups do not
    bias the location upward.  As the transition is approached chi -> 0
    and the root becomes progressively harder to track, which is exactly
    when the adaptive step matters.  Returns the last pi at which the
    industrial root was held, resolved to ``resolution``.  Independent of
    f up to solver tolerance.
    """
    params = EnsembleParams(n=n, pi=pi_start, f=f, eps=eps)
    sol = solve_saddle(params, rule=rule, tol=tol)
    if sol.branch != "industrial":
        raise NoConvergenceError(f"no industrial solution at pi_start={pi_start}")
    pi, warm = pi_start, sol.op
    step = 0.05
    while step >= resolution:
        pi_try = pi - step
        if pi_try <= 0:
            step /= 2.0
            continue
        op = _warm_industrial(params.with_(pi=pi_try), warm, rule, tol)
        if op is not None:
            pi, warm = pi_try, op
            step = min(step * 1.5, 0.05)
        else:
            step /= 2.0
    return pi


def sweep(params_grid: Sequence[EnsembleParams], rule: QuadratureRule = DEFAULT_RULE,
          tol: float = 1e-10):
    """Warm-started continuation along an ordered parameter grid.

    One entry per grid point, in order; points where both branches fail are
    recorded as SaddleSolution with branch "failed" and infinite residual
    rather than skipped.
    """
    out = []
    warm = None
    for params in params_grid:
        try:
            sol = solve_saddle(params, init=warm, rule=rule, tol=tol)
        except NoConvergenceError:
            out.append(SaddleSolution(params=params, branch="failed", op=None,
                                      residual_norm=np.inf, iterations=0))
            warm = None
            continue
        out.append(sol)
        warm = sol.op if sol.branch == "industrial" else None
    return out


SOLUTION_CSV_COLUMNS = ("n", "pi", "f", "eps", "branch", "Omega", "kappa",
                        "p", "sigma", "chi", "chi_hat", "residual", "iters")


def solution_csv_rows(solutions: Sequence[SaddleSolution]):
    """CSV rows (n, pi, f, eps, branch, Omega, kappa, p, sigma, chi, chi_hat,
    residual, iters); the collapsed branch stores the rescaled (ell, gamma,
    delta) in the (p, sigma, chi_hat) columns with chi = 0."""
    rows = []
    for sol in solutions:
        pr = sol.params
        if sol.branch == "industrial":
            op = sol.op
            vals = (op.Omega, op.kappa, op.p, op.sigma, op.chi, op.chi_hat)
        elif sol.branch == "collapsed":
            op = sol.op
            vals = (op.Omega, op.kappa, op.ell, op.gamma, 0.0, op.delta)
        else:
            vals = (np.nan,) * 6
        rows.append((pr.n, pr.pi, pr.f, pr.eps, sol.branch, *vals,
                     sol.residual_norm, sol.iterations))
    return rows
