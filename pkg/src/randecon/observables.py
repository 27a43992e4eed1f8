"""Macroscopic observables derived from a converged saddle-point solution.

Everything here is a closed-form or one-dimensional-quadrature functional
of the order parameters: the fraction of operating activities, the
distribution of production scales, the availability laws of the four good
classes (final/non-final x primary/non-primary), the aggregate
consumption/waste split, and the utility per final good.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleParams
from .errors import DomainError
from .gaussian import (QuadratureRule, erfc_half, gauss_moment_I,
                       gaussian_average, std_normal_pdf, truncated_scale_moments)
from .replica import (DEFAULT_RULE, OrderParams, RescaledParams, SaddleSolution,
                      psi_exploited, x_star)

_SQRT2 = np.sqrt(2.0)


def active_fraction(op: OrderParams, eps: float) -> float:
    """Fraction of activities running at positive scale,
    phi = P(sigma t > p eps) for a standard Gaussian t."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    return float(erfc_half(eps * op.p / (_SQRT2 * op.sigma)))


def scale_density(s, op: OrderParams, eps: float):
    """Density of positive production scales (the atom 1 - phi at zero is
    not included; query it via active_fraction)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("scales are nonnegative")
    # s* = (sigma t - p eps)/chi_hat on t > p eps / sigma: a truncated
    # Gaussian in disguise
    return (op.chi_hat / op.sigma) * std_normal_pdf(
        (op.chi_hat * s + eps * op.p) / op.sigma)


def mean_scale(op: OrderParams, eps: float) -> float:
    _, m1, _, _ = truncated_scale_moments(op.p, op.sigma, op.chi_hat, eps)
    return float(m1)


def goods_density(x, x0: int, k: int, op: OrderParams, params: EnsembleParams):
    """Availability law of a good of class (x0, k).

    Final goods (k = 1): a smooth density obtained from the Gaussian law
    of a = x0 - kappa - sqrt(n Omega) t through the change of variables
    x*(a), whose Jacobian is 1 - chi u''(x*) for log utility.  Non-final
    goods (k = 0): an atom of mass psi at zero ("fully exploited") plus
    the truncated Gaussian of positive availabilities.
    """
    x = np.asarray(x, dtype=float)
    w = np.sqrt(params.n * op.Omega)
    if k == 1:
        # invert x* = (a + sqrt(a^2 + 4 chi))/2  =>  a = x - chi/x
        if np.any(x <= 0):
            raise DomainError("final-good availability is strictly positive")
        a = x - op.chi / x
        jac = 1.0 + op.chi / x**2          # da/dx = 1 - chi u''(x), u = log
        t = (x0 - op.kappa - a) / w
        return std_normal_pdf(t) * jac / w
    if np.any(x < 0):
        raise DomainError("availability is nonnegative")
    return std_normal_pdf((x - x0 + op.kappa) / w) / w


def goods_atom(x0: int, k: int, op: OrderParams, params: EnsembleParams) -> float:
    """Mass at zero of the availability law: psi for non-final goods, 0
    for final goods (the log-utility marginal is a barrier at zero)."""
    if k == 1:
        return 0.0
    return float(psi_exploited(x0, op.kappa, params.n * op.Omega))


@dataclass(frozen=True)
class ObservableSet:
    phi: float            # fraction of operating activities
    s_mean: float         # mean production scale
    x_mean: float         # mean availability over all goods
    x11: float            # conditional consumption, final & primary
    x01: float            # final & non-primary
    x10: float            # wasted availability, non-final & primary
    x00: float            # non-final & non-primary
    consumption: float    # X_C = f [pi x11 + (1-pi) x01]
    waste: float          # X_W = (1-f) [pi x10 + (1-pi) x00]
    utility: float        # <u(x*)> over final goods; -inf when they hit zero


def conditional_consumption(op, params: EnsembleParams,
                            rule: QuadratureRule = DEFAULT_RULE):
    """(x11, x01, x10, x00): mean availability by good class.

    Final-good entries are quadratures of x*(t) over the Gaussian field;
    non-final entries have the closed form <max(a, 0)> = w I_1(b) with
    w = sqrt(n Omega), b = (x0 - kappa)/w.  In the collapsed state
    nothing operates, so availability is just the endowment: (1, 0, 1, 0).
    """
    if isinstance(op, RescaledParams):
        return 1.0, 0.0, 1.0, 0.0
    w = np.sqrt(params.n * op.Omega)
    out = []
    for x0 in (1, 0):
        out.append(gaussian_average(
            lambda t: x_star(t, x0, 1, op, params.n, params.utility), rule))
    for x0 in (1, 0):
        out.append(w * gauss_moment_I(1, (x0 - op.kappa) / w))
    return tuple(float(v) for v in out)


def jump_decomposition(op, params: EnsembleParams,
                       rule: QuadratureRule = DEFAULT_RULE):
    """(X_C, X_W): aggregate consumption and waste per good."""
    x11, x01, x10, x00 = conditional_consumption(op, params, rule)
    xc = params.f * (params.pi * x11 + (1.0 - params.pi) * x01)
    xw = (1.0 - params.f) * (params.pi * x10 + (1.0 - params.pi) * x00)
    return float(xc), float(xw)


def utility_per_final_good(op, params: EnsembleParams,
                           rule: QuadratureRule = DEFAULT_RULE) -> float:
    """<u(x*)> over final goods (log utility).

    Collapsed state: final goods sit at their endowments, so the average
    is pi*log(1) + (1-pi)*log(0) = -inf unless every good is primary.
    """
    if isinstance(op, RescaledParams):
        return 0.0 if params.pi == 1.0 else float("-inf")
    vals = []
    for x0 in (1, 0):
        vals.append(gaussian_average(
            lambda t: np.log(x_star(t, x0, 1, op, params.n, params.utility)),
            rule))
    return float(params.pi * vals[0] + (1.0 - params.pi) * vals[1])


def observable_set(sol: SaddleSolution,
                   rule: QuadratureRule = DEFAULT_RULE) -> ObservableSet:
    params = sol.params
    op = sol.op
    x11, x01, x10, x00 = conditional_consumption(op, params, rule)
    xc = params.f * (params.pi * x11 + (1.0 - params.pi) * x01)
    xw = (1.0 - params.f) * (params.pi * x10 + (1.0 - params.pi) * x00)
    if sol.branch == "collapsed":
        phi, s1 = 0.0, 0.0
        x_mean = params.pi
        util = 0.0 if params.pi == 1.0 else float("-inf")
    else:
        phi = active_fraction(op, params.eps)
        s1 = mean_scale(op, params.eps)
        x_mean = params.pi - params.n * params.eps * s1
        util = utility_per_final_good(op, params, rule)
    return ObservableSet(phi=phi, s_mean=s1, x_mean=x_mean,
                         x11=x11, x01=x01, x10=x10, x00=x00,
                         consumption=xc, waste=xw, utility=util)


CSV_HEADER = ("n", "pi", "f", "eps", "branch", "phi", "s_mean", "x_mean",
              "x11", "x01", "x10", "x00", "consumption", "waste", "utility")


def observable_csv_row(sol: SaddleSolution, obs: ObservableSet):
    p = sol.params
    return (p.n, p.pi, p.f, p.eps, sol.branch, obs.phi, obs.s_mean,
            obs.x_mean, obs.x11, obs.x01, obs.x10, obs.x00,
            obs.consumption, obs.waste, obs.utility)
