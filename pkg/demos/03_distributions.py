"""Beyond averages: the full laws of scales and availabilities.

The saddle point does not just give mean values; it determines the whole
distribution of production scales across activities and of availability
across goods.  Scales mix an atom at zero (idle producers) with a
continuous positive part.  Goods split into four classes by (endowed?,
final?): non-final goods develop an atom at zero availability -- the
fraction that production manages to use up completely -- while final goods
keep a smooth density because consumers bid their marginal utility away
from zero.
"""

import numpy as np
from scipy.integrate import quad

from randecon import (EnsembleParams, active_fraction, goods_density,
                      observable_set, scale_density, solve_saddle)
from randecon.observables import goods_atom

PARAMS = EnsembleParams(n=1.2, pi=0.65, f=0.5, eps=0.1)

print(__doc__)
sol = solve_saddle(PARAMS)
op = sol.op
obs = observable_set(sol)

phi = active_fraction(op, PARAMS.eps)
print(f"at {PARAMS}:")
print(f"  active fraction phi = {phi:.4f} "
      f"(atom at s = 0 carries {1 - phi:.4f})")

mass, _ = quad(lambda s: scale_density(s, op, PARAMS.eps), 0, 60, limit=200)
mean, _ = quad(lambda s: s * scale_density(s, op, PARAMS.eps), 0, 60,
               limit=200)
print(f"  continuous part of the scale law integrates to {mass:.6f}"
      f" (= phi)")
print(f"  its mean is {mean:.6f} (= <s*> = {obs.s_mean:.6f})\n")

print("availability laws by good class (x0 = endowed, k = final):")
print(f"{'class':>12} {'atom at 0':>10} {'conditional mean':>17}")
labels = {(1, 1): "x11 (cons.)", (0, 1): "x01 (cons.)",
          (1, 0): "x10 (waste)", (0, 0): "x00 (waste)"}
cond = {(1, 1): obs.x11, (0, 1): obs.x01, (1, 0): obs.x10, (0, 0): obs.x00}
for x0 in (1, 0):
    for k in (1, 0):
        atom = goods_atom(x0, k, op, PARAMS)
        m, _ = quad(lambda x: x * goods_density(x, x0, k, op, PARAMS),
                    0, 40, limit=200)
        print(f"{labels[x0, k]:>12} {atom:10.4f} {m:17.6f}"
              f"   (identity: {cond[x0, k]:.6f})")

print()
print("the zero-availability atoms of the non-final classes measure how")
print("completely production exploits goods nobody wants to consume;")
print("final goods carry no atom because demand keeps their price finite.")
