"""Stretch an admissible function and keep its integral fixed.

The boundary slopes and the area stay put while the domain grows from
b to b + s; the multiplier mu(b + s) decays roughly like 1/s.
"""
import numpy as np

from curvespace.stretch import (
    StretchProblem, integral_sampled, integral_zeta, solve_mu, stretch_function, with_area,
)

p = StretchProblem(kappa0=0.8, b=2.0, r0=0.3, rb=-0.2, A=0.6)
x = np.linspace(0.0, p.b, 9)
# a piecewise linear slope profile with |d sin(theta)/dx| below kappa0
u = np.interp(x, [0.0, 1.0, 2.0], [p.u0, 0.55, p.ub])
f = u / np.sqrt(1 - u * u)
# the area is whatever the seed profile encloses
p = with_area(p, integral_sampled(x, f))
print(f"A = {p.A:.6f}")

base = p.A - integral_zeta(p, 0.0, p.b)
print(f"A minus the zero-multiplier integral: {base:.6f}")
mu = None
for s in (0.0, 1.0, 10.0, 100.0):
    mu = solve_mu(p, p.b + s, mu_prev=mu)
    area = stretch_function(p, x, f, s).curve.integral()
    print(f"s = {s:6.1f}  mu = {mu: .6e}  s*mu = {s * mu: .6f}  area = {area:.12f}")
