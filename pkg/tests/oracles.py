"""Independent reference computations used by the tests.

None of these call into the code under test beyond evaluating it at points.
"""
import itertools
import math

import numpy as np
from scipy import integrate


def rk4(f, y0, t0, t1, steps=4000):
    """Classical fourth-order Runge-Kutta for a scalar ODE y' = f(t, y)."""
    h = (t1 - t0) / steps
    t, y = t0, y0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h * k1 / 2)
        k3 = f(t + h / 2, y + h * k2 / 2)
        k4 = f(t + h, y + h * k3)
        y += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        t += h
    return y


def envelope_rk4(kappa0, r0, rb, b, branch, x, steps=4000):
    """g+-(x) integrated forward from 0, h+-(x) integrated backward from b."""
    sign = 1.0 if branch in ("g+", "h-") else -1.0
    # h+ decreases and h- increases in x; integrating backwards flips the sign
    if branch.startswith("g"):
        return rk4(lambda t, y: sign * kappa0 * (1 + y * y) ** 1.5, r0, 0.0, x, steps)
    return rk4(lambda t, y: sign * kappa0 * (1 + y * y) ** 1.5, rb, b, x, steps)


def brute_substring(a, b):
    """Order-preserving embedding by exhaustive search over index subsets."""
    a, b = list(a), list(b)
    if len(a) > len(b):
        return False
    return any([b[i] for i in idx] == a for idx in itertools.combinations(range(len(b)), len(a)))


def quad_integral(fun, a, b, points=()):
    pts = sorted(p for p in points if a < p < b)
    edges = [a] + pts + [b]
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        if hi > lo:
            val, _ = integrate.quad(fun, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200)
            total += val
    return total


def endpoint_by_quadrature(path):
    """Integrate (cos theta, sin theta) over arc length, piece by piece."""
    s, th = path.node_arcs, path.node_thetas
    x, y = path.start
    for i in range(len(s) - 1):
        a, b = s[i], s[i + 1]
        t0, t1 = th[i], th[i + 1]
        slope = (t1 - t0) / (b - a)
        x += integrate.quad(lambda t: math.cos(t0 + slope * (t - a)), a, b, epsabs=1e-14)[0]
        y += integrate.quad(lambda t: math.sin(t0 + slope * (t - a)), a, b, epsabs=1e-14)[0]
    return np.array([x, y])
