"""Build a pulley curve, detect its quasicritical structure, and read h back.

A pulley of type sigma with offsets x is certified quasicritical at every
grid width eps with |x_k| < eps, h recovers x, and the opposite string
is never detected.
"""
import numpy as np

from curvespace.curves import EPS_GRID, classify_curve, h_map, quasicritical_find
from curvespace.maps import pulley_build
from curvespace.strings import SignString

sigma = SignString("-+-+")
x = np.array([0.05, -0.02, 0.03, -0.04])
p = pulley_build(0.2, sigma, x, (10.0, 11.0, 12.0, 10.0), theta0=0.2)
print("class:", classify_curve(p.path).kind, " length:", p.path.length)
for eps in EPS_GRID[:4]:
    cert = quasicritical_find(p.path, 0.2, eps, sigma)
    if cert is None:
        print(f"eps = {eps:.4f}: not quasicritical")
        continue
    h = h_map(p.path, 0.2, sigma, eps)
    print(f"eps = {eps:.4f}: J = {[tuple(round(v, 3) for v in j) for j in cert.J]}")
    print(f"             h = {np.round(h, 12)}")
print("opposite string found anywhere:",
      any(quasicritical_find(p.path, 0.2, e, -sigma) is not None for e in EPS_GRID))
