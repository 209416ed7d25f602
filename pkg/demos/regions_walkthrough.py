"""Walk along the bisector ray and watch the homotopy class change.

For theta1 = 0 the ray is the positive real axis; the classes alternate
between even and odd spheres with the breakpoints 4*sqrt(k^2+k), 4(k+1),
4*sqrt(k^2+3k+2).  For theta1 != 0 thin E gaps open between the spheres.
"""
import math

from curvespace.classify import ray_profile, census, region_svg


def show(theta1, t_max=30.0):
    print(f"theta1 = {theta1:.4f}")
    for lo, hi, c in ray_profile(theta1, t_max):
        if hi > lo:
            name = "E" if c.kind == "E" else f"S^{c.n}"
            print(f"  ({lo:8.4f}, {hi:8.4f}]  {name}")


if __name__ == "__main__":
    show(0.0)
    show(math.pi / 3)
    counts = census(((1, 0), (0, 1)), 0.0, 20.0)
    print("unit lattice census, radius 20:")
    for cls, k in sorted(counts.items(), key=lambda kv: (kv[0].kind, kv[0].n or 0)):
        print(f"  {cls.to_dict()}: {k}")
    with open("regions_theta_pi_3.svg", "w") as fh:
        fh.write(region_svg(math.pi / 3, k_max=3, samples=160))
    print("wrote regions_theta_pi_3.svg")
