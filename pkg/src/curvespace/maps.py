"""Pulley curves, the generator family f and the sphere map g.

A pulley is the word ``c l c l ... l c``: arcs of radius ``1/kappa0`` joining
straight pieces whose arguments are ``phi + sigma(k) pi/2 + x_k``.

The generator family lives on the boundary of the cube
``C = [-pi/2, pi/2]^n``.  On the equator ``S`` (points with some coordinate
``+pi/2`` and some ``-pi/2``) and on a tube ``S x [-delta, delta]`` around it
the curve is a chain of ``n + 1`` circle arcs whose junction arguments are
``phi + (1 + s) x_k``; the two caps are filled by explicit contractions
inside the condensed and diffuse curves.  Every curve is brought to the
prescribed endpoint by grafting straight pieces with nonnegative lengths.

``g`` measures how far a curve is from being critical of type ``tau``:
``alpha_k`` are the extreme arguments on the quasicritical intervals,
``A = alpha - mean(alpha)`` lives in the zero-sum hyperplane, and a radial
collapse sends ``A = 0`` to the north pole ``N`` and ``|v| >= 1`` to ``-N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import nnls

from .classify import homotopy_class, sphere
from .curves import (
    EPS_GRID,
    PCCPath,
    Segment,
    UTPoint,
    curve_stats,
    graft,
    quasicritical_find,
)
from .strings import SignString

__all__ = [
    "Pulley",
    "SphereTarget",
    "GeneratorConfig",
    "GraftInfeasible",
    "pulley_build",
    "pulley_sets",
    "pulley_fit",
    "arc_chain",
    "graft_to",
    "equator_point",
    "default_tau",
    "generator_sample",
    "reference_phis",
    "cube_curve",
    "alpha_vector",
    "sphere_map_g",
    "square_loop",
    "degree_check",
    "cube_face_grid",
    "preimage_count",
]

HALF_PI = 0.5 * math.pi


class GraftInfeasible(ValueError):
    """The endpoint cannot be reached with nonnegative grafts."""


# ---------------------------------------------------------------------------
# pulleys

@dataclass(frozen=True)
class Pulley:
    phi: float
    sigma: SignString
    x: tuple
    lengths: tuple
    kappa0: float
    theta1: float
    path: PCCPath
    spans: tuple          # arc-length interval of each straight piece
    grafted: float = 0.0
    membership: dict | None = None

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def args(self) -> np.ndarray:
        return np.array([self.phi + s * HALF_PI + xk for s, xk in zip(self.sigma.signs, self.x)])


def pulley_build(phi: float, sigma, x, lengths, kappa0: float = 0.9, theta1: float = 0.0,
                 *, start=(0.0, 0.0), theta0: float = 0.0, max_amplitude: float = math.pi,
                 min_length: float = 8.0, chain=None) -> Pulley:
    """The pulley with straight arguments ``phi + sigma(k) pi/2 + x_k``.

    Arcs have radius exactly ``1/kappa0``; the last arc ends at angle
    ``theta0 + theta1``.  Raises ValueError when a straight piece is not
    longer than ``min_length`` or an arc needs amplitude ``>= max_amplitude``.
    With ``chain = (strings, deltas)`` the H_c/H_d membership of ``x`` is
    stored on the result (see `pulley_sets`).
    """
    sigma = SignString(sigma)
    x = tuple(float(v) for v in x)
    lengths = tuple(float(v) for v in lengths)
    n = len(sigma)
    if len(x) != n or len(lengths) != n:
        raise ValueError("sigma, x and lengths must have equal length")
    if not 0.5 < kappa0 < 1.0:
        raise ValueError("kappa0 must lie in (1/2, 1)")
    if any(l <= min_length for l in lengths):
        raise ValueError(f"straight pieces must be longer than {min_length}")
    args = [phi + s * HALF_PI + xk for s, xk in zip(sigma.signs, x)]
    angles = [theta0] + args + [theta0 + theta1]
    segs: list[Segment] = []
    spans = []
    t = 0.0
    for k in range(n + 1):
        d = angles[k + 1] - angles[k]
        if abs(d) >= max_amplitude:
            raise ValueError(f"arc {k + 1} needs amplitude {abs(d)!r} >= {max_amplitude!r}")
        if d != 0.0:
            segs.append(Segment(math.copysign(kappa0, d), abs(d) / kappa0))
            t += abs(d) / kappa0
        if k < n:
            segs.append(Segment(0.0, lengths[k]))
            spans.append((t, t + lengths[k]))
            t += lengths[k]
    path = PCCPath(start, theta0, segs)
    member = None
    if chain is not None:
        strings, deltas = chain
        if SignString(strings[-1]) != sigma:
            raise ValueError("the chain must end with sigma")
        member = pulley_sets(x, strings, deltas)
    return Pulley(float(phi), sigma, x, lengths, float(kappa0), float(theta1), path,
                  tuple(spans), 0.0, member)


def _reduces_to(tags, target: SignString) -> bool:
    out = []
    for s in tags:
        if not out or out[-1] != s:
            out.append(s)
    return tuple(out) == target.signs


def pulley_sets(x, strings, deltas) -> dict:
    """Membership of the offsets ``x`` in H_c and H_d for a chain of strings.

    ``strings`` is sigma_1 < ... < sigma_m and ``deltas`` the heights with
    delta_{j+1} > 2 delta_j.  Both sets share the height condition: the
    indices with |x_k| < delta_j, and also those with |x_k| <= 2 delta_j,
    carry tags reducing to sigma_j.  H_c asks sigma_m(k) x_k < 0 for all k;
    H_d asks for opposite tags k1, k2 with sigma_m(k_i) x_{k_i} > 0.
    """
    strings = [SignString(s) for s in strings]
    deltas = [float(d) for d in deltas]
    if len(strings) != len(deltas) or not strings:
        raise ValueError("one height per string")
    if any(b <= 2 * a for a, b in zip(deltas, deltas[1:])) or deltas[0] <= 0:
        raise ValueError("heights must satisfy delta_{j+1} > 2 delta_j > 0")
    top = strings[-1].signs
    x = np.asarray(x, dtype=float)
    if x.size != len(top):
        raise ValueError("dimension mismatch")
    heights = True
    for sig, d in zip(strings, deltas):
        for mask in (np.abs(x) < d, np.abs(x) <= 2 * d):
            if not _reduces_to([top[k] for k in np.flatnonzero(mask)], sig):
                heights = False
    sx = np.asarray(top) * x
    cond = bool(np.all(sx < 0))
    pos = sx > 0
    diff = bool(np.any(pos & (np.asarray(top) > 0)) and np.any(pos & (np.asarray(top) < 0)))
    return {"H_c": heights and cond, "H_d": heights and diff}


def _first_time_at(path: PCCPath, value: float):
    """Smallest arc length where theta equals ``value``, or None."""
    s, th = path.node_arcs, path.node_thetas
    for i in range(len(s)):
        if th[i] == value:
            return float(s[i])
        if i + 1 < len(s) and (th[i] - value) * (th[i + 1] - value) < 0:
            return float(s[i] + (s[i + 1] - s[i]) * (value - th[i]) / (th[i + 1] - th[i]))
    return None


def pulley_fit(pulley: Pulley, q, pair=None, min_length: float = 10.0,
               margin: float = 1e-3, tol: float = 1e-9) -> Pulley:
    """Adjust two straight pieces and graft one piece at argument phi to end at ``q``.

    The straight pieces ``pair`` (0-based, opposite signs; chosen
    automatically by default) get new lengths ``>= min_length + margin`` and
    a nonnegative piece is grafted where theta first equals phi.  The linear
    system is solved by nonnegative least squares and the endpoint is checked
    by forward evaluation.
    """
    q = np.asarray(q, dtype=float)
    end = np.array(pulley.path.end)
    if np.linalg.norm(end - q) <= 1e-12 * (1.0 + np.linalg.norm(q)):
        return pulley
    sig = pulley.sigma.signs
    if pair is None:
        sx = np.asarray(sig) * np.asarray(pulley.x)
        plus = [k for k in range(len(sig)) if sig[k] > 0]
        minus = [k for k in range(len(sig)) if sig[k] < 0]
        outward_p = [k for k in plus if sx[k] > 0]
        outward_m = [k for k in minus if sx[k] > 0]
        if outward_p and outward_m:
            pair = (outward_p[0], outward_m[0])
        else:
            pair = (0, 1)
    k1, k2 = pair
    if sig[k1] == sig[k2]:
        raise ValueError("the adjusted pieces must carry opposite signs")
    t_phi = _first_time_at(pulley.path, pulley.phi)
    if t_phi is None:
        raise GraftInfeasible("theta never equals phi, no graft point")
    args = pulley.args
    e1 = np.array([math.cos(args[k1]), math.sin(args[k1])])
    e2 = np.array([math.cos(args[k2]), math.sin(args[k2])])
    ef = np.array([math.cos(pulley.phi), math.sin(pulley.phi)])
    floor = min_length + margin
    base = end - pulley.lengths[k1] * e1 - pulley.lengths[k2] * e2 + floor * (e1 + e2)
    M = np.column_stack([e1, e2, ef])
    y, res = nnls(M, q - base)
    if res > tol:
        raise GraftInfeasible(
            f"q={tuple(q.tolist())} is outside the attainable cone: nonnegative combination of "
            f"directions {np.round(args[[k1, k2]], 6).tolist()} and phi={pulley.phi!r} "
            f"misses by {res:.3g}")
    lengths = list(pulley.lengths)
    lengths[k1] = floor + y[0]
    lengths[k2] = floor + y[1]
    new = pulley_build(pulley.phi, pulley.sigma, pulley.x, lengths, pulley.kappa0,
                       pulley.theta1, start=pulley.path.start, theta0=pulley.path.theta0,
                       max_amplitude=math.inf, min_length=0.0)
    path = new.path
    spans = new.spans
    if y[2] > 0.0:
        t = _first_time_at(path, pulley.phi)
        path = graft(path, t, y[2])
        spans = tuple((a + y[2], b + y[2]) if a >= t else (a, b) for a, b in spans)
    err = float(np.linalg.norm(np.array(path.end) - q))
    if err > tol:
        raise GraftInfeasible(f"fit residual {err:.3g} exceeds {tol!r}")
    return Pulley(pulley.phi, pulley.sigma, pulley.x, tuple(lengths), pulley.kappa0,
                  pulley.theta1, path, spans, float(y[2]), pulley.membership)


# ---------------------------------------------------------------------------
# the generator family

@dataclass(frozen=True)
class GeneratorConfig:
    """Constants of the generator family.

    kappa0 : curvature of the circle arcs (radius 1/kappa0)
    delta : half-width of the tube around the equator
    link : length of the straight piece inserted at every junction, which
        keeps a stretchable witness when the junction argument misses
        phi +- pi/2 slightly.  None picks 0.75 for n = 2 and 0.4 otherwise:
        longer links keep detection alive further into the caps, shorter
        ones leave room to reach q when n + 1 arcs nearly span |q|
    star : on the equator, phi is phi_tau when <x, p>/|p|^2 >= star and
        phi_{-tau} when it is <= -star, linear in between
    """

    kappa0: float = 0.98
    delta: float = 0.05
    link: float | None = None
    star: float = 0.5

    def __post_init__(self):
        if not 0.5 < self.kappa0 < 1.0:
            raise ValueError("kappa0 must lie in (1/2, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.link is not None and self.link < 0.0:
            raise ValueError("link must be >= 0")

    def link_for(self, n: int) -> float:
        if self.link is not None:
            return self.link
        return 0.75 if n == 2 else 0.4


def arc_chain(args, theta1: float, kappa0: float, link: float = 0.0) -> PCCPath:
    """Circle arcs from angle 0 through ``args`` to ``theta1``, starting at 0.

    A straight piece of length ``link`` sits at every junction.
    """
    angles = [0.0] + [float(a) for a in args] + [float(theta1)]
    segs: list[Segment] = []
    for k in range(len(angles) - 1):
        d = angles[k + 1] - angles[k]
        if d != 0.0:
            segs.append(Segment(math.copysign(kappa0, d), abs(d) / kappa0))
        if k < len(angles) - 2 and link > 0.0:
            segs.append(Segment(0.0, link))
    if not segs:
        segs = [Segment(0.0, link if link > 0 else 1e-9)]
    return PCCPath((0.0, 0.0), 0.0, segs)


def graft_to(path: PCCPath, q, tol: float = 1e-9) -> PCCPath:
    """Graft straight pieces at the extreme and middle arguments to end at ``q``.

    Directions theta_min, theta_max and their mean are used with
    nonnegative lengths (nonnegative least squares); the endpoint is
    checked afterwards.
    """
    q = np.asarray(q, dtype=float)
    th = path.node_thetas
    lo, hi = float(th.min()), float(th.max())
    targets = [lo, hi, 0.5 * (lo + hi)]
    M = np.array([[math.cos(a) for a in targets], [math.sin(a) for a in targets]])
    d = q - np.array(path.end)
    if np.linalg.norm(d) <= tol:
        return path
    y, res = nnls(M, d)
    if res > tol:
        raise GraftInfeasible(f"endpoint offset {d.tolist()} is outside the cone of "
                              f"arguments [{lo!r}, {hi!r}] (miss {res:.3g})")
    times = [_first_time_at(path, a) for a in targets]
    out = path
    for t, L in sorted(zip(times, y), key=lambda p: -p[0]):
        if L > 0.0:
            out = graft(out, t, L)
    err = float(np.linalg.norm(np.array(out.end) - q))
    if err > tol:
        raise GraftInfeasible(f"fit residual {err:.3g} exceeds {tol!r}")
    return out


def default_tau(n: int) -> SignString:
    """The alternating string of length n starting with +."""
    return SignString(tuple(1 if k % 2 == 0 else -1 for k in range(n)))


def _check_class(Q: UTPoint, tau: SignString):
    cls = homotopy_class(Q)
    if cls != sphere(len(tau) - 1):
        raise ValueError(f"Q has class {cls}, the generator for |tau|={len(tau)} "
                         f"needs E x S^{len(tau) - 1}")


def equator_point(x, tol: float = 1e-12) -> np.ndarray:
    """Validate a point of S: coordinates in [-pi/2, pi/2], both extremes attained."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > HALF_PI + tol):
        raise ValueError("x must lie in the cube")
    if not (np.any(x >= HALF_PI - tol) and np.any(x <= -HALF_PI + tol)):
        raise ValueError("x must have a coordinate pi/2 and a coordinate -pi/2")
    return np.clip(x, -HALF_PI, HALF_PI)


def _sector_slack(path: PCCPath, q) -> float:
    """Angular room of q - end inside the cone of the path's arguments."""
    d = np.asarray(q, dtype=float) - np.array(path.end)
    th = path.node_thetas
    lo, hi = float(th.min()), float(th.max())
    if hi - lo >= math.pi:
        return math.pi
    mid = 0.5 * (lo + hi)
    ang = math.atan2(d[1], d[0])
    ang = mid + math.remainder(ang - mid, 2 * math.pi)
    return min(ang - lo, hi - ang)


@lru_cache(maxsize=64)
def _reference_phis_cached(q, theta1, tau_text, kappa0, delta, link):
    tau = SignString(tau_text)
    n = len(tau)
    p = HALF_PI * np.asarray(tau.signs, dtype=float)
    lo, hi = theta1 - HALF_PI if theta1 >= 0 else -HALF_PI, \
        HALF_PI if theta1 >= 0 else theta1 + HALF_PI
    grid = np.linspace(lo, hi, 361)[1:-1]
    out = []
    for vertex in (p, -p):
        best, best_phi = -math.inf, None
        for phi in grid:
            slack = min(_sector_slack(arc_chain(phi + (1 + s) * vertex, theta1, kappa0, link), q)
                        for s in (-delta, 0.0))
            if slack > best:
                best, best_phi = slack, float(phi)
        out.append(best_phi)
    return tuple(out)


def reference_phis(Q: UTPoint, tau, cfg: GeneratorConfig = GeneratorConfig()) -> tuple:
    """(phi_tau, phi_{-tau}): axis angles used near the vertices p and -p.

    Each maximizes, over a grid in R(Q), the angular room for grafting the
    junction chain at that vertex (tube radii s = -delta and 0).
    """
    tau = SignString(tau)
    return _reference_phis_cached(tuple(Q.q), Q.theta1, str(tau), cfg.kappa0, cfg.delta,
                                  cfg.link_for(len(tau)))


def _phi_on_equator(x, tau, phis, star):
    p = HALF_PI * np.asarray(tau.signs, dtype=float)
    t = float(np.dot(x, p) / np.dot(p, p))
    c = min(1.0, max(-1.0, t / star))
    return 0.5 * (1 + c) * phis[0] + 0.5 * (1 - c) * phis[1]


def generator_sample(Q: UTPoint, tau, x, s: float, cfg: GeneratorConfig = GeneratorConfig(),
                     phi: float | None = None, check: bool = True) -> PCCPath:
    """The tube curve at ``(x, s)``: junction arguments ``phi + (1+s) x_k``, grafted to q."""
    tau = SignString(tau)
    if check:
        _check_class(Q, tau)
    x = equator_point(x)
    if len(x) != len(tau):
        raise ValueError("x and tau must have equal length")
    if abs(s) > cfg.delta + 1e-15:
        raise ValueError(f"|s| must be <= delta={cfg.delta}")
    if phi is None:
        phi = _phi_on_equator(x, tau, reference_phis(Q, tau, cfg), cfg.star)
    eta = arc_chain(phi + (1.0 + s) * x, Q.theta1, cfg.kappa0, cfg.link_for(len(x)))
    return graft_to(eta, Q.q)


def _exit_radius(w, theta1):
    """Largest t with range{0, theta1, c0 + t w} <= pi, c0 = theta1/2 (1,...,1)."""
    h = 0.5 * theta1
    bounds = []
    for wk in w:
        if wk > 0:
            bounds.append(min(math.pi - h, math.pi + h) / wk)
        elif wk < 0:
            bounds.append(min(math.pi + h, math.pi - h) / -wk)
    for i in range(len(w)):
        for j in range(len(w)):
            d = w[i] - w[j]
            if d > 0:
                bounds.append(math.pi / d)
    return min(bounds)


def _slerp(a, b, u):
    cosang = float(np.clip(np.dot(a, b), -1.0, 1.0))
    ang = math.acos(cosang)
    if ang < 1e-15:
        return b.copy()
    return (math.sin((1 - u) * ang) * a + math.sin(u * ang) * b) / math.sin(ang)


def _project_to_equator(y, side):
    if side > 0:
        m = float(np.min(y))
        return -HALF_PI + (y - m) * (math.pi / (HALF_PI - m))
    M = float(np.max(y))
    return HALF_PI - (M - y) * (math.pi / (M + HALF_PI))


def cube_curve(Q: UTPoint, tau, y, cfg: GeneratorConfig = GeneratorConfig(),
               check: bool = True) -> PCCPath:
    """f(y) for a point ``y`` of the cube boundary.

    The star of (+,...,+) is the diffuse hemisphere and the star of
    (-,...,-) the condensed one.  Distance to the equator is
    ``d = pi/2 + min y`` resp. ``pi/2 - max y``; up to ``delta`` the point is
    the tube point ``(x, +-d)`` with ``x`` the affine projection onto S;
    beyond, ``u = (d - delta)/(pi - delta)`` runs an explicit contraction.
    """
    tau = SignString(tau)
    if check:
        _check_class(Q, tau)
    y = np.asarray(y, dtype=float)
    if abs(float(np.max(np.abs(y))) - HALF_PI) > 1e-9:
        raise ValueError("y must lie on the cube boundary")
    y = np.clip(y, -HALF_PI, HALF_PI)
    tol = 1e-12
    hi = bool(np.any(y >= HALF_PI - tol))
    lo = bool(np.any(y <= -HALF_PI + tol))
    if hi and lo:
        return generator_sample(Q, tau, y, 0.0, cfg, check=False)
    side = 1 if hi else -1
    d = HALF_PI + float(np.min(y)) if side > 0 else HALF_PI - float(np.max(y))
    if d <= cfg.delta:
        x = _project_to_equator(y, side)
        return generator_sample(Q, tau, x, side * d, cfg, check=False)
    u = (d - cfg.delta) / (math.pi - cfg.delta)
    n = len(tau)
    if u >= 1.0 - 1e-15:
        x = None
    else:
        x = equator_point(_project_to_equator(y, side), tol=1e-9)
    c0 = 0.5 * Q.theta1
    link = cfg.link_for(n)
    if side < 0:
        # condensed cap: shrink the junction arguments towards theta1/2
        if x is None:
            args = np.full(n, c0)
        else:
            phi = _phi_on_equator(x, tau, reference_phis(Q, tau, cfg), cfg.star)
            args_b = phi + (1.0 - cfg.delta) * x
            args = c0 + (1.0 - u) * (args_b - c0)
        link = (1.0 - u) * link
    else:
        # diffuse cap: radial path outside the convex set of non-diffuse arguments
        w_star = np.full(n, 1.0 / math.sqrt(n))
        if x is None:
            w_u, ratio = w_star, 2.0
        else:
            phi = _phi_on_equator(x, tau, reference_phis(Q, tau, cfg), cfg.star)
            v_b = phi + (1.0 + cfg.delta) * x - c0
            rho_b = float(np.linalg.norm(v_b))
            w_b = v_b / rho_b
            w_u = _slerp(w_b, w_star, u)
            w_u /= np.linalg.norm(w_u)
            ratio = (1.0 - u) * rho_b / _exit_radius(w_b, Q.theta1) + 2.0 * u
        args = c0 + ratio * _exit_radius(w_u, Q.theta1) * w_u
    eta = arc_chain(args, Q.theta1, cfg.kappa0, link)
    return graft_to(eta, Q.q)


# ---------------------------------------------------------------------------
# the sphere map

@dataclass(frozen=True)
class SphereTarget:
    """Target S^{n-1} with the zero-sum hyperplane and the cutoff thresholds."""

    n: int
    a: float = 0.2
    b: float = 0.6
    basis: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not 0.0 < self.a < self.b:
            raise ValueError("thresholds must satisfy 0 < a < b")
        # orthonormal basis of {sum x = 0}
        M = np.eye(self.n)[:, : self.n - 1] - 1.0 / self.n
        Qm, _ = np.linalg.qr(np.column_stack([np.ones(self.n), M]))
        object.__setattr__(self, "basis", Qm[:, 1:])

    @property
    def north(self) -> np.ndarray:
        e = np.zeros(self.n)
        e[-1] = 1.0
        return e

    def cutoff(self, r: float) -> float:
        if r <= self.a:
            return 0.0
        if r >= self.b:
            return 1.0
        return (r - self.a) / (self.b - self.a)

    def collapse(self, v) -> np.ndarray:
        """Polar map: |v| -> polar angle pi min(|v|, 1)."""
        c = self.basis.T @ np.asarray(v, dtype=float)
        r = float(np.linalg.norm(c))
        ang = math.pi * min(r, 1.0)
        out = np.zeros(self.n)
        if r > 0.0:
            out[:-1] = math.sin(ang) * c / r
        out[-1] = math.cos(ang)
        return out


def alpha_vector(gamma: PCCPath, tau, eps_grid=EPS_GRID):
    """(alpha_1, ..., alpha_n) at phi = phibar, or None outside U_tau."""
    tau = SignString(tau)
    phibar = curve_stats(gamma).phibar
    th, s = gamma.node_thetas, gamma.node_arcs
    for eps in eps_grid:
        cert = quasicritical_find(gamma, phibar, eps, tau)
        if cert is None:
            continue
        out = []
        for (a, b), sign in zip(cert.J, tau.signs):
            inner = th[(s > a) & (s < b)]
            vals = np.concatenate([inner, np.interp([a, b], s, th)])
            out.append(vals.max() - HALF_PI if sign > 0 else vals.min() + HALF_PI)
        return np.array(out)
    return None


def sphere_map_g(gamma: PCCPath, tau, target: SphereTarget | None = None) -> np.ndarray:
    """g(gamma) on S^{n-1}; the north pole exactly on critical curves of type tau."""
    tau = SignString(tau)
    target = SphereTarget(len(tau)) if target is None else target
    if target.n != len(tau):
        raise ValueError("target dimension does not match tau")
    alpha = alpha_vector(gamma, tau)
    if alpha is None:
        return -target.north
    A = alpha - alpha.mean()
    r = float(np.linalg.norm(A))
    lam = target.cutoff(r)
    v = (1.0 - lam) * A + (lam * A / r if r > 0.0 else 0.0)
    return target.collapse(v)


# ---------------------------------------------------------------------------
# degree

def square_loop(t: float) -> np.ndarray:
    """Boundary of [-pi/2, pi/2]^2 traversed once counterclockwise, t in [0, 1)."""
    t = (t % 1.0) * 4.0
    side, f = int(t), t - int(t)
    a = -HALF_PI + math.pi * f
    if side == 0:
        return np.array([HALF_PI, a])
    if side == 1:
        return np.array([-a, HALF_PI])
    if side == 2:
        return np.array([-HALF_PI, -a])
    return np.array([a, -HALF_PI])


def degree_check(Q: UTPoint, samples: int = 720, tau=None,
                 cfg: GeneratorConfig = GeneratorConfig(), reverse: bool = False,
                 max_samples: int = 2 ** 16) -> int:
    """Winding number of g o f around the square boundary (n = 2).

    Steps larger than pi/2 between neighbouring samples are bisected until
    they fall below pi/2; RuntimeError if that needs more than
    ``max_samples`` evaluations.
    """
    tau = default_tau(2) if tau is None else SignString(tau)
    if len(tau) != 2:
        raise ValueError("the winding check is for |tau| = 2; use preimage_count")
    _check_class(Q, tau)
    target = SphereTarget(2)

    def angle(t):
        g = sphere_map_g(cube_curve(Q, tau, square_loop(t), cfg, check=False), tau, target)
        return math.atan2(g[0], g[1])

    ts = np.linspace(0.0, 1.0, samples, endpoint=False)
    if reverse:
        ts = (1.0 - ts) % 1.0
    ts = list(ts) + [ts[0]]
    vals = [angle(t) for t in ts[:-1]]
    vals.append(vals[0])
    count = len(vals)
    total = 0.0
    stack = [(ts[i], ts[i + 1], vals[i], vals[i + 1]) for i in range(len(ts) - 1)]
    stack.reverse()
    while stack:
        t0, t1, v0, v1 = stack.pop()
        step = math.remainder(v1 - v0, 2 * math.pi)
        if abs(step) > HALF_PI:
            if count >= max_samples:
                raise RuntimeError("winding did not stabilise within the sample budget")
            dt = math.remainder(t1 - t0, 1.0)
            tm = (t0 + 0.5 * dt) % 1.0
            vm = angle(tm)
            count += 1
            stack.append((tm, t1, vm, v1))
            stack.append((t0, tm, v0, vm))
            continue
        total += step
    return int(round(total / (2 * math.pi)))


def cube_face_grid(n: int, m: int = 64) -> np.ndarray:
    """All points of the cube boundary whose free coordinates lie on an m-point grid."""
    ticks = np.linspace(-HALF_PI, HALF_PI, m)
    pts = set()
    for i in range(n):
        for sgn in (-1.0, 1.0):
            mesh = np.meshgrid(*([np.arange(m)] * (n - 1)), indexing="ij")
            idx = np.stack([g.ravel() for g in mesh], axis=1)
            for row in idx:
                full = list(row[:i]) + [0 if sgn < 0 else m - 1] + list(row[i:])
                pts.add(tuple(full))
    arr = np.array(sorted(pts))
    return ticks[arr]


def preimage_count(Q: UTPoint, grid: int = 64, tau=None,
                   cfg: GeneratorConfig = GeneratorConfig(), tol: float = 1e-9):
    """Grid points of the cube boundary where g o f equals the north pole.

    Returns ``(count, points)``.
    """
    cls = homotopy_class(Q)
    if cls.kind != "sphere" or cls.n < 1:
        raise ValueError(f"Q has class {cls}; a sphere of dimension >= 1 is needed")
    n = cls.n + 1
    tau = default_tau(n) if tau is None else SignString(tau)
    _check_class(Q, tau)
    target = SphereTarget(n)
    north = target.north
    hits = []
    for y in cube_face_grid(n, grid):
        g = sphere_map_g(cube_curve(Q, tau, y, cfg, check=False), tau, target)
        if np.linalg.norm(g - north) <= tol:
            hits.append(tuple(float(v) for v in y))
    return len(hits), hits
