"""Piecewise constant curvature paths and the curve-level constructions.

A path is a start point, an initial tangent angle and a list of
``(kappa, length)`` pieces.  The tangent angle ``theta`` is then piecewise
linear in arc length, so every extremum, level crossing and sup/inf used
below is computed exactly from the node values.  Arc length on ``[0, L]``
plays the role of the curve parameter throughout.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .strings import SignString, reduce_string
from .stretch import (
    StretchProblem,
    is_stretchable,
    solve_mu,
    zeta_pieces,
)

__all__ = [
    "Segment",
    "PCCPath",
    "CurveStats",
    "CurveClass",
    "UTPoint",
    "QuasiCert",
    "VMembership",
    "TangentConeError",
    "NotStretchable",
    "NotQuasicritical",
    "LiftError",
    "DETECT_KAPPA",
    "EPS_GRID",
    "curve_stats",
    "classify_curve",
    "graft",
    "subarc_problem",
    "subarc_stretchable",
    "stretch_subarc",
    "flatten_subarc",
    "grouped_tags",
    "quasicritical_find",
    "verify_quasicritical",
    "quasicritical_phis",
    "h_map",
    "v_membership",
    "lift_to_N",
    "argument_interpolate",
    "curve_to_dict",
    "curve_from_dict",
    "load_curve",
    "dump_curve",
]

HALF_PI = 0.5 * math.pi
# "stretchable for some kappa0 < 1" is tested at this bound
DETECT_KAPPA = 0.999
EPS_GRID = tuple(math.pi / 8 * 2.0 ** -j for j in range(13))


class TangentConeError(ValueError):
    """The tangent leaves the open half-plane around the stretching axis."""


class NotStretchable(ValueError):
    pass


class NotQuasicritical(ValueError):
    pass


class LiftError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    kappa: float
    length: float


def _advance(x, y, theta, kappa, length):
    # chord of an arc: length * sin(h)/h in the direction theta + h
    half = 0.5 * kappa * length
    chord = length * float(np.sinc(half / math.pi))
    mid = theta + half
    return x + chord * math.cos(mid), y + chord * math.sin(mid)


class PCCPath:
    """Arcs and line segments joined with a continuous tangent.

    Parameters
    ----------
    start : pair of floats
        Initial point.
    theta0 : float
        Initial tangent angle (a lift, not reduced mod 2 pi).
    segments : iterable
        ``(kappa, length)`` pairs, :class:`Segment` objects or dicts with
        keys ``kappa`` and ``length``.  Lengths must be positive and
        ``|kappa| <= 1``.
    """

    def __init__(self, start=(0.0, 0.0), theta0: float = 0.0, segments=()):
        segs = []
        for item in segments:
            if isinstance(item, Segment):
                k, l = item.kappa, item.length
            elif isinstance(item, dict):
                k, l = item["kappa"], item["length"]
            else:
                k, l = item
            k, l = float(k), float(l)
            if not (math.isfinite(k) and math.isfinite(l)):
                raise ValueError("non-finite segment data")
            if l <= 0.0:
                raise ValueError(f"segment length must be positive, got {l!r}")
            if abs(k) > 1.0:
                raise ValueError(f"curvature must satisfy |kappa| <= 1, got {k!r}")
            segs.append(Segment(k, l))
        if not segs:
            raise ValueError("a path needs at least one segment")
        x0, y0 = (float(v) for v in start)
        self.start = (x0, y0)
        self.theta0 = float(theta0)
        self.segments = tuple(segs)

        n = len(segs)
        s = np.empty(n + 1)
        th = np.empty(n + 1)
        pts = np.empty((n + 1, 2))
        s[0], th[0], pts[0] = 0.0, self.theta0, (x0, y0)
        x, y, t, acc = x0, y0, self.theta0, 0.0
        for i, seg in enumerate(segs):
            x, y = _advance(x, y, t, seg.kappa, seg.length)
            t = t + seg.kappa * seg.length
            acc = acc + seg.length
            s[i + 1], th[i + 1], pts[i + 1] = acc, t, (x, y)
        self._s, self._th, self._pts = s, th, pts

    # -- basic accessors ---------------------------------------------------
    @property
    def length(self) -> float:
        return float(self._s[-1])

    @property
    def end(self) -> tuple[float, float]:
        return float(self._pts[-1, 0]), float(self._pts[-1, 1])

    @property
    def theta_end(self) -> float:
        return float(self._th[-1])

    @property
    def node_arcs(self) -> np.ndarray:
        return self._s.copy()

    @property
    def node_thetas(self) -> np.ndarray:
        return self._th.copy()

    @property
    def node_points(self) -> np.ndarray:
        return self._pts.copy()

    @property
    def kappas(self) -> np.ndarray:
        return np.array([g.kappa for g in self.segments])

    @property
    def lengths(self) -> np.ndarray:
        return np.array([g.length for g in self.segments])

    def __len__(self):
        return len(self.segments)

    def __repr__(self):
        return (f"PCCPath(start={self.start!r}, theta0={self.theta0!r}, "
                f"segments={len(self.segments)} pieces, length={self.length:.6g})")

    def __eq__(self, other):
        if not isinstance(other, PCCPath):
            return NotImplemented
        return (self.start == other.start and self.theta0 == other.theta0
                and self.segments == other.segments)

    def __hash__(self):
        return hash((self.start, self.theta0, self.segments))

    # -- evaluation --------------------------------------------------------
    def theta_at(self, t):
        """Tangent angle at arc length ``t`` (vectorized, exact)."""
        return np.interp(t, self._s, self._th)

    def _locate(self, t: float) -> int:
        if not 0.0 <= t <= self.length:
            raise ValueError(f"t={t!r} outside [0, {self.length!r}]")
        i = int(np.searchsorted(self._s, t, side="right")) - 1
        return min(max(i, 0), len(self.segments) - 1)

    def pose(self, t: float) -> tuple[float, float, float]:
        """(x, y, theta) at arc length ``t``."""
        t = float(t)
        i = self._locate(t)
        seg = self.segments[i]
        dt = t - self._s[i]
        x, y = _advance(self._pts[i, 0], self._pts[i, 1], self._th[i], seg.kappa, dt)
        return x, y, float(self._th[i] + seg.kappa * dt)

    def sample(self, n: int = 200) -> np.ndarray:
        """``n`` points equally spaced in arc length, shape (n, 2)."""
        ts = np.linspace(0.0, self.length, n)
        return np.array([self.pose(t)[:2] for t in ts])

    # -- surgery -------------------------------------------------------------
    def split(self, t: float, tol: float = 1e-12) -> tuple["PCCPath", int]:
        """Insert a node at ``t``; returns the new path and the node index."""
        t = float(t)
        i = self._locate(t)
        scale = tol * max(1.0, self.length)
        for j in (i, i + 1):
            if abs(self._s[j] - t) <= scale:
                return self, j
        seg = self.segments[i]
        a = t - self._s[i]
        b = self._s[i + 1] - t
        segs = list(self.segments[:i]) + [Segment(seg.kappa, a), Segment(seg.kappa, b)] \
            + list(self.segments[i + 1:])
        return PCCPath(self.start, self.theta0, segs), i + 1

    def subpath(self, t0: float, t1: float) -> "PCCPath":
        """The restriction to ``[t0, t1]`` (keeps absolute position and angle)."""
        if not 0.0 <= t0 < t1 <= self.length:
            raise ValueError(f"bad subinterval [{t0!r}, {t1!r}]")
        path, j0 = self.split(t0)
        path, j1 = path.split(t1)
        if j1 <= j0:
            raise ValueError("subinterval too short")
        return PCCPath(tuple(path._pts[j0]), path._th[j0], path.segments[j0:j1])

    def with_segments(self, segments) -> "PCCPath":
        return PCCPath(self.start, self.theta0, segments)

    def merged(self, tol: float = 0.0) -> "PCCPath":
        """Adjacent pieces with equal curvature joined into one."""
        out: list[Segment] = []
        for g in self.segments:
            if out and abs(out[-1].kappa - g.kappa) <= tol:
                out[-1] = Segment(out[-1].kappa, out[-1].length + g.length)
            else:
                out.append(g)
        return PCCPath(self.start, self.theta0, out)


# ---------------------------------------------------------------------------
# statistics and classification

@dataclass(frozen=True)
class CurveStats:
    theta1: float
    omega: float
    phibar: float
    theta_min: float
    theta_max: float


def curve_stats(gamma: PCCPath) -> CurveStats:
    th = gamma._th
    lo, hi = float(th.min()), float(th.max())
    return CurveStats(theta1=float(th[-1] - th[0]), omega=hi - lo,
                      phibar=0.5 * (hi + lo), theta_min=lo, theta_max=hi)


@dataclass(frozen=True)
class CurveClass:
    """``kind`` is 'condensed', 'critical' or 'diffuse'; ``type`` is set for critical."""

    kind: str
    type: SignString | None = None

    def __str__(self):
        return self.kind if self.type is None else f"critical({self.type})"


def classify_curve(gamma: PCCPath, tol: float = 1e-9) -> CurveClass:
    """Condensed, critical (with its type) or diffuse.

    The type is the reduction of the chronological list of extremum visits,
    ``+`` where theta is within ``tol`` of its max and ``-`` within ``tol`` of
    its min.
    """
    st = curve_stats(gamma)
    if st.omega < math.pi - tol:
        return CurveClass("condensed")
    if st.omega > math.pi + tol:
        return CurveClass("diffuse")
    tags = []
    for v in gamma._th:
        if v >= st.theta_max - tol:
            tags.append(1)
        elif v <= st.theta_min + tol:
            tags.append(-1)
    return CurveClass("critical", reduce_string(tags))


def graft(gamma: PCCPath, t: float, L: float) -> PCCPath:
    """Insert a straight piece of length ``L`` at arc length ``t``."""
    L = float(L)
    if L < 0.0:
        raise ValueError("graft length must be >= 0")
    if L == 0.0:
        return gamma
    path, j = gamma.split(t)
    segs = list(path.segments[:j]) + [Segment(0.0, L)] + list(path.segments[j:])
    return PCCPath(gamma.start, gamma.theta0, segs)


# ---------------------------------------------------------------------------
# stretching a subarc

def _relative_lift(theta0: float, psi: float) -> float:
    """The lift psi + 2 pi k closest to theta0."""
    return psi + 2.0 * math.pi * round((theta0 - psi) / (2.0 * math.pi))


def subarc_problem(gamma: PCCPath, I, psi: float, kappa0: float | None = None) -> StretchProblem:
    """Stretching data of ``gamma`` restricted to ``I`` in the frame of ``e^{i psi}``."""
    t0, t1 = (float(v) for v in I)
    sub = gamma.subpath(t0, t1)
    axis = _relative_lift(sub._th[0], psi)
    rel = sub._th - axis
    if np.max(np.abs(rel)) >= HALF_PI:
        raise TangentConeError("tangent not in the open half-plane of the axis")
    kmax = float(np.max(np.abs(sub.kappas)))
    if kappa0 is None:
        kappa0 = max(kmax, 0.51)
    if kappa0 < kmax:
        raise ValueError(f"kappa0={kappa0!r} is below the curvature {kmax!r} of the subarc")
    if not 0.0 < kappa0 < 1.0:
        raise ValueError("kappa0 must lie in (0, 1)")
    d = sub._pts[-1] - sub._pts[0]
    e = np.array([math.cos(psi), math.sin(psi)])
    b = float(d @ e)
    A = float(e[0] * d[1] - e[1] * d[0])
    return StretchProblem(kappa0, b, math.tan(rel[0]), math.tan(rel[-1]), A)


def subarc_stretchable(gamma: PCCPath, I, psi: float, kappa0: float | None = None) -> bool:
    return is_stretchable(subarc_problem(gamma, I, psi, kappa0))


def _pieces_to_segments(pieces) -> list[Segment]:
    segs: list[Segment] = []
    for x0, x1, u0, m in pieces:
        if m == 0.0:
            if abs(u0) >= 1.0:
                raise ValueError("vertical flat piece")
            L = (x1 - x0) / math.sqrt(1.0 - u0 * u0)
        else:
            u1 = min(1.0, max(-1.0, u0 + m * (x1 - x0)))
            L = (math.asin(u1) - math.asin(u0)) / m
        if L <= 0.0:
            continue
        if segs and segs[-1].kappa == m:
            segs[-1] = Segment(m, segs[-1].length + L)
        else:
            segs.append(Segment(m, L))
    return segs


def stretch_subarc(gamma: PCCPath, I, psi: float, kappa0: float | None = None,
                   s: float = 0.0) -> PCCPath:
    """Replace ``gamma|I`` by the zeta curve of length ``b + s`` along the axis.

    The tail is carried along rigidly, so the endpoint moves by
    ``s e^{i psi}``; the tangent at both ends of ``I`` is unchanged.
    """
    t0, t1 = (float(v) for v in I)
    p = subarc_problem(gamma, (t0, t1), psi, kappa0)
    if not is_stretchable(p):
        raise NotStretchable("subarc is not stretchable along this axis")
    if s < 0.0:
        raise ValueError("s must be >= 0")
    c = p.b + float(s)
    mu = solve_mu(p, c)
    middle = _pieces_to_segments(zeta_pieces(p, mu, c))
    head = list(gamma.subpath(0.0, t0).segments) if t0 > 0.0 else []
    tail = list(gamma.subpath(t1, gamma.length).segments) if t1 < gamma.length else []
    return PCCPath(gamma.start, gamma.theta0, head + middle + tail)


def flatten_subarc(gamma: PCCPath, I, psi: float, kappa0: float | None = None) -> PCCPath:
    """Replace ``gamma|I`` by the canonical c-l-c arc with the same boundary data."""
    return stretch_subarc(gamma, I, psi, kappa0, 0.0)


# ---------------------------------------------------------------------------
# level sets of a piecewise linear function

def _refine(s, v, levels):
    rs, rv = [s[0]], [v[0]]
    for i in range(len(s) - 1):
        a, b, va, vb = s[i], s[i + 1], v[i], v[i + 1]
        cuts = []
        for c in levels:
            if (va - c) * (vb - c) < 0.0:
                cuts.append((a + (b - a) * (c - va) / (vb - va), c))
        for t, c in sorted(cuts):
            rs.append(t)
            rv.append(c)
        rs.append(b)
        rv.append(vb)
    return np.array(rs), np.array(rv)


def _superlevel(s, v, c):
    """Closed components of {v >= c} as (a, b) pairs, a <= b."""
    rs, rv = _refine(s, v, (c,))
    node_in = rv >= c
    out = []
    cur = None
    for i in range(len(rs)):
        if node_in[i]:
            if cur is None:
                cur = [rs[i], rs[i]]
            cur[1] = rs[i]
        piece_in = i + 1 < len(rs) and node_in[i] and node_in[i + 1] \
            and 0.5 * (rv[i] + rv[i + 1]) >= c
        if cur is not None and not piece_in:
            out.append((float(cur[0]), float(cur[1])))
            cur = None
    return out


def _open_band(s, v, lo, hi):
    """Components of {lo < v < hi} as open intervals (a, b)."""
    rs, rv = _refine(s, v, (lo, hi))
    out = []
    cur = None
    for i in range(len(rs) - 1):
        mid = 0.5 * (rv[i] + rv[i + 1])
        if lo < mid < hi:
            if cur is None:
                cur = [rs[i], rs[i + 1]]
            else:
                cur[1] = rs[i + 1]
            if not lo < rv[i + 1] < hi:
                out.append((float(cur[0]), float(cur[1])))
                cur = None
        elif cur is not None:
            out.append((float(cur[0]), float(cur[1])))
            cur = None
    if cur is not None:
        out.append((float(cur[0]), float(cur[1])))
    return [(a, b) for a, b in out if b > a]


def _range_on(s, v, a, b):
    """(min, max) of the piecewise linear v over [a, b]."""
    inner = v[(s > a) & (s < b)]
    ends = np.interp([a, b], s, v)
    vals = np.concatenate([inner, ends])
    return float(vals.min()), float(vals.max())


# ---------------------------------------------------------------------------
# quasicritical detection

@dataclass(frozen=True)
class QuasiCert:
    """Witness that a curve is (phi, eps)-quasicritical of type sigma.

    ``J`` are the ordered closed intervals (arc length), ``I`` the marked
    stretchable subintervals, ``kappa0`` the curvature bound used for them.
    """

    phi: float
    eps: float
    sigma: SignString
    J: tuple
    I: tuple
    kappa0: float


def _components(gamma: PCCPath, phi: float, eps: float):
    s, rel = gamma._s, gamma._th - phi
    c = HALF_PI - 2.0 * eps
    comps = [(a, b, 1) for a, b in _superlevel(s, rel, c)]
    comps += [(a, b, -1) for a, b in _superlevel(s, -rel, c)]
    comps.sort()
    groups: list[list] = []
    for a, b, tag in comps:
        if groups and groups[-1][2] == tag:
            groups[-1][1] = b
        else:
            groups.append([a, b, tag])
    return comps, groups


def grouped_tags(gamma: PCCPath, phi: float, eps: float) -> tuple[int, ...]:
    """Signs of the grouped components of {|theta - phi| >= pi/2 - 2 eps}."""
    return tuple(g[2] for g in _components(gamma, phi, eps)[1])


def _find_stretchable(gamma, s, rel, phi, tag, eps, lo_t, hi_t, kappa0):
    target = tag * HALF_PI
    for a, b in _open_band(s, rel, target - eps, target + eps):
        if b <= lo_t or a >= hi_t:
            continue
        a, b = max(a, lo_t), min(b, hi_t)
        w = b - a
        cands = [(a + 1e-9 * w, b - 1e-9 * w)]
        for i, seg in enumerate(gamma.segments):
            if seg.kappa == 0.0 and s[i] >= a and s[i + 1] <= b:
                cands.append((float(s[i]), float(s[i + 1])))
        for I in cands:
            if not I[1] > I[0]:
                continue
            sub = gamma.subpath(*I)
            kmax = float(np.max(np.abs(sub.kappas)))
            k0 = max(kappa0, kmax)
            if k0 >= 1.0:
                continue
            try:
                p = subarc_problem(gamma, I, phi + target, k0)
            except (TangentConeError, ValueError):
                continue
            if is_stretchable(p):
                return I, k0
    return None


def quasicritical_find(gamma: PCCPath, phi: float, eps: float, sigma,
                       kappa0: float = DETECT_KAPPA) -> QuasiCert | None:
    """Test (phi, eps)-quasicriticality of type ``sigma``; a certificate or None.

    The components of {|theta - phi| >= pi/2 - 2 eps} are tagged by the sign
    of theta - phi and grouped; the grouped string must equal ``sigma``.
    Each group hull is widened by a quarter of the neighbouring gaps to give
    J_k.  Stretchable subintervals are searched inside the open set
    {|theta - phi_k| < eps} of each group.
    """
    if not 0.0 < eps < 0.25 * math.pi:
        raise ValueError("eps must lie in (0, pi/4)")
    sigma = SignString(sigma)
    s, rel = gamma._s, gamma._th - phi
    _, groups = _components(gamma, phi, eps)
    if tuple(g[2] for g in groups) != sigma.signs:
        return None
    J, I_list, k_used = [], [], []
    L = gamma.length
    for k, (a, b, tag) in enumerate(groups):
        lo, hi = _range_on(s, rel, a, b)
        # condition (i); the other side is automatic inside a group
        if tag > 0 and not hi < HALF_PI + eps:
            return None
        if tag < 0 and not lo > -HALF_PI - eps:
            return None
        left = a - (groups[k - 1][1] if k else 0.0)
        right = (groups[k + 1][0] if k + 1 < len(groups) else L) - b
        J.append((a - 0.25 * left, b + 0.25 * right))
        found = _find_stretchable(gamma, s, rel, phi, tag, eps, a, b, kappa0)
        if found is None:
            return None
        I_list.append(found[0])
        k_used.append(found[1])
    return QuasiCert(float(phi), float(eps), sigma, tuple(J), tuple(I_list), max(k_used))


def verify_quasicritical(gamma: PCCPath, cert: QuasiCert) -> bool:
    """Check conditions (i)-(iii) for the intervals recorded in ``cert``."""
    s, rel = gamma._s, gamma._th - cert.phi
    eps, L = cert.eps, gamma.length
    J = cert.J
    if any(not (0.0 <= a < b <= L) for a, b in J):
        return False
    if any(J[k][1] >= J[k + 1][0] for k in range(len(J) - 1)):
        return False
    for (a, b), tag in zip(J, cert.sigma.signs):
        lo, hi = _range_on(s, rel, a, b)
        if tag > 0 and not (-HALF_PI + 2 * eps < lo and hi < HALF_PI + eps):
            return False
        if tag < 0 and not (-HALF_PI - eps < lo and hi < HALF_PI - 2 * eps):
            return False
    # (ii): the closed set {|rel| >= pi/2 - 2 eps} must lie in Int(union J),
    # interior taken relative to [0, L]
    c = HALF_PI - 2 * eps
    for sign in (1, -1):
        for a, b in _superlevel(s, sign * rel, c):
            ok = False
            for ja, jb in J:
                left_ok = ja < a or (ja == 0.0 and a == 0.0)
                right_ok = b < jb or (jb == L and b == L)
                if left_ok and right_ok:
                    ok = True
            if not ok:
                return False
    # (iii)
    for (a, b), (ia, ib), tag in zip(J, cert.I, cert.sigma.signs):
        if not a <= ia < ib <= b:
            return False
        lo, hi = _range_on(s, rel, ia, ib)
        target = tag * HALF_PI
        if not (target - eps < lo and hi < target + eps):
            return False
        p = subarc_problem(gamma, (ia, ib), cert.phi + target, cert.kappa0)
        if not is_stretchable(p):
            return False
    return True


def quasicritical_phis(gamma: PCCPath, sigma, phis, eps_grid=EPS_GRID) -> np.ndarray:
    """Boolean mask: for which ``phis`` some grid eps detects type ``sigma``."""
    return np.array([any(quasicritical_find(gamma, ph, e, sigma) is not None
                         for e in eps_grid) for ph in phis])


def h_map(gamma: PCCPath, phi: float, sigma, eps: float) -> np.ndarray:
    """h_k = sup_J theta - phi_+ (for +) or inf_J theta - phi_- (for -)."""
    cert = quasicritical_find(gamma, phi, eps, sigma)
    if cert is None:
        raise NotQuasicritical(f"not ({phi!r}, {eps!r})-quasicritical of type {sigma}")
    return _h_from_cert(gamma, cert)


def _h_from_cert(gamma, cert):
    s, rel = gamma._s, gamma._th - cert.phi
    out = []
    for (a, b), tag in zip(cert.J, cert.sigma.signs):
        lo, hi = _range_on(s, rel, a, b)
        out.append(hi - HALF_PI if tag > 0 else lo + HALF_PI)
    return np.array(out)


# ---------------------------------------------------------------------------
# the sets V_c, V_d, V_sigma and the lift

@dataclass(frozen=True)
class UTPoint:
    """Endpoint data: position ``q`` and final tangent ``e^{i theta1}``."""

    q: tuple
    theta1: float

    def __post_init__(self):
        q = tuple(float(v) for v in self.q)
        if len(q) != 2:
            raise ValueError("q must be a point of the plane")
        object.__setattr__(self, "q", q)
        t = float(self.theta1)
        if not math.isfinite(t) or abs(t) >= math.pi:
            raise ValueError("theta1 must lie in (-pi, pi)")
        object.__setattr__(self, "theta1", t)

    @property
    def z(self) -> complex:
        return complex(math.cos(self.theta1), math.sin(self.theta1))


@dataclass(frozen=True)
class VMembership:
    in_R: bool
    V_c: bool
    V_d: bool
    V_sigma: dict = field(default_factory=dict)

    @property
    def any(self) -> bool:
        return self.V_c or self.V_d or bool(self.V_sigma)


def v_membership(gamma: PCCPath, phi: float, Q: UTPoint | None = None,
                 eps_grid=EPS_GRID) -> VMembership:
    """Membership of (gamma, phi) in V_c, V_d and the V_sigma.

    ``V_sigma`` maps each detected type to the grid values of eps that
    witness it.  When ``Q`` is given and its class is a sphere E x S^d, types
    longer than the top length d + 1 are dropped.
    """
    st = curve_stats(gamma)
    t_start, t_end = float(gamma._th[0]), float(gamma._th[-1])
    top = None
    if Q is not None:
        if abs(st.theta1 - Q.theta1) > 1e-9:
            raise ValueError(f"curve turns by {st.theta1!r}, Q needs {Q.theta1!r}")
        from .classify import homotopy_class
        cls = homotopy_class(Q)
        if cls.kind == "sphere":
            top = cls.n + 1
    in_R = phi - HALF_PI < min(t_start, t_end) and max(t_start, t_end) < phi + HALF_PI
    V_c = in_R and phi - HALF_PI < st.theta_min and st.theta_max < phi + HALF_PI
    V_d = in_R and st.omega > math.pi
    found: dict[str, list] = {}
    if in_R:
        for eps in eps_grid:
            tags = grouped_tags(gamma, phi, eps)
            if len(tags) < 2 or (top is not None and len(tags) > top):
                continue
            if quasicritical_find(gamma, phi, eps, tags) is not None:
                found.setdefault(str(SignString(tags)), []).append(eps)
    return VMembership(in_R, V_c, V_d, {k: tuple(v) for k, v in found.items()})


def _ramp(omega, delta, s0):
    u = omega - math.pi
    if u <= -2 * delta:
        return 0.0
    if u < -delta:
        return s0 * (u + 2 * delta) / delta
    if u <= delta:
        return s0
    if u < 2 * delta:
        return s0 + (1.0 - s0) * (u - delta) / delta
    return 1.0


def lift_to_N(gamma: PCCPath, Q: UTPoint, delta: float = 0.05, s0: float = 1.0) -> float:
    """phi = (1 - s(omega)) phibar + s(omega) theta1/2, checked against the V-sets."""
    st = curve_stats(gamma)
    r = _ramp(st.omega, delta, s0)
    mid = float(gamma._th[0]) + 0.5 * Q.theta1
    phi = (1.0 - r) * st.phibar + r * mid
    m = v_membership(gamma, phi, Q)
    if not m.any:
        raise LiftError(f"(gamma, phi={phi!r}) lies in no V-set: omega={st.omega!r}, "
                        f"ramp={r!r}, in_R={m.in_R}")
    return phi


# ---------------------------------------------------------------------------
# interpolation by argument

def _argument_profile(gamma: PCCPath):
    """Breakpoints of theta, radius on each arc and straight lengths at each angle."""
    arcs = []       # (theta_a, theta_b, rho)
    straight = {}   # theta -> total length
    th = gamma._th
    for i, g in enumerate(gamma.segments):
        if g.kappa < 0.0:
            raise ValueError("argument interpolation needs nonnegative curvature")
        if g.kappa == 0.0:
            key = float(th[i])
            straight[key] = straight.get(key, 0.0) + g.length
        else:
            arcs.append((float(th[i]), float(th[i + 1]), 1.0 / g.kappa))
    return arcs, straight


def _rho_at(arcs, a, b):
    mid = 0.5 * (a + b)
    for ta, tb, rho in arcs:
        if ta <= mid <= tb:
            return rho
    raise ValueError("argument profile has a gap")


def argument_interpolate(gamma0: PCCPath, gamma1: PCCPath, s: float,
                         kappa1: float | None = None) -> PCCPath:
    """Blend two nonnegatively curved paths parametrized by tangent angle.

    Radii of curvature and straight lengths at each angle are combined
    affinely, and so are the start points.
    """
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    if gamma0.theta0 != gamma1.theta0 or abs(gamma0.theta_end - gamma1.theta_end) > 1e-12:
        raise ValueError("paths must share their initial and final tangent angles")
    for g in (gamma0, gamma1):
        if kappa1 is not None and np.max(g.kappas) > kappa1:
            raise ValueError("curvature exceeds kappa1")
    arcs0, st0 = _argument_profile(gamma0)
    arcs1, st1 = _argument_profile(gamma1)
    t_start, t_end = gamma0.theta0, gamma0.theta_end
    cuts = sorted({t_start, t_end} | {a for a, _, _ in arcs0 + arcs1}
                  | {b for _, b, _ in arcs0 + arcs1} | set(st0) | set(st1))
    cuts = [c for c in cuts if t_start <= c <= t_end]
    segs: list[Segment] = []

    def straight_at(c):
        l = (1.0 - s) * st0.get(c, 0.0) + s * st1.get(c, 0.0)
        if l > 0.0:
            segs.append(Segment(0.0, l))

    for a, b in zip(cuts, cuts[1:]):
        straight_at(a)
        if b > a:
            rho = (1.0 - s) * _rho_at(arcs0, a, b) + s * _rho_at(arcs1, a, b)
            segs.append(Segment(1.0 / rho, rho * (b - a)))
    straight_at(cuts[-1])
    start = tuple((1.0 - s) * np.array(gamma0.start) + s * np.array(gamma1.start))
    return PCCPath(start, t_start, segs)


# ---------------------------------------------------------------------------
# JSON

def curve_to_dict(gamma: PCCPath) -> dict:
    return {
        "start": [gamma.start[0], gamma.start[1]],
        "theta0": gamma.theta0,
        "segments": [{"kappa": g.kappa, "length": g.length} for g in gamma.segments],
    }


def curve_from_dict(d: dict) -> PCCPath:
    try:
        return PCCPath(tuple(d["start"]), float(d["theta0"]), d["segments"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed curve: {exc}") from exc


def load_curve(path) -> PCCPath:
    with open(path) as fh:
        return curve_from_dict(json.load(fh))


def dump_curve(gamma: PCCPath, path=None) -> str:
    text = json.dumps(curve_to_dict(gamma), indent=1)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
