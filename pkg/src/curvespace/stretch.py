"""Envelope functions, the median function zeta and the stretching solver.

Everything here works in the variable ``u = sin(theta)`` where the sampled
function is ``f = tan(theta)``.  The curvature bound
``|f'| <= kappa0 (1 + f^2)^(3/2)`` reads ``|u'| <= kappa0`` in that variable,
so the extremal solutions are straight lines in ``u``:

    g+(x) : u = u0 + kappa0 x          g-(x) : u = u0 - kappa0 x
    h+(x) : u = ub + kappa0 (c - x)    h-(x) : u = ub - kappa0 (c - x)

and ``f = u / sqrt(1 - u^2)``, which is +inf/-inf once ``|u| >= 1``.
Because ``u -> tan(asin u)`` is increasing, medians can be taken in ``u``.
A function whose ``u`` is piecewise linear integrates exactly with the
primitive ``-sqrt(1 - u^2) / slope``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import bisect

__all__ = [
    "StretchProblem",
    "Envelope",
    "ZetaCurve",
    "BRANCHES",
    "slope_to_u",
    "u_to_slope",
    "envelope_eval",
    "lambda_range",
    "is_stretchable",
    "zeta_eval",
    "zeta_pieces",
    "zeta_plateau",
    "integral_zeta",
    "integral_sampled",
    "solve_mu",
    "sandwich_bounds",
    "check_admissible",
    "stretch_function",
    "StretchResult",
    "plateau_length",
    "with_area",
]

BRANCHES = ("g+", "g-", "h+", "h-")
_MU_TOL = 1e-12


@dataclass(frozen=True)
class StretchProblem:
    """Boundary data (kappa0, b, r0, rb, A) of a stretching problem."""

    kappa0: float
    b: float
    r0: float
    rb: float
    A: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.kappa0 < 1.0:
            raise ValueError("kappa0 must lie in (0, 1)")
        if not self.b > 0.0:
            raise ValueError("b must be positive")

    @property
    def u0(self) -> float:
        return slope_to_u(self.r0)

    @property
    def ub(self) -> float:
        return slope_to_u(self.rb)


def slope_to_u(r: float) -> float:
    """sin(atan(r)); maps +-inf to +-1."""
    if math.isinf(r):
        return math.copysign(1.0, r)
    return r / math.sqrt(1.0 + r * r)


def u_to_slope(u):
    """tan(asin(u)) with +-inf for |u| >= 1.  Works on scalars and arrays."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = u / np.sqrt(1.0 - u * u)
    out = np.where(u >= 1.0, np.inf, np.where(u <= -1.0, -np.inf, out))
    return out[()] if out.ndim == 0 else out


def _lines(p: StretchProblem, c: float):
    """(u at x=0, slope) for g+, g-, h+, h- on [0, c]."""
    k = p.kappa0
    u0, ub = p.u0, p.ub
    return {
        "g+": (u0, k),
        "g-": (u0, -k),
        "h+": (ub + k * c, -k),
        "h-": (ub - k * c, k),
    }


def _env_u(p, branch, x, c):
    a, m = _lines(p, c)[branch]
    return np.clip(a + m * np.asarray(x, dtype=float), -1.0, 1.0)


def envelope_eval(p: StretchProblem, branch: str, x, c: float | None = None):
    """Value of g+, g-, h+ or h- at ``x`` (extended reals).

    ``c`` is the right end used by the h-branches (default ``p.b``);
    h^c is h^b shifted by c - b.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    c = p.b if c is None else c
    return u_to_slope(_env_u(p, branch, x, c))


@dataclass(frozen=True)
class Envelope:
    """One of the four extremal solutions, with its finite domain."""

    problem: StretchProblem
    branch: str
    c: float | None = None

    def __call__(self, x):
        return envelope_eval(self.problem, self.branch, x, self.c)

    @property
    def finite_domain(self) -> tuple[float, float]:
        """Open interval of x where the value is finite."""
        c = self.problem.b if self.c is None else self.c
        a, m = _lines(self.problem, c)[self.branch]
        lo, hi = sorted(((-1.0 - a) / m, (1.0 - a) / m))
        return lo, hi


def lambda_range(p: StretchProblem, c: float | None = None) -> tuple[float, float]:
    """(lambda-, lambda+): common values where g+- meets h+-^c, else +-inf.

    g+ and h+ meet where u0 + k x = ub + k (c - x), i.e. at
    u = (u0 + ub + k c) / 2; if that is >= 1 the finite parts never meet.
    """
    c = p.b if c is None else c
    k = p.kappa0
    up = 0.5 * (p.u0 + p.ub + k * c)
    um = 0.5 * (p.u0 + p.ub - k * c)
    return float(u_to_slope(um)), float(u_to_slope(up))


def is_stretchable(p: StretchProblem) -> bool:
    lo, hi = lambda_range(p)
    return lo <= 0.0 <= hi


def _check_mu(p, mu, c):
    lo, hi = lambda_range(p, c)
    if not math.isfinite(mu):
        raise ValueError("mu must be finite")
    slack = _MU_TOL * max(1.0, abs(mu))
    if mu < lo - slack or mu > hi + slack:
        raise ValueError(f"mu={mu!r} outside [{lo!r}, {hi!r}]")


def _five(p, mu, c):
    lines = _lines(p, c)
    return [lines["h-"], lines["g-"], (slope_to_u(mu), 0.0), lines["g+"], lines["h+"]]


def _zeta_u(p, mu, c, x):
    x = np.asarray(x, dtype=float)
    stack = np.stack([np.clip(a + m * x, -1.0, 1.0) for a, m in _five(p, mu, c)])
    return np.median(stack, axis=0)


def zeta_eval(p: StretchProblem, mu: float, c: float, x):
    """midd(h-^c, g-, mu, g+, h+^c) at ``x`` in [0, c]."""
    _check_mu(p, mu, c)
    return u_to_slope(_zeta_u(p, mu, c, x))


def _clip1(v: float) -> float:
    return -1.0 if v < -1.0 else (1.0 if v > 1.0 else float(v))


def zeta_pieces(p: StretchProblem, mu: float, c: float):
    """Pieces (x0, x1, u0, slope) on which zeta is affine in u."""
    _check_mu(p, mu, c)
    lines = _five(p, mu, c)
    cuts = {0.0, float(c)}
    for i, (a1, m1) in enumerate(lines):
        for a, m in lines[i + 1:]:
            if m != m1:
                cuts.add((a - a1) / (m1 - m))
        if m1 != 0.0:
            cuts.add((1.0 - a1) / m1)
            cuts.add((-1.0 - a1) / m1)
    xs = sorted(v for v in cuts if 0.0 <= v <= c)
    pieces = []
    for x0, x1 in zip(xs, xs[1:]):
        if x1 - x0 <= 0.0:
            continue
        xm = 0.5 * (x0 + x1)
        vals = [_clip1(a + m * xm) for a, m in lines]
        idx = sorted(range(5), key=vals.__getitem__)[2]
        a, m = lines[idx]
        if abs(a + m * xm) >= 1.0:
            m = 0.0
        u0 = _clip1(a + m * x0) if m else _clip1(a + m * xm)
        if pieces and pieces[-1][3] == m and abs(pieces[-1][2] + m * (x0 - pieces[-1][0]) - u0) < 1e-15:
            pieces[-1] = (pieces[-1][0], x1, pieces[-1][2], m)
        else:
            pieces.append((x0, x1, u0, m))
    return pieces


def _piece_integral(x0, x1, u0, m):
    if m == 0.0:
        return (x1 - x0) * float(u_to_slope(u0))
    u1 = u0 + m * (x1 - x0)
    return (math.sqrt(max(0.0, 1.0 - u0 * u0)) - math.sqrt(max(0.0, 1.0 - u1 * u1))) / m


def integral_zeta(p: StretchProblem, mu: float, c: float) -> float:
    """Exact integral of zeta_(mu, c) over [0, c]."""
    return math.fsum(_piece_integral(*piece) for piece in zeta_pieces(p, mu, c))


def zeta_plateau(p: StretchProblem, mu: float, c: float):
    """The closed interval zeta^{-1}(mu), or None if empty."""
    umu = slope_to_u(mu)
    hits = []
    for x0, x1, u0, m in zeta_pieces(p, mu, c):
        if m == 0.0:
            if abs(u0 - umu) <= 1e-15:
                hits += [x0, x1]
        else:
            xr = x0 + (umu - u0) / m
            if x0 - 1e-15 <= xr <= x1 + 1e-15:
                hits.append(min(max(xr, x0), x1))
    if not hits:
        return None
    return min(hits), max(hits)


def integral_sampled(x, f) -> float:
    """Integral of a sampled slope function, linear in u between samples.

    Exact for curves made of circular arcs and segments sampled at their
    junctions; otherwise a second-order rule.
    """
    x = np.asarray(x, dtype=float)
    u = np.array([slope_to_u(v) for v in np.asarray(f, dtype=float)])
    total = []
    for i in range(len(x) - 1):
        dx = x[i + 1] - x[i]
        du = u[i + 1] - u[i]
        if dx <= 0:
            continue
        if abs(du) < 1e-14 * max(1.0, dx):
            total.append(dx * float(u_to_slope(0.5 * (u[i] + u[i + 1]))))
        else:
            total.append(_piece_integral(x[i], x[i + 1], u[i], du / dx))
    return math.fsum(total)


def solve_mu(p: StretchProblem, c: float | None = None, A: float | None = None,
             mu_prev: float | None = None) -> float:
    """The unique mu with integral_zeta(p, mu, c) = A (default ``p.A``).

    Bisection on the increasing map mu -> integral, to 1e-12 in mu and at
    most 200 halvings.  ``mu_prev`` (a solution for a smaller c) gives the
    bracket [0, mu_prev] or [mu_prev, 0] when it is valid.
    """
    c = p.b if c is None else float(c)
    if c < p.b:
        raise ValueError("c must be >= b")
    A = p.A if A is None else float(A)
    lo_lam, hi_lam = lambda_range(p, c)

    def resid(mu):
        return integral_zeta(p, mu, c) - A

    # anchor at 0 when admissible, otherwise at the bracket end nearest 0
    anchor = min(max(0.0, lo_lam), hi_lam)
    r_anchor = resid(anchor)
    if r_anchor == 0.0:
        return anchor
    direction = 1.0 if r_anchor < 0 else -1.0
    end = hi_lam if direction > 0 else lo_lam
    if mu_prev is not None and math.isfinite(mu_prev) and mu_prev * direction > 0:
        if lo_lam <= mu_prev <= hi_lam and resid(mu_prev) * direction >= 0:
            end = mu_prev
    if math.isfinite(end):
        r_end = resid(end)
        if r_end * direction < 0:
            raise ValueError(f"A={A!r} is outside the attainable range at c={c!r}")
    else:
        end = anchor + direction
        r_end = resid(end)
        while r_end * direction < 0:
            end = anchor + 2.0 * (end - anchor)
            if abs(end) > 1e300:
                raise ValueError(f"A={A!r} is not attainable")
            r_end = resid(end)
    if r_end == 0.0:
        return end
    lo, hi = sorted((anchor, end))
    return float(bisect(resid, lo, hi, xtol=_MU_TOL, maxiter=200, disp=False))


def sandwich_bounds(p: StretchProblem, x):
    """(lambda-, max(g-, h-), min(g+, h+), lambda+) evaluated on ``x``."""
    x = np.asarray(x, dtype=float)
    lo = np.maximum(envelope_eval(p, "g-", x), envelope_eval(p, "h-", x))
    hi = np.minimum(envelope_eval(p, "g+", x), envelope_eval(p, "h+", x))
    lam_lo, lam_hi = lambda_range(p)
    return lam_lo, lo, hi, lam_hi


def check_admissible(p: StretchProblem, x, f, tol: float = 1e-6, atol_A: float = 1e-6):
    """Raise ValueError unless the samples satisfy the boundary data and bound."""
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if x.ndim != 1 or x.shape != f.shape or x.size < 2:
        raise ValueError("x and f must be matching 1-d arrays")
    if abs(x[0]) > 1e-12 or abs(x[-1] - p.b) > 1e-9 * max(1.0, p.b) or np.any(np.diff(x) <= 0):
        raise ValueError("samples must increase from 0 to b")
    if abs(f[0] - p.r0) > 1e-9 * max(1.0, abs(p.r0)) or abs(f[-1] - p.rb) > 1e-9 * max(1.0, abs(p.rb)):
        raise ValueError("boundary values do not match r0, rb")
    u = np.array([slope_to_u(v) for v in f])
    rate = np.abs(np.diff(u)) / np.diff(x)
    if np.any(rate > p.kappa0 + tol):
        raise ValueError(f"curvature bound violated (max |u'|={rate.max():.6g})")
    area = integral_sampled(x, f)
    if abs(area - p.A) > atol_A * max(1.0, abs(p.A)):
        raise ValueError(f"integral {area!r} differs from A={p.A!r}")


@dataclass(frozen=True)
class ZetaCurve:
    """zeta_(mu, c) for a problem, with its plateau."""

    problem: StretchProblem
    mu: float
    c: float

    def __call__(self, x):
        return zeta_eval(self.problem, self.mu, self.c, x)

    @property
    def plateau(self):
        return zeta_plateau(self.problem, self.mu, self.c)

    @property
    def pieces(self):
        return zeta_pieces(self.problem, self.mu, self.c)

    def integral(self) -> float:
        return integral_zeta(self.problem, self.mu, self.c)


@dataclass(frozen=True)
class StretchResult:
    x: np.ndarray
    f: np.ndarray
    mu: float
    curve: ZetaCurve = field(repr=False)


def stretch_function(p: StretchProblem, x, f, s: float, samples: int = 201,
                     tol: float = 1e-6) -> StretchResult:
    """f_s = zeta_(mu(b+s), b+s), sampled on ``samples`` points of [0, b+s].

    ``x, f`` are samples of the admissible starting function; they are only
    checked (bound, boundary values, integral), since f_s depends on the
    boundary data alone.  s = 0 gives the flattened function f_0.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    check_admissible(p, x, f, tol=tol)
    if not is_stretchable(p):
        raise ValueError("problem is not stretchable")
    c = p.b + s
    mu = solve_mu(p, c)
    curve = ZetaCurve(p, mu, c)
    xs = np.linspace(0.0, c, samples)
    return StretchResult(xs, np.asarray(curve(xs), dtype=float), mu, curve)


def plateau_length(p: StretchProblem, s: float) -> float:
    """Length of {f_s = mu(b+s)} for the stretched function."""
    c = p.b + s
    mu = solve_mu(p, c)
    pl = zeta_plateau(p, mu, c)
    return 0.0 if pl is None else pl[1] - pl[0]


def with_area(p: StretchProblem, A: float) -> StretchProblem:
    return replace(p, A=float(A))
