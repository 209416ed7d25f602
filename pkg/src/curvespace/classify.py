"""Homotopy class of the curve space from its endpoint data.

For ``Q = (q, z)`` with ``z = e^{i theta1}`` the space is a sphere class
``E x S^n`` when ``q`` lies in one of the regions cut out by circles about
``iz - i``, ``i - iz`` and ``+-(i + iz)``:

    S^{2k}   : |q - (iz - i)| < 4k+4,  |q -+ (i + iz)| > 4k+2
    S^{2k+1} : |q - (i - iz)| > 4k+4,  |q -+ (i + iz)| < 4k+6

and contractible (``E``) otherwise.  The circles are internally tangent, so
each set of inequalities has two components; the region is the one meeting
the ray through ``1 + z``.  Working in the frame ``w = e^{i theta1/2}``
(coordinates ``u = <q, w>``, ``v = <q, iw>``) the centres sit at
``(-a, 0)``, ``(a, 0)`` and ``(0, +-c)`` with ``a = 2 sin(theta1/2)``,
``c = 2 cos(theta1/2)``, and the component is selected by
``u > (2k+1) a`` resp. ``u > (2k+3) a``.  Negative ``theta1`` is handled by
complex conjugation.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .curves import UTPoint

__all__ = [
    "HomotopyClass",
    "RegionGeometry",
    "E",
    "sphere",
    "homotopy_class",
    "classify_points",
    "raw_region_index",
    "ray_profile",
    "example_class",
    "census",
    "region_audit",
    "region_svg",
]


@dataclass(frozen=True, order=True)
class HomotopyClass:
    kind: str
    n: int | None = None

    def __post_init__(self):
        if self.kind == "E":
            if self.n is not None:
                raise ValueError("class E carries no dimension")
        elif self.kind == "sphere":
            if self.n is None or self.n < 0:
                raise ValueError("sphere class needs n >= 0")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    def __str__(self):
        return "E" if self.kind == "E" else f"E x S^{self.n}"

    def to_dict(self) -> dict:
        return {"kind": "E"} if self.kind == "E" else {"kind": "sphere", "n": self.n}


E = HomotopyClass("E")


def sphere(n: int) -> HomotopyClass:
    return HomotopyClass("sphere", int(n))


def _code_to_class(code: int) -> HomotopyClass:
    return E if code < 0 else sphere(code)


@dataclass(frozen=True)
class RegionGeometry:
    theta1: float

    def __post_init__(self):
        if not abs(self.theta1) < math.pi:
            raise ValueError("theta1 must lie in (-pi, pi)")

    @property
    def w(self) -> complex:
        return complex(math.cos(self.theta1 / 2), math.sin(self.theta1 / 2))

    @property
    def a(self) -> float:
        return 2.0 * math.sin(self.theta1 / 2)

    @property
    def c(self) -> float:
        return 2.0 * math.cos(self.theta1 / 2)

    @property
    def centers(self) -> dict:
        z = complex(math.cos(self.theta1), math.sin(self.theta1))
        return {"iz-i": 1j * z - 1j, "i-iz": 1j - 1j * z,
                "i+iz": 1j + 1j * z, "-(i+iz)": -(1j + 1j * z)}

    def circles(self, k_max: int):
        """(centre, radius, label) of every bounding circle with index <= k_max."""
        c = self.centers
        out = []
        for k in range(k_max + 1):
            out.append((c["iz-i"], 4 * k + 4, f"C{4 * k + 4}(iz-i)"))
            out.append((c["i-iz"], 4 * k + 4, f"C{4 * k + 4}(i-iz)"))
            for key in ("i+iz", "-(i+iz)"):
                out.append((c[key], 4 * k + 2, f"C{4 * k + 2}({key})"))
                out.append((c[key], 4 * k + 6, f"C{4 * k + 6}({key})"))
        return out


def _frame(x, y, theta1):
    """(u, v, a, c) with theta1 < 0 folded onto theta1 > 0 by conjugation."""
    h = 0.5 * theta1
    cw, sw = math.cos(h), math.sin(h)
    u = x * cw + y * sw
    v = -x * sw + y * cw
    return u, v, abs(2.0 * math.sin(h)), 2.0 * math.cos(h)


def _k_range(x, y):
    r = float(np.max(np.hypot(x, y))) if np.size(x) else 0.0
    return int(r / 4.0) + 2


def raw_region_index(x, y, theta1: float, k_max: int | None = None):
    """Strict region test without nudging.

    Returns ``(code, hits)``: ``code`` is n for E x S^n and -1 for E, ``hits``
    counts how many regions claim the point (more than one is a violation).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u, v, a, c = _frame(x, y, theta1)
    K = _k_range(x, y) if k_max is None else k_max
    code = np.full(x.shape, -1, dtype=int)
    hits = np.zeros(x.shape, dtype=int)
    d_m = np.hypot(u + a, v)     # to iz - i
    d_p = np.hypot(u - a, v)     # to i - iz
    d_up = np.hypot(u, v - c)    # to i + iz
    d_dn = np.hypot(u, v + c)    # to -(i + iz)
    d_perp = np.minimum(d_up, d_dn)
    d_perp_max = np.maximum(d_up, d_dn)
    for k in range(K + 1):
        even = (d_m < 4 * k + 4) & (d_perp > 4 * k + 2) & (u > (2 * k + 1) * a)
        odd = (d_p > 4 * k + 4) & (d_perp_max < 4 * k + 6) & (u > (2 * k + 3) * a)
        code = np.where(even, 2 * k, code)
        code = np.where(odd, 2 * k + 1, code)
        hits += even.astype(int) + odd.astype(int)
    return code, hits


def _boundary_mask(x, y, theta1, tol):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u, v, a, c = _frame(x, y, theta1)
    K = _k_range(x, y)
    scale = tol * (1.0 + np.hypot(x, y))
    d = [np.hypot(u + a, v), np.hypot(u - a, v), np.hypot(u, v - c), np.hypot(u, v + c)]
    mask = np.zeros(x.shape, dtype=bool)
    for k in range(K + 1):
        for r in (4 * k + 2, 4 * k + 4, 4 * k + 6):
            for dd in d:
                mask |= np.abs(dd - r) <= scale
        for m in (2 * k + 1, 2 * k + 3):
            if a > 0.0:
                mask |= np.abs(u - m * a) <= scale
    return mask


def _nudged_code(x, y, theta1, tol):
    zx, zy = 1.0 + math.cos(theta1), math.sin(theta1)
    delta = 1e-6 * (1.0 + math.hypot(x, y))
    prev = None
    for _ in range(60):
        cur = int(raw_region_index(x - delta * zx, y - delta * zy, theta1)[0])
        if cur == prev:
            return cur
        prev = cur
        delta *= 0.5
    raise RuntimeError(f"nudge rule did not stabilise at q=({x!r}, {y!r})")


def classify_points(x, y, theta1: float, tol: float = 1e-9) -> np.ndarray:
    """Vectorized class codes (n for E x S^n, -1 for E) with the nudge rule."""
    RegionGeometry(theta1)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    code, _ = raw_region_index(x, y, theta1)
    on = _boundary_mask(x, y, theta1, tol)
    for idx in zip(*np.nonzero(on)):
        code[idx] = _nudged_code(float(x[idx]), float(y[idx]), theta1, tol)
    return code


def homotopy_class(Q: UTPoint, tol: float = 1e-9) -> HomotopyClass:
    """E or E x S^n for the endpoint data ``Q``.

    Points within ``tol * (1 + |q|)`` of a bounding circle are classified as
    ``q - delta (1 + z)`` with delta halved from ``1e-6 (1 + |q|)`` until two
    consecutive verdicts agree.
    """
    if not isinstance(Q, UTPoint):
        Q = UTPoint(*Q)
    code = classify_points(Q.q[0], Q.q[1], Q.theta1, tol)[0]
    return _code_to_class(int(code))


def example_class(x: float) -> HomotopyClass:
    """Closed-form class of ((x, 0), theta1 = 0).

    E for x <= 0; E x S^{2k} for x/4 in (sqrt(k^2+k), k+1];
    E x S^{2k+1} for x/4 in (k+1, sqrt(k^2+3k+2)].
    """
    if x <= 0:
        return E
    t = x / 4.0
    k = 0
    while True:
        if t <= k + 1:
            return sphere(2 * k)
        if t <= math.sqrt(k * k + 3 * k + 2):
            return sphere(2 * k + 1)
        k += 1


def ray_profile(theta1: float, t_max: float):
    """Classes along the ray ``t e^{i theta1/2}``, ``t > 0``.

    A list of half-open intervals ``(lo, hi, cls)`` meaning ``lo < t <= hi``,
    contiguous from 0 up to ``t_max``.
    """
    g = RegionGeometry(theta1)
    a, c = abs(g.a), g.c
    out = []
    cursor = 0.0
    k = 0
    while cursor < t_max:
        pieces = [
            (math.sqrt((4 * k + 2) ** 2 - c * c), 4 * k + 4 - a, sphere(2 * k)),
            (4 * k + 4 + a, math.sqrt((4 * k + 6) ** 2 - c * c), sphere(2 * k + 1)),
        ]
        for lo, hi, cls in pieces:
            if lo > cursor:
                out.append((cursor, lo, E))
            out.append((lo, hi, cls))
            cursor = hi
        k += 1
    trimmed = []
    for lo, hi, cls in out:
        if lo >= t_max:
            break
        trimmed.append((lo, min(hi, t_max), cls))
    return trimmed


def _lattice_points(basis, radius):
    A = np.array(basis[0], dtype=float)
    B = np.array(basis[1], dtype=float)
    det = A[0] * B[1] - A[1] * B[0]
    if abs(det) <= 1e-12 * np.linalg.norm(A) * np.linalg.norm(B):
        raise ValueError("degenerate lattice")
    mmax = int(math.ceil(radius * np.linalg.norm(B) / abs(det)))
    nmax = int(math.ceil(radius * np.linalg.norm(A) / abs(det)))
    m, n = np.meshgrid(np.arange(-mmax, mmax + 1), np.arange(-nmax, nmax + 1), indexing="ij")
    P = m.ravel()[:, None] * A + n.ravel()[:, None] * B
    keep = np.hypot(P[:, 0], P[:, 1]) <= radius
    return P[keep]


def census(basis, theta1: float, radius: float, n_max: int | None = None) -> Counter:
    """Class counts of ``(p, theta1)`` over lattice points ``|p| <= radius``.

    With ``n_max`` given, sphere classes above it are left out of the count.
    """
    P = _lattice_points(basis, radius)
    codes = classify_points(P[:, 0], P[:, 1], theta1)
    counts = Counter(_code_to_class(int(c)) for c in codes)
    if n_max is not None:
        counts = Counter({k: v for k, v in counts.items() if k.kind == "E" or k.n <= n_max})
    return counts


def region_audit(theta1: float, k_max: int = 3, grid: int = 400, extent: float | None = None,
                 ray_samples: int = 10_000) -> dict:
    """Grid checks of the region geometry.

    ``overlaps``: grid points claimed by two regions; ``asymmetric``: points
    whose class changes under reflection in the line through 0 and 1 + z;
    ``ray_mismatch``: ray samples where the classifier disagrees with
    :func:`ray_profile`; ``limit_mismatch``: ray samples where the profile at
    theta1 = 1e-9 disagrees with the closed-form example at theta1 = 0.
    """
    RegionGeometry(theta1)
    X = 4 * k_max + 8 if extent is None else extent
    xs = np.linspace(-X, X, grid)
    gx, gy = np.meshgrid(xs, xs)
    gx, gy = gx.ravel(), gy.ravel()
    _, hits = raw_region_index(gx, gy, theta1, k_max + 1)
    overlaps = int(np.sum(hits > 1))

    codes = classify_points(gx, gy, theta1)
    h = 0.5 * theta1
    # reflection in the line spanned by e^{i theta1/2}: q -> w^2 conj(q)
    c2, s2 = math.cos(2 * h), math.sin(2 * h)
    rx = c2 * gx + s2 * gy
    ry = s2 * gx - c2 * gy
    rcodes = classify_points(rx, ry, theta1)
    asymmetric = int(np.sum(codes != rcodes))

    t_max = 4 * k_max + 8
    ts = (np.arange(ray_samples) + 0.5) * (t_max / ray_samples)
    prof = ray_profile(theta1, t_max)
    expect = np.array([_profile_lookup(prof, t) for t in ts])
    ray_codes = classify_points(ts * math.cos(h), ts * math.sin(h), theta1)
    ray_mismatch = int(np.sum(ray_codes != expect))

    prof0 = ray_profile(1e-9, t_max)
    lim = np.array([_profile_lookup(prof0, t) for t in ts])
    ex = np.array([_class_code(example_class(t)) for t in ts])
    limit_mismatch = int(np.sum(lim != ex))

    report = {
        "theta1": theta1,
        "k_max": k_max,
        "grid": grid,
        "overlaps": overlaps,
        "asymmetric": asymmetric,
        "ray_mismatch": ray_mismatch,
        "limit_mismatch": limit_mismatch,
    }
    report["ok"] = not (overlaps or asymmetric or ray_mismatch or limit_mismatch)
    return report


def _class_code(cls: HomotopyClass) -> int:
    return -1 if cls.kind == "E" else cls.n


def _profile_lookup(prof, t):
    for lo, hi, cls in prof:
        if lo < t <= hi:
            return _class_code(cls)
    return -1


_PALETTE = ["#d8e6f3", "#f6d5c1", "#cfe8cf", "#eadcf2", "#f4ecc2", "#cde7e7",
            "#f2cfdc", "#dfe3c6", "#c9d3ee", "#efd9c9"]


def region_svg(theta1: float, k_max: int = 3, width: int = 600, samples: int = 200) -> str:
    """SVG drawing of the shaded regions, the bounding circles and the ray."""
    g = RegionGeometry(theta1)
    X = 4 * k_max + 8
    scale = width / (2.0 * X)

    def sx(x):
        return (x + X) * scale

    def sy(y):
        return (X - y) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{width}" '
        f'viewBox="0 0 {width} {width}">',
        f"<title>{escape(f'regions for theta1={theta1:.6g}')}</title>",
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
        '<g id="shading" stroke="none">',
    ]
    cell = 2.0 * X / samples
    centres = -X + cell * (np.arange(samples) + 0.5)
    gx, gy = np.meshgrid(centres, centres)
    codes = classify_points(gx.ravel(), gy.ravel(), theta1).reshape(gx.shape)
    for i in range(samples):
        for j in range(samples):
            code = codes[i, j]
            if code < 0:
                continue
            x0 = gx[i, j] - cell / 2
            y1 = gy[i, j] + cell / 2
            parts.append(
                f'<rect x="{sx(x0):.3f}" y="{sy(y1):.3f}" width="{cell * scale + 0.05:.3f}" '
                f'height="{cell * scale + 0.05:.3f}" fill="{_PALETTE[code % len(_PALETTE)]}" '
                f'data-class="{code}"/>')
    parts.append("</g>")
    parts.append('<g id="circles" fill="none" stroke="#333" stroke-width="0.8">')
    for centre, r, label in g.circles(k_max):
        parts.append(f'<circle cx="{sx(centre.real):.3f}" cy="{sy(centre.imag):.3f}" '
                     f'r="{r * scale:.3f}" data-label="{escape(label)}"/>')
    parts.append("</g>")
    parts.append('<g id="labels" font-size="9" font-family="sans-serif" fill="#222">')
    for centre, r, label in g.circles(k_max):
        if label.endswith("(iz-i)") or label.endswith("(i+iz)"):
            px, py = centre.real, centre.imag + r
            parts.append(f'<text x="{sx(px):.2f}" y="{sy(py) - 2:.2f}">{r}</text>')
    parts.append("</g>")
    w = g.w
    parts.append(f'<line id="ray" x1="{sx(0):.3f}" y1="{sy(0):.3f}" '
                 f'x2="{sx(X * w.real * 1.5):.3f}" y2="{sy(X * w.imag * 1.5):.3f}" '
                 'stroke="#b00" stroke-width="1.2"/>')
    parts.append("</svg>")
    return "\n".join(parts)
