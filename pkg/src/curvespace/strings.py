"""Sign strings and the odd/even bead calculus on R^n.

A point ``x`` of R^n is read as ``n`` beads on vertical wires; bead ``k``
(1-based) carries the tag ``-`` when ``k`` is odd and ``+`` when ``k`` is
even, so the tag of bead ``k`` is ``(-1)**k``.  Comparing odd against even
heights splits R^n into the mixed, split and level sets; level points are
further sorted by the reduced string of tags found at the common height.

Signs are stored as tuples of ``+1``/``-1``.  Text form uses ``+``/``-``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "NotAString",
    "SignString",
    "ExtendedString",
    "StringChain",
    "BeadVerdict",
    "reduce_string",
    "is_substring",
    "bead_tag",
    "t_value",
    "classify_bead_point",
    "cell_of",
    "nested_membership",
    "collapse_map",
    "fiber_point",
    "level_split_factorization",
    "level_split_inverse",
    "boundary_approach",
]


class NotAString(ValueError):
    """Raised when a sequence of signs does not reduce to a sign string."""


def _parse_signs(signs) -> tuple[int, ...]:
    if isinstance(signs, (SignString, ExtendedString)):
        return signs.signs
    if isinstance(signs, str):
        out = []
        for ch in signs:
            if ch == "+":
                out.append(1)
            elif ch in "-−":
                out.append(-1)
            else:
                raise ValueError(f"invalid sign character {ch!r}")
        return tuple(out)
    out = []
    for s in signs:
        if s in (1, "+", True):
            out.append(1)
        elif s in (-1, "-", "−"):
            out.append(-1)
        else:
            raise ValueError(f"invalid sign {s!r}")
    return tuple(out)


def _text(signs: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


@dataclass(frozen=True)
class ExtendedString:
    """A sequence over {+,-} of length at least 2; repetitions allowed."""

    signs: tuple[int, ...]

    def __init__(self, signs):
        parsed = _parse_signs(signs)
        if len(parsed) < 2:
            raise ValueError("an extended string has length >= 2")
        object.__setattr__(self, "signs", parsed)

    def __len__(self):
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)

    def __str__(self):
        return _text(self.signs)

    def __repr__(self):
        return f"{type(self).__name__}({_text(self.signs)!r})"

    def __neg__(self):
        return type(self)(tuple(-s for s in self.signs))

    def sign(self, k: int) -> int:
        """Sign at 1-based position ``k``."""
        if not 1 <= k <= len(self.signs):
            raise IndexError(k)
        return self.signs[k - 1]


@dataclass(frozen=True, repr=False)
class SignString(ExtendedString):
    """An alternating sequence over {+,-} of length at least 2."""

    def __init__(self, signs):
        parsed = _parse_signs(signs)
        if len(parsed) < 2:
            raise NotAString("a sign string has length >= 2")
        if any(a == b for a, b in zip(parsed, parsed[1:])):
            raise NotAString(f"{_text(parsed)!r} does not alternate")
        object.__setattr__(self, "signs", parsed)

    @classmethod
    def standard(cls, m: int) -> "SignString":
        """The string sigma^m with sigma^m(j) = (-1)^j, e.g. ``-+-`` for m=3."""
        return cls(tuple((-1) ** j for j in range(1, m + 1)))


def _signs_of(s) -> tuple[int, ...]:
    return _parse_signs(s)


def reduce_string(tau) -> SignString:
    """Drop repetitions: the longest sign string that is a substring of ``tau``.

    Raises NotAString when fewer than two distinct runs remain.
    """
    signs = _signs_of(tau)
    out: list[int] = []
    for s in signs:
        if not out or out[-1] != s:
            out.append(s)
    return SignString(out)


def _reduced_or_none(signs: Sequence[int]):
    out: list[int] = []
    for s in signs:
        if not out or out[-1] != s:
            out.append(s)
    return tuple(out) if len(out) >= 2 else None


def is_substring(sub, sup) -> bool:
    """Order-preserving embedding test, by greedy left-to-right matching."""
    a, b = _signs_of(sub), _signs_of(sup)
    i = 0
    for s in b:
        if i < len(a) and a[i] == s:
            i += 1
    return i == len(a)


def bead_tag(k: int) -> int:
    """Tag of bead ``k`` (1-based): ``-1`` for odd, ``+1`` for even."""
    return -1 if k % 2 else 1


def _as_point(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("a bead point is a vector with n >= 2 coordinates")
    return arr


def t_value(x) -> float:
    """min over odd k and even k' of x_k - x_k' (1-based parity)."""
    arr = _as_point(x)
    return float(arr[0::2].min() - arr[1::2].max())


@dataclass(frozen=True)
class BeadVerdict:
    """Outcome of the mixed/level/split test.

    ``kind`` is one of ``"mixed"``, ``"split"``, ``"level"``.  For level
    points ``e`` is the elevation and ``type`` the level type.
    """

    kind: str
    t: float
    e: float | None = None
    type: SignString | None = None


def classify_bead_point(x) -> BeadVerdict:
    arr = _as_point(x)
    t = t_value(arr)
    if t < 0:
        return BeadVerdict("mixed", t)
    if t > 0:
        return BeadVerdict("split", t)
    # t == 0: the lowest odd bead sits level with the highest even bead
    e = float(arr[0::2].min())
    tags = [bead_tag(k) for k in range(1, arr.size + 1) if arr[k - 1] == e]
    reduced = _reduced_or_none(tags)
    assert reduced is not None, "both parities must touch the elevation"
    return BeadVerdict("level", 0.0, e, SignString(reduced))


def cell_of(x) -> tuple[frozenset, ...]:
    """Level sets of ``x`` (1-based indices) ordered by increasing value.

    Ties are exact; round beforehand if a tolerance is wanted.
    """
    arr = _as_point(x)
    values = sorted(set(arr.tolist()))
    return tuple(
        frozenset(int(k) + 1 for k in np.flatnonzero(arr == v)) for v in values
    )


@dataclass(frozen=True)
class StringChain:
    """A chain sigma_1 < ... < sigma_m with heights eps_1 < ... < eps_m.

    All members but the last must be sign strings; the last may be an
    extended string.  Heights default to 1, ..., m.
    """

    strings: tuple
    thresholds: tuple[float, ...] = field(default=())

    def __init__(self, strings, thresholds=None):
        if isinstance(strings, (str, ExtendedString)):
            strings = [strings]
        items = list(strings)
        if not items:
            raise ValueError("empty chain")
        parsed = [SignString(s) for s in items[:-1]]
        last = _signs_of(items[-1])
        try:
            parsed.append(SignString(last))
        except NotAString:
            parsed.append(ExtendedString(last))
        for a, b in zip(parsed, parsed[1:]):
            if not is_substring(a, b):
                raise ValueError(f"{a} is not a substring of {b}")
        if thresholds is None:
            thresholds = tuple(float(j) for j in range(1, len(parsed) + 1))
        thresholds = tuple(float(v) for v in thresholds)
        if len(thresholds) != len(parsed):
            raise ValueError("one threshold per string is required")
        if thresholds[0] <= 0 or any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("thresholds must be positive and strictly increasing")
        object.__setattr__(self, "strings", tuple(parsed))
        object.__setattr__(self, "thresholds", thresholds)

    @property
    def m(self) -> int:
        return len(self.strings)

    @property
    def top(self):
        return self.strings[-1]

    @property
    def n(self) -> int:
        return len(self.strings[-1])


def _le(a, b, strict):
    return a < b if strict else a <= b


def _tags_reduce_to(mask: np.ndarray, top: Sequence[int], target) -> bool:
    tags = [top[k] for k in np.flatnonzero(mask)]
    red = _reduced_or_none(tags)
    return red is not None and red == tuple(target.signs)


def nested_membership(x, chain: StringChain, variant: str = "plain",
                      strict: bool = False) -> bool:
    """Membership of ``x`` in the nested-string spaces.

    variant
        ``"plain"``: sigma_m(k) x_k <= 0 for all k, plus the height
        conditions.  ``"diffuse"``: some pair of opposite tags with
        sigma_m(k) x_k > 0, plus the height conditions.  ``"band"``: the
        two-string space where |x_k| <= eps_1 and the zero coordinates carry
        the reduced string sigma_1.
    strict
        Replace the weak inequalities of the sign and height conditions by
        strict ones.
    """
    arr = np.asarray(x, dtype=float)
    top = chain.top.signs
    if arr.ndim != 1 or arr.size != len(top):
        raise ValueError(f"dimension mismatch: |x|={arr.size}, |sigma_m|={len(top)}")
    sx = np.asarray(top, dtype=float) * arr
    if variant == "band":
        if chain.m != 2:
            raise ValueError("the band space is defined for two-string chains")
        if not np.all(_le(sx, 0.0, strict)):
            return False
        if not np.all(_le(np.abs(arr), chain.thresholds[0], strict)):
            return False
        return _tags_reduce_to(arr == 0.0, top, chain.strings[0])
    if variant == "plain":
        if not np.all(_le(sx, 0.0, strict)):
            return False
    elif variant == "diffuse":
        pos = sx > 0
        if not (np.any(pos & (np.asarray(top) > 0)) and np.any(pos & (np.asarray(top) < 0))):
            return False
    else:
        raise ValueError(f"unknown variant {variant!r}")
    absx = np.abs(arr)
    if not np.all(_le(absx, chain.thresholds[-1], strict)):
        return False
    for sig, eps in zip(chain.strings[:-1], chain.thresholds[:-1]):
        if not _tags_reduce_to(_le(absx, eps, strict), top, sig):
            return False
    return True


def collapse_map(x, chain: StringChain) -> np.ndarray:
    """Collapse everything between heights -eps_{m-1} and eps_{m-1}.

    y_k = -sigma_m(k) * max(|x_k| - eps_{m-1}, 0); with a single string the
    collapse height is 0.
    """
    arr = np.asarray(x, dtype=float)
    if not nested_membership(arr, chain):
        raise ValueError("x does not satisfy the plain membership conditions")
    h = chain.thresholds[-2] if chain.m >= 2 else 0.0
    top = np.asarray(chain.top.signs, dtype=float)
    return -top * np.maximum(np.abs(arr) - h, 0.0)


def fiber_point(x, chain: StringChain):
    """Delete the coordinates above the collapse height.

    Returns ``(reduced_chain, point)`` where the reduced chain is
    ``(sigma_1, ..., sigma_{m-2}, tau)`` with ``tau`` the tags of the kept
    coordinates.  Requires ``m >= 2``.
    """
    if chain.m < 2:
        raise ValueError("the fiber map needs at least two strings")
    arr = np.asarray(x, dtype=float)
    h = chain.thresholds[-2]
    keep = np.abs(arr) <= h
    tau = [chain.top.signs[k] for k in np.flatnonzero(keep)]
    sub = StringChain(list(chain.strings[:-2]) + [tau], chain.thresholds[:-1])
    return sub, arr[keep]


def level_split_factorization(x):
    """Split ``x`` into a level point and the offset t(x)/2.

    Returns ``(l, tbar)`` with l_k = x_k + (-1)^k tbar.
    """
    arr = _as_point(x)
    tbar = 0.5 * t_value(arr)
    k = np.arange(1, arr.size + 1)
    return arr + np.where(k % 2 == 0, 1.0, -1.0) * tbar, tbar


def level_split_inverse(level, t: float) -> np.ndarray:
    """Inverse of the factorization: h(l, t)_k = l_k + (-1)^(k-1) t."""
    arr = _as_point(level)
    k = np.arange(1, arr.size + 1)
    return arr + np.where(k % 2 == 1, 1.0, -1.0) * t


def boundary_approach(x, sigma, s: float) -> np.ndarray:
    """Move surplus level beads off the elevation so the type drops to ``sigma``.

    The kept beads are matched to ``sigma`` greedily from the right, so the
    leftmost surplus beads are the ones moved; bead k moves by
    (-1)^(k-1) s (odd beads up, even beads down).
    """
    arr = _as_point(x)
    verdict = classify_bead_point(arr)
    if verdict.kind != "level":
        raise ValueError("x is not a level point")
    sig = SignString(sigma)
    if not is_substring(sig, verdict.type):
        raise ValueError(f"{sig} is not a substring of the level type {verdict.type}")
    if s == 0:
        return arr.copy()
    at_e = [k for k in range(1, arr.size + 1) if arr[k - 1] == verdict.e]
    kept: list[int] = []
    j = len(sig) - 1
    for k in reversed(at_e):
        if j >= 0 and bead_tag(k) == sig.signs[j]:
            kept.append(k)
            j -= 1
    assert j < 0, "a substring always admits a matching"
    moved = [k for k in at_e if k not in kept]
    out = arr.copy()
    for k in moved:
        out[k - 1] += (1.0 if k % 2 == 1 else -1.0) * s
    return out
