"""Command-line front end.

Every verb prints JSON on stdout (``stretch`` prints a CSV table) and exits
with 0 on success, 2 on usage or domain errors and 1 on I/O errors.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from . import classify, curves, maps, stretch
from .strings import NotAString, SignString

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _pair(text: str) -> tuple[float, float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected RE,IM")
    return parts[0], parts[1]


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(obj, out=None):
    text = json.dumps(obj, allow_nan=False)
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _q_arg(p, required=True):
    p.add_argument("--q", type=_pair, required=required, metavar="RE,IM")
    p.add_argument("--theta1", type=float, required=required)


# ---------------------------------------------------------------------------
# verbs

def _cmd_classify(a):
    cls = classify.homotopy_class(curves.UTPoint(a.q, a.theta1))
    _emit(cls.to_dict())


def _cmd_regions(a):
    svg = classify.region_svg(a.theta1, k_max=a.kmax, samples=a.samples)
    if a.out is None:
        sys.stdout.write(svg + "\n")
    else:
        with open(a.out, "w") as fh:
            fh.write(svg + "\n")
        _emit({"out": a.out, "theta1": a.theta1, "kmax": a.kmax})


def _cmd_census(a):
    if len(a.basis) != 4:
        raise ValueError("--basis needs A_RE,A_IM,B_RE,B_IM")
    basis = ((a.basis[0], a.basis[1]), (a.basis[2], a.basis[3]))
    counts = classify.census(basis, a.theta1, a.radius, n_max=a.nmax)
    rows = [dict(cls.to_dict(), count=c) for cls, c in sorted(counts.items())]
    _emit({"radius": a.radius, "theta1": a.theta1, "counts": rows})


def _cmd_audit(a):
    _emit(classify.region_audit(a.theta1, k_max=a.kmax, grid=a.grid))


def _cmd_curve_analyze(a):
    gamma = curves.load_curve(a.infile)
    st = curves.curve_stats(gamma)
    cls = curves.classify_curve(gamma)
    out = {"omega": st.omega, "turning": st.theta1, "class": cls.kind}
    if cls.type is not None:
        out["type"] = str(cls.type)
    _emit(out, a.out)


def _cmd_curve_quasicrit(a):
    gamma = curves.load_curve(a.infile)
    cert = curves.quasicritical_find(gamma, a.phi, a.eps, SignString(a.sigma))
    if cert is None:
        _emit({"quasicritical": False}, a.out)
        return
    h = curves.h_map(gamma, a.phi, a.sigma, a.eps)
    _emit({
        "quasicritical": True,
        "sigma": str(cert.sigma),
        "phi": cert.phi,
        "eps": cert.eps,
        "J": [list(map(float, j)) for j in cert.J],
        "I": [list(map(float, i)) for i in cert.I],
        "h": [float(v) for v in h],
    }, a.out)


def _cmd_curve_lift(a):
    gamma = curves.load_curve(a.infile)
    Q = curves.UTPoint(a.q, a.theta1)
    phi = curves.lift_to_N(gamma, Q)
    m = curves.v_membership(gamma, phi, Q)
    _emit({"phi": phi, "V_c": m.V_c, "V_d": m.V_d,
           "V_sigma": {k: list(v) for k, v in m.V_sigma.items()}}, a.out)


def _cmd_stretch(a):
    p = stretch.StretchProblem(a.kappa0, a.b, a.r0, a.rb, a.A)
    if a.s < 0:
        raise ValueError("s must be >= 0")
    if not stretch.is_stretchable(p):
        raise ValueError("problem is not stretchable")
    c = p.b + a.s
    mu = stretch.solve_mu(p, c)
    xs = np.linspace(0.0, c, a.samples)
    fs = stretch.zeta_eval(p, mu, c, xs)
    lines = [f"# mu={mu!r}", "x,f"] + [f"{x!r},{f!r}" for x, f in zip(xs.tolist(), np.asarray(fs).tolist())]
    text = "\n".join(lines) + "\n"
    if a.out is None:
        sys.stdout.write(text)
    else:
        with open(a.out, "w") as fh:
            fh.write(text)
        _emit({"out": a.out, "mu": mu})


def _cmd_pulley(a):
    amp = math.inf if a.wide_arcs else math.pi
    p = maps.pulley_build(a.phi, a.sigma, a.offsets, a.lengths, a.kappa0, a.theta1,
                          max_amplitude=amp)
    if a.q is not None:
        p = maps.pulley_fit(p, a.q)
    _emit(curves.curve_to_dict(p.path), a.out)


def _cmd_degree(a):
    Q = curves.UTPoint(a.q, a.theta1)
    cls = classify.homotopy_class(Q)
    if cls.kind != "sphere" or cls.n < 1:
        raise ValueError(f"Q has class {cls}; degree needs E x S^n with n >= 1")
    tau = None if a.tau is None else SignString(a.tau)
    if cls.n == 1:
        _emit({"winding": maps.degree_check(Q, a.samples, tau=tau)})
    else:
        count, pts = maps.preimage_count(Q, a.grid, tau=tau)
        _emit({"preimages": count, "points": [list(p) for p in pts]})


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvespace", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="seed for any sampling randomness")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="homotopy class of the curve space for (q, theta1)")
    _q_arg(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("regions", help="SVG diagram of the regions")
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_regions)

    p = sub.add_parser("census", help="class counts over lattice points")
    p.add_argument("--basis", type=_floats, required=True, metavar="A_RE,A_IM,B_RE,B_IM")
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--nmax", type=int)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("audit", help="grid audit of the region geometry")
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--grid", type=int, default=400)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("curve", help="operations on a curve JSON file")
    csub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = csub.add_parser("analyze")
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--out")
    c.set_defaults(func=_cmd_curve_analyze)
    c = csub.add_parser("quasicrit")
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--phi", type=float, required=True)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--sigma", required=True)
    c.add_argument("--out")
    c.set_defaults(func=_cmd_curve_quasicrit)
    c = csub.add_parser("lift")
    c.add_argument("--in", dest="infile", required=True)
    _q_arg(c)
    c.add_argument("--out")
    c.set_defaults(func=_cmd_curve_lift)

    p = sub.add_parser("stretch", help="CSV table of the stretched function")
    p.add_argument("--kappa0", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--rb", type=float, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stretch)

    p = sub.add_parser("pulley", help="build (and optionally fit) a pulley curve")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--offsets", type=_floats, required=True)
    p.add_argument("--lengths", type=_floats, required=True)
    p.add_argument("--kappa0", type=float, default=0.9)
    p.add_argument("--theta1", type=float, default=0.0)
    p.add_argument("--q", type=_pair, metavar="RE,IM")
    p.add_argument("--wide-arcs", action="store_true",
                   help="allow connecting arcs of amplitude >= pi")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pulley)

    p = sub.add_parser("degree", help="winding of g o f (n = 2) or preimage count of N")
    _q_arg(p)
    p.add_argument("--samples", type=int, default=720)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tau")
    p.set_defaults(func=_cmd_degree)
    return parser


_NUMBERISH = re.compile(r"^-(\d|\.\d)")
_SIGNS = re.compile(r"^[+-]+$")

_ALIASES = {"curve-analyze": "analyze", "curve-quasicrit": "quasicrit", "curve-lift": "lift"}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    for i, tok in enumerate(argv):
        if tok in _ALIASES:
            argv[i:i + 1] = ["curve", _ALIASES[tok]]
            break
    # let numeric lists such as "--offsets -0.2,0.2" through argparse
    merged = []
    for tok in argv:
        prev = merged[-1] if merged else ""
        if prev.startswith("--") and "=" not in prev and (
                _NUMBERISH.match(tok) or (prev in ("--sigma", "--tau") and _SIGNS.match(tok))):
            merged[-1] = f"{merged[-1]}={tok}"
        else:
            merged.append(tok)
    argv = merged
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"curvespace: error: {exc}\n")
        return 2
    np.random.seed(args.seed)
    try:
        args.func(args)
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"curvespace: malformed JSON: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"curvespace: {exc}\n")
        return 1
    except (ValueError, NotAString, RuntimeError) as exc:
        sys.stderr.write(f"curvespace: error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
