"""Command-line front end.

    multroot rank --matrix M.txt
    multroot deflate SYSTEM --point -0.01,0.02 [--radius 0.25] [--order 8]
    multroot newton SYSTEM --point ... [--max-iters 30] [--tol 1e-14]
    multroot certify SYSTEM --point ... [--at-root]
    multroot multiplicity SYSTEM --point 0,0 [--cap 12]

Exit status: 0 on success, 2 on a negative outcome (smallness failed,
depth exceeded, Newton not converged, certificate verdict false, oracle
not stabilized), 1 on usage, input or numerical errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .bergman import BallContext
from .deflation import COMPLETED, DeflationError, DeflationTrace, Level
from .multiplicity import DEFAULT_CAP, MultiplicityError, multiplicity
from .newton import certify_singular, singular_newton
from .numrank import RankProfile, numerical_rank
from .parse import ParseError, parse_complex, parse_system
from .poly import NotAUnitError, format_terms

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------

def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([parse_complex(t) for t in text.split(",")], dtype=complex)
    except ValueError:
        raise UsageError(f"cannot read point {text!r}; expected comma-separated re or re+imi") from None


def parse_rows(text: str):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"cannot read rows {text!r}; expected comma-separated integers") from None


def read_matrix(text: str) -> np.ndarray:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([parse_complex(tok) for tok in line.split()])
        except ValueError as exc:
            raise ParseError(f"bad matrix entry ({exc})", lineno, 1) from None
        if len(rows[-1]) != len(rows[0]):
            raise ParseError("rows have different lengths", lineno, 1)
    if not rows:
        raise ParseError("empty matrix", 1, 1)
    return np.array(rows, dtype=complex)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------

def _num(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) else x


def _cplx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _vec(v) -> list:
    return [_cplx(z) for z in np.asarray(v).ravel()]


def _terms(t) -> list:
    return [{"exp": list(e), "coef": _cplx(c)} for e, c in t.items()]


def profile_json(p: RankProfile) -> dict:
    return {
        "sigma": list(p.sigma),
        "s_sums": list(p.s_sums),
        "records": [{"m": r.m, "b": r.b, "g": r.g, "a": r.a} for r in p.records],
        "chosen_m": p.chosen_m,
        "epsilon": p.epsilon,
        "rank": p.rank,
        "exact_rank": p.exact_rank,
        "consistent": p.consistent,
    }


def level_json(k: int, lv: Level) -> dict:
    s = lv.smallness
    return {
        "level": k,
        "order": lv.system.order,
        "norm": s.norm_f,
        "value": _vec(lv.system.constants()),
        "value_norm": s.value_norm,
        "eta": s.eta,
        "small": s.small,
        "cond1": s.cond1,
        "rank_profile": profile_json(lv.profile),
        "row_perm": None if lv.row_perm is None else list(lv.row_perm),
        "col_perm": None if lv.col_perm is None else list(lv.col_perm),
        "series": [_terms(t) for t in lv.system.series],
    }


def trace_json(t: DeflationTrace) -> dict:
    return {
        "status": t.status,
        "thickness": t.thickness,
        "failed_level": t.failed_level,
        "order": t.order,
        "radius": t.radius,
        "center": _vec(t.levels[0].system.center),
        "levels": [level_json(k, lv) for k, lv in enumerate(t.levels)],
        "selected_rows": None if t.selected_rows is None else list(t.selected_rows),
        "deflated": None if t.deflated is None else [_terms(s) for s in t.deflated.series],
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


# ---------------------------------------------------------------------------
# text reports
# ---------------------------------------------------------------------------

def _fmt_vec(v) -> str:
    parts = []
    for z in np.asarray(v).ravel():
        parts.append(f"{z.real:.6g}" if z.imag == 0 else f"{z.real:.6g}{z.imag:+.6g}i")
    return "(" + ", ".join(parts) + ")"


def profile_text(p: RankProfile) -> List[str]:
    out = ["sigma   " + " ".join(f"{s:.6g}" for s in p.sigma)]
    for r in p.records:
        out.append(f"m={r.m}  b={r.b:.6g}  g={r.g:.6g}  a={r.a:.6g}")
    out.append(f"rank {p.rank}  epsilon {p.epsilon:.6g}  chosen m {p.chosen_m}")
    if not p.consistent:
        out.append("warning: chosen m is below n minus the count of nonzero singular values")
    return out


def trace_text(t: DeflationTrace, names) -> List[str]:
    out = []
    for k, lv in enumerate(t.levels):
        s = lv.smallness
        out.append(f"level {k}: order {lv.system.order}  norm {s.norm_f:.4g}  "
                   f"|F(x0)| {s.value_norm:.4g}  eta {s.eta:.4g}  small {s.small}  "
                   f"rank {lv.rank}  epsilon {lv.epsilon:.4g}")
    out.append(f"status {t.status}")
    if t.status == COMPLETED:
        out.append(f"thickness {t.thickness}  rows {list(t.selected_rows)}")
        for k, s in enumerate(t.deflated.series):
            out.append(f"  g{k + 1} = {format_terms(s, ['u_' + v for v in names])}")
    else:
        out.append(f"failed at level {t.failed_level}; try a larger --order or another --radius")
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _system_and_point(args):
    f = parse_system(_read(args.system))
    x0 = parse_point(args.point)
    if x0.size != f.n_vars:
        raise UsageError(f"point has {x0.size} components but the system has {f.n_vars} variables")
    return f, x0


def _check_numbers(args):
    if getattr(args, "radius", 1.0) <= 0:
        raise UsageError("--radius must be positive")
    if getattr(args, "order", 1) < 1:
        raise UsageError("--order must be >= 1")


def cmd_rank(args):
    M = read_matrix(_read(args.matrix))
    p = numerical_rank(M)
    if args.json:
        return EXIT_OK, dumps({"command": "rank", "shape": list(M.shape), **profile_json(p)})
    return EXIT_OK, "\n".join(profile_text(p))


def cmd_deflate(args):
    f, x0 = _system_and_point(args)
    from .deflation import deflation_sequence
    t = deflation_sequence(f, x0, args.radius, args.order, args.max_depth,
                           pivot=args.pivot, select=args.rows)
    code = EXIT_OK if t.status == COMPLETED else EXIT_NEGATIVE
    if args.json:
        return code, dumps({"command": "deflate", **trace_json(t)})
    return code, "\n".join(trace_text(t, f.var_names))


def cmd_newton(args):
    f, x0 = _system_and_point(args)
    run = singular_newton(f, x0, args.radius, args.order, args.max_iters, args.tol,
                          args.max_depth, pivot=args.pivot, select=args.rows)
    code = EXIT_OK if run.converged else EXIT_NEGATIVE
    if args.json:
        return code, dumps({
            "command": "newton",
            "converged": run.converged,
            "iterates": [_vec(x) for x in run.iterates],
            "residual_norms": list(run.residual_norms),
            "step_norms": list(run.step_norms),
            "quadratic_ratios": list(run.quadratic_ratios),
            "deflation": trace_json(run.trace),
        })
    out = [f"deflation {run.trace.status}"]
    for k, x in enumerate(run.iterates):
        step = f"  step {run.step_norms[k - 1]:.3e}" if k else ""
        out.append(f"x{k} = {_fmt_vec(x)}  residual {run.residual_norms[k]:.3e}{step}")
    out.append("converged" if run.converged else "not converged")
    return code, "\n".join(out)


def cmd_certify(args):
    f, x0 = _system_and_point(args)
    ctx = BallContext(x0, args.radius)
    cert, t = certify_singular(f, x0, ctx, args.order, args.at_root, args.max_depth,
                               pivot=args.pivot, select=args.rows)
    code = EXIT_OK if cert.verdict else EXIT_NEGATIVE
    if args.json:
        c = {
            "kind": cert.kind,
            "beta": _num(cert.beta),
            "kappa": _num(cert.kappa),
            "gamma": _num(cert.gamma_val),
            "alpha": _num(cert.alpha_val),
            "bound": _num(cert.bound),
            "verdict": cert.verdict,
            "theta_interval": None if cert.theta_interval is None else list(cert.theta_interval),
            "radius": _num(cert.radius),
            "failed_level": cert.failed_level,
        }
        return code, dumps({"command": "certify", "certificate": c, "deflation": trace_json(t)})
    if cert.failed_level is not None:
        return code, f"deflation {t.status} at level {cert.failed_level}; no certificate"
    out = [f"{cert.kind}-certificate  beta {cert.beta:.4g}  kappa {cert.kappa:.4g}  "
           f"gamma {cert.gamma_val:.4g}  alpha {cert.alpha_val:.4g}  bound {cert.bound:.4g}",
           f"verdict {cert.verdict}"]
    if cert.theta_interval is not None:
        lo, hi = cert.theta_interval
        out.append(f"unique root in B(x0, theta) for theta in [{lo:.4g}, {hi:.4g}]")
    elif cert.kind == "gamma":
        out.append(f"quadratic convergence from every point within {cert.radius:.4g}")
    return code, "\n".join(out)


def cmd_multiplicity(args):
    f, x0 = _system_and_point(args)
    if args.cap < 1:
        raise UsageError("--cap must be >= 1")
    r = multiplicity(f, x0, args.cap)
    code = EXIT_OK if r.stabilized else EXIT_NEGATIVE
    if args.json:
        return code, dumps({"command": "multiplicity", "mu": r.mu,
                            "degree_cap_used": r.degree_cap_used, "stabilized": r.stabilized,
                            "nullities": list(r.nullities)})
    state = "stabilized" if r.stabilized else "not stabilized"
    return code, f"multiplicity {r.mu} ({state} at degree {r.degree_cap_used})"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multroot", description="Deflation, Newton and certificates for singular roots.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rank", help="numerical rank of a matrix file")
    p.add_argument("--matrix", required=True, help="dense rows of whitespace-separated a+bi entries")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_rank)

    def common(p, with_order=True):
        p.add_argument("system", help="system file")
        p.add_argument("--point", required=True, help="comma-separated coordinates, e.g. -0.01,0.02")
        p.add_argument("--json", action="store_true")
        if with_order:
            p.add_argument("--radius", type=float, default=0.25)
            p.add_argument("--order", type=int, default=8)
            p.add_argument("--max-depth", type=int, default=32)
            p.add_argument("--pivot", choices=("max", "leading"), default="max",
                           help="Schur block choice: complete pivoting or leading block")
            p.add_argument("--rows", type=parse_rows, default=None,
                           help="rows of the last level to keep, e.g. 0,1 (default: pivoted QR)")

    p = sub.add_parser("deflate", help="deflation sequence")
    common(p)
    p.set_defaults(func=cmd_deflate)

    p = sub.add_parser("newton", help="singular Newton iteration")
    common(p)
    p.add_argument("--max-iters", type=int, default=30)
    p.add_argument("--tol", type=float, default=1e-14)
    p.set_defaults(func=cmd_newton)

    p = sub.add_parser("certify", help="alpha or gamma certificate on the deflated system")
    common(p)
    p.add_argument("--at-root", action="store_true", help="gamma-certificate at a candidate root")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("multiplicity", help="multiplicity via the dual space")
    common(p, with_order=False)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_multiplicity)
    return parser


def _glue_values(argv: List[str]) -> List[str]:
    # "--point -0.01,0.02" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--point", "--rows"):
            val = next(it, None)
            out.append(tok if val is None else f"{tok}={val}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_values(argv))
        _check_numbers(args)
        code, text = args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (DeflationError, MultiplicityError, NotAUnitError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(text)
    return code
