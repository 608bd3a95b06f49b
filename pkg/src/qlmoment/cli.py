"""Command-line entry point: verification suites, single evaluations, residual scans and fits.

Exit status: 0 on success or pass, 1 on a verification failure, 2 on a usage error.

Configuration precedence (lowest to highest): built-in defaults, the JSON
file given by --config (top-level keys apply to every command, a section
named after the command overrides them), then explicit flags.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _alpha(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return v

    return conv


def _fmt(z: complex) -> str:
    return f"{z.real:.15g}{z.imag:+.15g}j"


def _verdict(name: str, worst: float, tol: float) -> bool:
    ok = worst <= tol
    print(f"{name}: worst={worst:.3e} tol={tol:.1e} {'PASS' if ok else 'FAIL'}")
    return ok


# ----------------------------------------------------------------------------
# commands


def cmd_verify(args) -> int:
    if args.suite == "gauss":
        from .gauss import gauss_sweep

        t = time.perf_counter()
        worst, (k, n) = gauss_sweep(args.nmax, args.kmax)
        print(f"gauss: odd n <= {args.nmax}, |k| <= {args.kmax}, worst at (k={k}, n={n}), {time.perf_counter() - t:.1f}s")
        return EXIT_OK if _verdict("gauss max |closed-brute|/n", worst, args.tol) else EXIT_FAIL
    if args.suite == "poisson":
        from .gauss import poisson_check

        ok = True
        for n in args.ns:
            if n <= 0 or n % 2 == 0:
                raise UsageError(f"--ns: n must be odd and positive, got {n}")
            lhs, rhs = poisson_check(n, args.z)
            print(f"  n={n}: lhs={lhs:.15g} rhs={rhs:.15g}")
            ok &= _verdict(f"poisson n={n} |lhs-rhs|", abs(lhs - rhs), args.tol)
        return EXIT_OK if ok else EXIT_FAIL
    if args.suite == "series":
        from .series import identity_sweep

        which = ["b", "c", "h", "hm1", "a"] if args.which == "all" else [args.which]
        ok = True
        for w in which:
            r = identity_sweep(w, args.samples, args.seed)
            print(f"series {w}: {r.samples} points, seed {r.seed}, worst point {r.worst_point}")
            ok &= _verdict(f"series {w} relative", r.worst, r.tol)
        return EXIT_OK if ok else EXIT_FAIL
    if args.suite == "identities":
        from .specfun import identity_suite

        ok = True
        for name, worst in identity_suite(args.samples, args.seed).items():
            ok &= _verdict(f"identity {name}", worst, args.tol)
        return EXIT_OK if ok else EXIT_FAIL
    raise UsageError(f"unknown suite {args.suite!r}")


def cmd_lvalue(args) -> int:
    from .lvalue import l_afe, l_oracle

    v = l_afe(args.d, args.alpha)
    print(f"L(1/2+alpha, chi_8d) d={args.d} alpha={_fmt(args.alpha)}: {_fmt(v)}")
    if args.oracle:
        o = l_oracle(args.d, 0.5 + args.alpha)
        print(f"oracle: {_fmt(o)}")
        return EXIT_OK if _verdict("|afe-oracle|/(1+|oracle|)", abs(v - o) / (1 + abs(o)), args.tol) else EXIT_FAIL
    return EXIT_OK


def cmd_moment(args) -> int:
    from .moment import MomentRequest, ShiftTwist, brute_moment

    v = brute_moment(MomentRequest(args.x, ShiftTwist(args.alpha, args.l)), args.workers)
    print(f"M(alpha, l) X={args.x:g} alpha={_fmt(args.alpha)} l={args.l}: {_fmt(v)}")
    return EXIT_OK


def cmd_mainterm(args) -> int:
    from .moment import ShiftTwist, main_term_auto

    v = main_term_auto(args.x, ShiftTwist(args.alpha, args.l))
    print(f"main term X={args.x:g} alpha={_fmt(args.alpha)} l={args.l}: {_fmt(v)}")
    return EXIT_OK


def cmd_cancel(args) -> int:
    from .moment import ShiftTwist, check_cancellation, check_cancellation_mirror

    st = ShiftTwist(args.alpha, args.l)
    r = check_cancellation(args.x, st, Y=args.y)
    names = ("M_N(k=0)", "M_-N(k1=1)", "M_R1", "M_-R2")
    for name, val in zip(names, r.pieces):
        print(f"  {name}: {_fmt(val)}")
    print(f"lhs={_fmt(r.lhs)} rhs={_fmt(r.rhs)}")
    ok = _verdict("cancellation |lhs-rhs|/|rhs|", r.rel_error, args.tol)
    if args.mirror:
        m = check_cancellation_mirror(args.x, st, Y=args.y)
        print(f"mirror lhs={_fmt(m.lhs)} rhs={_fmt(m.rhs)}")
        ok &= _verdict("mirror |lhs-rhs|/|rhs|", m.rel_error, args.tol)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scan(args) -> int:
    from .moment import ShiftTwist, geometric_grid, residual_scan

    Xs = geometric_grid(args.xmin, args.xmax, args.points)
    table = residual_scan(Xs, ShiftTwist(args.alpha, args.l), workers=args.workers, seed=args.seed)
    text = table.to_csv()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {len(table.rows)} rows to {args.out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    from .moment import ResidualTable, fit_exponent

    try:
        with open(args.inp, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"--in: cannot read {args.inp!r} ({exc.strerror})") from None
    try:
        table = ResidualTable.from_csv(text)
    except ValueError as exc:
        raise UsageError(f"--in: {exc}") from None
    fit = fit_exponent(table)
    print(f"slope={fit.slope:.6f} stderr={fit.stderr:.6f}")
    print(f"robust slope={fit.robust_slope:.6f} [{fit.robust_low:.6f}, {fit.robust_high:.6f}]")
    small = all(abs(r.residual) >= 10 * r.err_budget for r in table.rows)
    if not small:
        print("inconclusive: some residual is within 10x its error budget")
        return EXIT_FAIL
    return EXIT_OK


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qlmoment", description="Twisted first moment of quadratic Dirichlet L-functions.")
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--workers", type=_positive(int), default=None, help="worker threads (default: $QLMOMENT_WORKERS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    vs = v.add_subparsers(dest="suite", required=True)
    g = vs.add_parser("gauss")
    g.add_argument("--nmax", type=_positive(int), default=2000)
    g.add_argument("--kmax", type=_positive(int), default=50)
    g.add_argument("--tol", type=_positive(float), default=1e-9)
    po = vs.add_parser("poisson")
    po.add_argument("--ns", type=_int_list, default=[1, 3, 5, 9, 15, 45])
    po.add_argument("--z", type=_positive(float), default=1000.0)
    po.add_argument("--tol", type=_positive(float), default=1e-6)
    se = vs.add_parser("series")
    se.add_argument("--which", choices=["b", "c", "h", "hm1", "a", "all"], default="all")
    se.add_argument("--samples", type=_positive(int), default=20)
    se.add_argument("--seed", type=int, default=0)
    idn = vs.add_parser("identities")
    idn.add_argument("--samples", type=_positive(int), default=100)
    idn.add_argument("--seed", type=int, default=0)
    idn.add_argument("--tol", type=_positive(float), default=1e-9)

    lv = sub.add_parser("lvalue", help="L(1/2+alpha, chi_8d) from the AFE")
    lv.add_argument("--d", type=_positive(int), required=True)
    lv.add_argument("--alpha", type=_alpha, default=0j)
    lv.add_argument("--oracle", action="store_true", help="compare with the Hurwitz oracle")
    lv.add_argument("--tol", type=_positive(float), default=1e-6)

    for name, helptext in (("moment", "brute-force twisted moment"), ("mainterm", "conjectured main term")):
        m = sub.add_parser(name, help=helptext)
        m.add_argument("--x", type=_positive(float), required=True)
        m.add_argument("--alpha", type=_alpha, default=0j)
        m.add_argument("--l", type=_positive(int), default=1)

    c = sub.add_parser("cancel", help="check that the four contour pieces sum to the main term")
    c.add_argument("--alpha", type=_alpha, required=True)
    c.add_argument("--l", type=_positive(int), default=1)
    c.add_argument("--y", type=_positive(float), default=10.0)
    c.add_argument("--x", type=_positive(float), default=1000.0)
    c.add_argument("--tol", type=_positive(float), default=1e-6)
    c.add_argument("--mirror", action="store_true", help="also check the mirrored identity")

    s = sub.add_parser("scan", help="residual table over a geometric X grid")
    s.add_argument("--xmin", type=_positive(float), default=2.0**10)
    s.add_argument("--xmax", type=_positive(float), default=2.0**17)
    s.add_argument("--points", type=_positive(int), default=8)
    s.add_argument("--alpha", type=_alpha, default=0j)
    s.add_argument("--l", type=_positive(int), default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None, help="CSV path, '-' or omitted for stdout")

    f = sub.add_parser("fit", help="fit the residual exponent from a scan CSV")
    f.add_argument("--in", dest="inp", required=True)
    return p


def _sub_parser(parser: argparse.ArgumentParser, path: list[str]) -> argparse.ArgumentParser:
    cur = parser
    for name in path:
        action = next(a for a in cur._actions if isinstance(a, argparse._SubParsersAction))
        cur = action.choices[name]
    return cur


def _apply_config(parser, argv, args) -> argparse.Namespace:
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"--config: cannot read {args.config!r} ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config: invalid JSON ({exc.msg})") from None
    if not isinstance(cfg, dict):
        raise UsageError("--config: top level must be an object")
    path = [args.command] + ([args.suite] if args.command == "verify" else [])
    section = cfg
    for name in path:
        nxt = section.get(name, {})
        section = nxt if isinstance(nxt, dict) else {}
    values = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
    values.update({k: v for k, v in section.items() if not isinstance(v, dict)})
    if "workers" in values:
        parser.set_defaults(workers=values.pop("workers"))
    sp = _sub_parser(parser, path)
    known = {a.dest for a in sp._actions}
    unknown = sorted(set(values) - known)
    if unknown:
        raise UsageError(f"--config: unknown option(s) for {' '.join(path)}: {', '.join(unknown)}")
    conv = {}
    for a in sp._actions:
        if a.dest in values and a.type is not None and isinstance(values[a.dest], str):
            conv[a.dest] = a.type(values[a.dest])
    values.update(conv)
    if "alpha" in values and not isinstance(values["alpha"], complex):
        val = values["alpha"]
        values["alpha"] = complex(*val) if isinstance(val, list) else complex(val)
    sp.set_defaults(**values)
    return parser.parse_args(argv)


def _normalize(args):
    if getattr(args, "workers", None) is None:
        from .lvalue import default_workers

        args.workers = default_workers()
    if hasattr(args, "l"):
        from .arith import is_squarefree

        if args.l % 2 == 0 or not is_squarefree(args.l):
            raise UsageError(f"--l: must be odd and squarefree, got {args.l}")
    if hasattr(args, "alpha"):
        a = args.alpha
        if abs(a.real) > 0.25 or abs(a.imag) > 50:
            raise UsageError(f"--alpha: outside |Re| <= 0.25, |Im| <= 50 ({_fmt(a)})")
    if getattr(args, "command", None) == "scan" and args.xmax < args.xmin:
        raise UsageError("--xmax: must be >= --xmin")
    return args


COMMANDS = {
    "verify": cmd_verify,
    "lvalue": cmd_lvalue,
    "moment": cmd_moment,
    "mainterm": cmd_mainterm,
    "cancel": cmd_cancel,
    "scan": cmd_scan,
    "fit": cmd_fit,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.config:
            try:
                args = _apply_config(parser, argv, args)
            except SystemExit as exc:
                return EXIT_OK if exc.code == 0 else EXIT_USAGE
        args = _normalize(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
