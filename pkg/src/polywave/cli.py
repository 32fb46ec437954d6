"""Command-line interface.

Exit codes: 0 success, 1 computational or diagnostic failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import PolywaveError
from .factorization import refinement_mask
from .filterbank import (
    CoefficientPyramid,
    ImagePyramids,
    analyze_1d,
    analyze_2d,
    make_plan,
    synthesize_1d,
    synthesize_2d,
    threshold_denoise,
)
from .subdivision import cascade_father, fundamental_function, mother_wavelet
from .symbols import SymbolContext, a_symbol, bezout_residual, p_polynomial, q_polynomial_closed_form, verify_symbol
from .verify import check_mask_coeffs, check_symbol_coeffs, grid_size, run_suite


class CommandError(Exception):
    """Failure reported with exit code 1."""


def _bounded(kind, lo=None, hi=None):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {kind.__name__} value: {text!r}")
        if (lo is not None and v < lo) or (hi is not None and v > hi):
            rng = f"[{lo}, {hi if hi is not None else 'inf'}]"
            raise argparse.ArgumentTypeError(f"{v} outside {rng}")
        return v
    return parse


def _common(p: argparse.ArgumentParser, *, out_required=False):
    p.add_argument("--N", type=_bounded(int, 1, 10), default=2, help="order (1..10)")
    p.add_argument("--xi", type=_bounded(float, 0.0), default=0.0, help="frequency parameter")
    p.add_argument("--level", type=_bounded(int, 0, 30), default=0, help="symbol level k")
    p.add_argument("--out", required=out_required, help="output path")


def _transform(p: argparse.ArgumentParser):
    p.add_argument("--N", type=_bounded(int, 1, 10), default=2)
    p.add_argument("--xi", type=_bounded(float, 0.0), default=0.0, help="frequency (signals only)")
    p.add_argument("--depth", "-J", type=_bounded(int, 1), default=3)
    p.add_argument("--base-level", type=_bounded(int, 0, 30), default=0,
                   help="mask level used at the coarsest stage")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polywave", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filters", help="symbol and refinement mask with diagnostics")
    _common(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    _common(p)
    p.add_argument("--L", type=_bounded(int, 1, 16), default=10)
    p.add_argument("--check-file", help="filter JSON to check instead of the computed mask")

    p = sub.add_parser("cascade", help="tabulate Phi_m, phi_m, psi_m as CSV")
    _common(p)
    p.add_argument("--L", type=_bounded(int, 1, 16), default=10)

    for name in ("analyze", "synthesize", "denoise"):
        p = sub.add_parser(name)
        _transform(p)
        if name == "denoise":
            p.add_argument("--tau", type=_bounded(float, 0.0), default=0.0)
            p.add_argument("--mode", choices=("hard", "soft"), default="soft")
    return parser


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_filters(args) -> int:
    ctx = SymbolContext(args.N, args.xi, args.level)
    grid = grid_size()
    sym = a_symbol(ctx)
    rep = verify_symbol(sym, grid)
    mask = refinement_mask(ctx)
    md = mask.to_dict(grid)
    bres = bezout_residual(p_polynomial(ctx.lams, ctx.level), q_polynomial_closed_form(ctx))
    diag = {
        "qmf_residual": md["qmf_residual"],
        "factorization_residual": md["factorization_residual"],
        "bezout_residual": bres,
        "min_circle_value": rep.min_circle_value,
        "symmetry_defect": rep.symmetry_defect,
        "interpolatory_defect": rep.interpolatory_defect,
    }
    ok = rep.passed and bres <= 1e-10 and md["qmf_residual"] <= 1e-9 and md["factorization_residual"] <= 1e-9
    diag["passed"] = bool(ok)
    _emit(io.dumps({"symbol": {"kind": "symbol", **sym.to_dict()}, "mask": md, "diagnostics": diag}), args.out)
    return 0 if ok else 1


def _checks_from_file(path: str, grid: int):
    try:
        doc = io.read_json(path)
    except (OSError, ValueError) as exc:
        raise CommandError(f"cannot read filter file {path}: {exc}")
    mask = doc.get("mask", doc if doc.get("kind") == "mask" else None)
    sym = doc.get("symbol", doc if doc.get("kind") == "symbol" else None)
    src = mask or sym
    if src is None:
        raise CommandError(f"{path}: no 'mask' or 'symbol' field")
    try:
        ctx = SymbolContext(int(src["N"]), float(src["xi"]), int(src["level"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CommandError(f"{path}: bad field {exc}")
    checks = []
    if mask is not None:
        checks += check_mask_coeffs(ctx, np.asarray(mask["coeffs"], float), grid)
    if sym is not None:
        checks += check_symbol_coeffs(ctx, int(sym["lo"]), sym["coeffs"], grid)
    return ctx, checks


def cmd_verify(args) -> int:
    grid = grid_size()
    if args.check_file:
        ctx, checks = _checks_from_file(args.check_file, grid)
    else:
        ctx = SymbolContext(args.N, args.xi, args.level)
        checks = run_suite(args.N, args.xi, args.level, grid, args.L)
    ok = all(c.passed for c in checks)
    print(f"polywave verify N={ctx.N} xi={ctx.xi:g} level={ctx.level} grid={grid}")
    for c in checks:
        print("  " + c.line())
    print("RESULT: " + ("PASS" if ok else "FAIL"))
    report = {"N": ctx.N, "xi": ctx.xi, "level": ctx.level, "grid": grid,
              "passed": ok, "checks": [c.to_dict() for c in checks]}
    text = io.dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def cmd_cascade(args) -> int:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    tables = {
        "fundamental.csv": fundamental_function(args.N, args.xi, args.level, args.L),
        "father.csv": cascade_father(args.N, args.xi, args.level, args.L),
        "mother.csv": mother_wavelet(args.N, args.xi, args.level, args.L),
    }
    for name, f in tables.items():
        io.write_grid_csv(out / name, f.t, f.values)
        print(out / name)
    return 0


def _is_image(path: str) -> bool:
    if path.lower().endswith(".pgm"):
        return True
    try:
        with open(path, "rb") as fh:
            return fh.read(2) in (b"P2", b"P5")
    except OSError:
        return False


def _analyze(args):
    try:
        if _is_image(args.inp):
            img = io.read_pgm(args.inp)
            return analyze_2d(img, args.N, args.depth, args.base_level)
        x = io.read_signal_csv(args.inp)
    except OSError as exc:
        raise CommandError(f"cannot read {args.inp}: {exc.strerror}")
    plan = make_plan(args.N, args.xi, args.depth, args.base_level)
    return {"plan": plan, "pyramid": analyze_1d(x, plan)}


def _synthesize(coeffs, out: str, binary: bool = True):
    if isinstance(coeffs, ImagePyramids):
        img = synthesize_2d(coeffs)
        io.write_pgm(out, img, binary=binary)
    else:
        io.write_signal_csv(out, synthesize_1d(coeffs["pyramid"], coeffs["plan"]))


def cmd_analyze(args) -> int:
    res = _analyze(args)
    if isinstance(res, ImagePyramids):
        doc = res.to_dict()
    else:
        plan = res["plan"]
        doc = {"kind": "signal", "N": plan.N, "xi": plan.xi, "depth": plan.depth,
               "base_level": plan.base_level, "pyramid": res["pyramid"].to_dict()}
    io.write_json(args.out, doc)
    return 0


def cmd_synthesize(args) -> int:
    try:
        doc = io.read_json(args.inp)
    except OSError as exc:
        raise CommandError(f"cannot read {args.inp}: {exc.strerror}")
    except ValueError as exc:
        raise CommandError(f"{args.inp}: not valid JSON ({exc})")
    try:
        if doc.get("kind") == "image":
            coeffs = ImagePyramids.from_dict(doc)
        else:
            plan = make_plan(int(doc["N"]), float(doc["xi"]), int(doc["depth"]), int(doc["base_level"]))
            coeffs = {"plan": plan, "pyramid": CoefficientPyramid.from_dict(doc["pyramid"])}
    except KeyError as exc:
        raise CommandError(f"{args.inp}: missing field {exc}")
    _synthesize(coeffs, args.out)
    return 0


def cmd_denoise(args) -> int:
    res = _analyze(args)
    if isinstance(res, ImagePyramids):
        _synthesize(threshold_denoise(res, args.tau, args.mode), args.out)
    else:
        res["pyramid"] = threshold_denoise(res["pyramid"], args.tau, args.mode)
        _synthesize(res, args.out)
    return 0


COMMANDS = {
    "filters": cmd_filters,
    "verify": cmd_verify,
    "cascade": cmd_cascade,
    "analyze": cmd_analyze,
    "synthesize": cmd_synthesize,
    "denoise": cmd_denoise,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CommandError, PolywaveError, ValueError) as exc:
        print(f"polywave {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"polywave {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
