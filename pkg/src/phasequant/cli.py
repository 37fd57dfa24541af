"""Command-line front end: ``phasequant {quantize,expect,qgrid,marginal,verify}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .config import FORMATS, Config, load_config
from .errors import CutoffError, DegreeCapError, ModeMismatchError, ParseError, TruncationWarning
from .fock import expectation, parse_state
from .operators import format_ladder
from .phasespace import default_axis, exact_q_average, marginal_rows, qgrid_rows, rows_to_csv, rows_to_json
from .quantization import Scheme, quantize, symbol_of
from .symbols import Convention, format_symbol, parse_symbol
from .verify import ALL, SUITES, VerifyConfig, run_suite

SCHEMES = [s.value for s in Scheme]


class CliError(Exception):
    """User-facing failure; printed to stderr with exit code 1."""


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps absent flags out of the namespace so file values survive
    g = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g.add_argument("--hbar", type=float, help="value of hbar (default 1)")
    g.add_argument("--cutoff", help="Fock cutoff per mode, or 'auto'")
    g.add_argument("--nodes", type=int, help="Gauss-Hermite nodes per dimension")
    g.add_argument("--degree-cap", dest="degree_cap", type=int, help="maximum symbol degree per mode")
    g.add_argument("--format", choices=FORMATS, help="output format")
    g.add_argument("--seed", type=int, help="random seed for verification suites")
    g.add_argument("--config", help="flat key=value config file")
    g.add_argument("--out", help="write output to this path instead of stdout")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="phasequant", parents=[common], description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quantize", parents=[common], help="quantize a phase-space polynomial")
    q.add_argument("expr")
    q.add_argument("--scheme", choices=SCHEMES, default="weyl")
    q.add_argument("--as-symbol", dest="as_symbol", choices=SCHEMES, help="also print the symbol under this scheme")
    q.add_argument("--convention", choices=[c.value for c in Convention], default="xp")
    q.add_argument("--modes", type=int, default=1)

    e = sub.add_parser("expect", parents=[common], help="expectation value by the Hilbert and Q-average routes")
    e.add_argument("expr")
    e.add_argument("--scheme", choices=SCHEMES, default="antiwick")
    e.add_argument("--state", default="vacuum")
    e.add_argument("--convention", choices=[c.value for c in Convention], default="xp")

    g = sub.add_parser("qgrid", parents=[common], help="dump Q, W and smoothed W on an (x, p) grid")
    g.add_argument("--state", default="vacuum")
    g.add_argument("--grid", default="", help="xmin:xmax:nx,pmin:pmax:np (default 41x41 over +-4 sqrt(hbar))")

    m = sub.add_parser("marginal", parents=[common], help="dump the Q x-marginal next to the Born density")
    m.add_argument("--state", default="vacuum")
    m.add_argument("--axis", default="", help="xmin:xmax:nx (default 41 points over +-4 sqrt(hbar))")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=list(SUITES) + [ALL])
    return parser


def resolve_config(args: argparse.Namespace) -> Config:
    overrides = {k: getattr(args, k) for k in ("hbar", "cutoff", "nodes", "degree_cap", "format", "seed") if hasattr(args, k)}
    return load_config(getattr(args, "config", None), **overrides)


def _axis(spec: str, hbar: float) -> np.ndarray:
    if not spec.strip():
        return default_axis(hbar)
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise CliError(f"bad axis spec {spec!r}; expected min:max:count") from None
    if n < 1 or (n > 1 and not hi > lo):
        raise CliError(f"bad axis spec {spec!r}; need count >= 1 and max > min")
    return np.linspace(lo, hi, n)


def _grid(spec: str, hbar: float) -> tuple[np.ndarray, np.ndarray]:
    if not spec.strip():
        return default_axis(hbar), default_axis(hbar)
    parts = spec.split(",")
    if len(parts) != 2:
        raise CliError(f"bad grid spec {spec!r}; expected xmin:xmax:nx,pmin:pmax:np")
    return _axis(parts[0], hbar), _axis(parts[1], hbar)


def _num(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


# -- commands --------------------------------------------------------------------------

def cmd_quantize(args, cfg: Config) -> str:
    f = parse_symbol(args.expr, args.modes, args.convention, cfg.degree_cap)
    op = quantize(f, args.scheme, cfg.degree_cap)
    result = {"scheme": args.scheme, "operator": format_ladder(op)}
    if args.as_symbol:
        result["symbol_scheme"] = args.as_symbol
        result["symbol"] = format_symbol(symbol_of(op, args.as_symbol))
    if cfg.format == "json":
        return json.dumps(result, indent=2)
    if cfg.format == "csv":
        cols = list(result)
        return rows_to_text([result], cols)
    lines = [result["operator"]]
    if args.as_symbol:
        lines.append(result["symbol"])
    return "\n".join(lines)


def rows_to_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([r[c] for c in columns])
    return buf.getvalue().rstrip("\n")


def cmd_expect(args, cfg: Config) -> str:
    modes = len(args.state.split("&"))
    f = parse_symbol(args.expr, modes, args.convention, cfg.degree_cap)
    psi = parse_state(args.state, cfg.hbar, cfg.cutoff, margin=f.mode_degree())
    op = quantize(f, args.scheme, cfg.degree_cap)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        hilbert = expectation(psi, op)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    classical = exact_q_average(symbol_of(op, Scheme.ANTIWICK), psi)
    # report the expectation of the ray, so truncated coherent states need no renormalising
    norm2 = float(np.vdot(psi.coefficients, psi.coefficients).real)
    hilbert, classical = hilbert / norm2, classical / norm2
    deviation = abs(hilbert - classical)
    if cfg.format == "json":
        return json.dumps(
            {"hilbert": _num(hilbert), "q_average": _num(classical), "deviation": deviation, "cutoff": list(psi.cutoffs)},
            indent=2,
        )
    if cfg.format == "csv":
        return "hilbert_re,hilbert_im,q_average_re,q_average_im,deviation\n" + ",".join(
            repr(v) for v in (hilbert.real, hilbert.imag, classical.real, classical.imag, deviation)
        )
    return "\n".join(
        [
            f"hilbert   : {_pretty(hilbert)}",
            f"q-average : {_pretty(classical)}",
            f"deviation : {deviation:.3e}",
        ]
    )


def _pretty(z: complex) -> str:
    if abs(z.imag) <= 1e-15 * max(1.0, abs(z.real)):
        return repr(z.real)
    return f"{z.real!r} {'+' if z.imag >= 0 else '-'} {abs(z.imag)!r}i"


def cmd_qgrid(args, cfg: Config) -> str:
    psi = parse_state(args.state, cfg.hbar, cfg.cutoff)
    xs, ps = _grid(args.grid, cfg.hbar)
    rows = qgrid_rows(psi, xs, ps, cfg.nodes)
    if cfg.format == "json":
        return rows_to_json(rows)
    return rows_to_csv(rows, ["x", "p", "Q", "W", "smoothedW"]).rstrip("\n")


def cmd_marginal(args, cfg: Config) -> str:
    psi = parse_state(args.state, cfg.hbar, cfg.cutoff)
    rows = marginal_rows(psi, _axis(args.axis, cfg.hbar), cfg.nodes)
    if cfg.format == "json":
        return rows_to_json(rows)
    return rows_to_csv(rows, ["x", "qmarg", "born"]).rstrip("\n")


def cmd_verify(args, cfg: Config) -> tuple[str, int]:
    report = run_suite(args.suite, cfg.seed, VerifyConfig(hbar=cfg.hbar, nodes=cfg.nodes))
    code = 0 if report.passed else 1
    if cfg.format == "csv":
        rows = [
            {"identity": c.identity, "max_deviation": repr(c.max_deviation), "tolerance": repr(c.tolerance), "passed": c.passed}
            for c in report.checks
        ]
        return rows_to_text(rows, ["identity", "max_deviation", "tolerance", "passed"]), code
    return report.to_json(), code


COMMANDS = {
    "quantize": cmd_quantize,
    "expect": cmd_expect,
    "qgrid": cmd_qgrid,
    "marginal": cmd_marginal,
    "verify": cmd_verify,
}


def _emit(text: str, out: str | None) -> None:
    if out:
        path = Path(out)
        try:
            path.write_text(text + "\n")
        except OSError as exc:
            raise CliError(f"cannot write {path}: {exc.strerror}") from None
    else:
        print(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        result = COMMANDS[args.command](args, cfg)
        text, code = result if isinstance(result, tuple) else (result, 0)
        _emit(text, getattr(args, "out", None))
        return code
    except CutoffError as exc:
        print(f"error: {exc}; try --cutoff {exc.minimal_cutoff}", file=sys.stderr)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        expr = getattr(args, "expr", None)
        if expr is not None and exc.position is not None:
            print(f"  {expr}\n  {' ' * exc.position}^", file=sys.stderr)
    except (DegreeCapError, ModeMismatchError, CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
