"""``epikit`` command line: CSV data and ``key = value`` reports.

Data goes to stdout, diagnostics to stderr.  Exit status is 0 on success and
2 on a usage or domain error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Iterable, List, Optional, Sequence, TextIO

from . import analysis, closed_forms
from .errors import EpikitError
from .integrator import IntegratorConfig, PeakOfI, integrate, locate_event
from .model import DEFAULT_I0, ModelKind, ModelParams

EXIT_OK = 0
EXIT_USAGE = 2

TABLE1_R0 = (2.0, 3.0, 6.0)


def fmt(x: float) -> str:
    """Nine significant digits, locale independent."""
    return f"{x:.9g}"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # one-line diagnostic instead of usage dump
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _params(args: argparse.Namespace) -> ModelParams:
    i0 = args.i0
    if args.s0 is None and i0 is None:
        i0 = DEFAULT_I0
    return ModelParams(args.r0, a=args.a if args.a is not None else 1.0, s0=args.s0, i0=i0)


def _config(args: argparse.Namespace) -> IntegratorConfig:
    return IntegratorConfig(
        step_size=args.h,
        tau_max=args.tau_max,
        extinction_threshold=args.extinction_threshold,
    )


def _write_csv(out: TextIO, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def _write_report(out: TextIO, items: Iterable[tuple]) -> None:
    for key, value in items:
        text = fmt(value) if isinstance(value, float) else str(value)
        out.write(f"{key} = {text}\n")


def _thin(n: int, every: int) -> List[int]:
    idx = list(range(0, n, every))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    return idx


# --- subcommands -----------------------------------------------------------


def cmd_simulate(args: argparse.Namespace, out: TextIO) -> int:
    params = _params(args)
    traj = integrate(params, ModelKind(args.model), _config(args))
    header = ["tau", "S", "I", "R"]
    with_t = args.a is not None
    if with_t:
        header.append("t")
    rows = []
    for k in _thin(len(traj), args.out_every):
        row = [traj.tau[k], traj.s[k], traj.i[k], traj.r[k]]
        if with_t:
            row.append(traj.tau[k] / params.a)
        rows.append(row)
    _write_csv(out, header, rows)
    return EXIT_OK


def cmd_peak(args: argparse.Namespace, out: TextIO) -> int:
    params = _params(args)
    report = analysis.peak_values(params)
    items = [("S_star", report.s_star), ("I_star", report.i_star), ("R_star", report.r_star)]
    if args.with_time:
        tau, _ = locate_event(integrate(params, ModelKind.SIR, _config(args)), PeakOfI())
        items.append(("tau_star", tau))
        if args.a is not None:
            items.append(("t_star", tau / params.a))
    _write_report(out, items)
    return EXIT_OK


def cmd_final_size(args: argparse.Namespace, out: TextIO) -> int:
    report = analysis.final_size(_params(args), args.method)
    _write_report(
        out,
        [
            ("R_inf", report.r_inf),
            ("S_inf", report.s_inf),
            ("method", report.method.value),
            ("iterations", report.iterations),
            ("residual", report.residual),
        ],
    )
    return EXIT_OK


def _grid(lo: float, hi: float, step: float) -> List[float]:
    if not step > 0:
        raise EpikitError(f"--step must be positive, got {step}")
    if hi < lo:
        raise EpikitError(f"--r0-max ({hi}) is below --r0-min ({lo})")
    n = int(round((hi - lo) / step))
    return [lo + k * step for k in range(n + 1)]


def cmd_sweep(args: argparse.Namespace, out: TextIO) -> int:
    s0 = args.s0 if args.s0 is not None else 1.0 - (args.i0 if args.i0 is not None else DEFAULT_I0)
    rows = analysis.final_size_sweep(_grid(args.r0_min, args.r0_max, args.step), s0)
    _write_csv(out, ["r0", "R_inf"], rows)
    return EXIT_OK


def cmd_fastest(args: argparse.Namespace, out: TextIO) -> int:
    res = analysis.fastest_new_infections(_params(args))
    _write_report(out, [("S", res.s_at_max), ("I", res.i_at_max), ("rate", res.rate_max)])
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, out: TextIO) -> int:
    i0 = args.i0 if args.i0 is not None else DEFAULT_I0
    cmp = closed_forms.compare_models(args.r0, i0, _config(args))
    if args.summary:
        _write_report(
            out,
            [
                ("tau_star_modified", cmp.closed_form.tau_star),
                ("I_peak_sir", float(cmp.i_sir.max())),
                ("I_peak_modified", float(cmp.i_modified.max())),
                ("max_abs_diff", cmp.max_abs_diff),
                ("R_final_sir", cmp.r_final_sir),
                ("R_final_modified", cmp.r_final_modified),
            ],
        )
        return EXIT_OK
    rows = cmp.rows()
    _write_csv(out, ["tau", "I_sir", "I_modified"], (rows[k] for k in _thin(len(rows), args.out_every)))
    return EXIT_OK


def table1_rows() -> List[tuple]:
    """``(r0, S*, I*, R*, S_inf, R_inf)`` with S0 = 1 for r0 in {2, 3, 6}."""
    rows = []
    for r0 in TABLE1_R0:
        params = ModelParams(r0, i0=0.0)
        peak = analysis.peak_values(params)
        end = analysis.final_size(params)
        rows.append((r0, peak.s_star, peak.i_star, peak.r_star, end.s_inf, end.r_inf))
    return rows


def cmd_table1(args: argparse.Namespace, out: TextIO) -> int:
    header = ("r0", "S*", "I*", "R*", "S_inf", "R_inf")
    lines = []
    for r0, *cells in table1_rows():
        if args.raw:
            texts = [fmt(c) for c in cells]
        else:
            # the r0 = 6 end values need a third decimal to be non-trivial
            end_digits = 3 if r0 == 6.0 else 2
            texts = [f"{c:.2f}" for c in cells[:3]] + [f"{c:.{end_digits}f}" for c in cells[3:]]
        lines.append([f"{r0:g}"] + texts)
    widths = [max(len(h), *(len(line[j]) for line in lines)) for j, h in enumerate(header)]
    for line in [list(header)] + lines:
        out.write("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() + "\n")
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epikit", description="SIR epidemic model toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    model = _Parser(add_help=False)
    model.add_argument("--r0", type=float, required=True, help="basic reproduction number")
    model.add_argument("--s0", type=float, default=None, help="initial susceptible proportion (default 1 - i0)")
    model.add_argument("--i0", type=float, default=None, help=f"initial infected proportion (default {DEFAULT_I0:g})")
    model.add_argument("--a", type=float, default=None, help="removal rate; adds physical time t = tau/a")

    integ = _Parser(add_help=False)
    integ.add_argument("--h", type=float, default=1e-3, help="RK4 step in rescaled time")
    integ.add_argument("--tau-max", type=float, default=100.0)
    integ.add_argument("--extinction-threshold", type=float, default=1e-9)
    integ.add_argument("--out-every", type=int, default=10, help="emit every n-th integration step")

    p = sub.add_parser("simulate", parents=[model, integ], help="integrate a model, CSV tau,S,I,R")
    p.add_argument("--model", choices=[k.value for k in ModelKind], default="sir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("peak", parents=[model, integ], help="S, I, R at peak infection")
    p.add_argument("--with-time", action="store_true", help="also locate the peak time by integration")
    p.set_defaults(func=cmd_peak)

    p = sub.add_parser("final-size", parents=[model], help="solve the final-size equation")
    p.add_argument("--method", choices=[m.value for m in analysis.FinalSizeMethod], default="bisection")
    p.set_defaults(func=cmd_final_size)

    p = sub.add_parser("sweep", help="final size over an r0 grid, CSV r0,R_inf")
    p.add_argument("--r0-min", type=float, default=1.01)
    p.add_argument("--r0-max", type=float, default=6.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--s0", type=float, default=None)
    p.add_argument("--i0", type=float, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fastest", parents=[model], help="fastest increase of new infections")
    p.set_defaults(func=cmd_fastest)

    p = sub.add_parser("compare", parents=[model, integ], help="SIR vs modified SIR, CSV tau,I_sir,I_modified")
    p.add_argument("--summary", action="store_true", help="print key = value summary instead of CSV")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("table1", help="peak and end values for r0 = 2, 3, 6")
    p.add_argument("--raw", action="store_true", help="unrounded values")
    p.set_defaults(func=cmd_table1)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "out_every", 1) < 1:
        err.write("epikit: error: --out-every must be at least 1\n")
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except EpikitError as exc:
        err.write(f"epikit {args.command}: {exc}\n")
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
