"""Command-line entry point: ``lcladder <subcommand> ...``.

Exit codes: 0 success, 1 usage or validation error, 2 domain error (branch
cut, pole, packet bandwidth), 3 basin search failure.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import BandwidthError, CutError, PoleError, SearchFailure
from .fixedpoint import basin_verification, quadratic_counterexample, tangent_fixed_points
from .ladder import fixed_points, iterate_p, resistive_ladder
from .lowpass import LowPassConfig, Regime, a_parameter, limiting_impedance, regime_analysis, regime_of
from .propagation import (
    _anchored_phase,
    gaussian_packet_config,
    group_velocity,
    minus_gamma,
    propagate_packet,
)

EXIT_USAGE, EXIT_DOMAIN, EXIT_SEARCH = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def complex_pair(text: str) -> complex:
    """``"re,im"`` -> complex; a bare real is accepted too."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected re,im, got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"components must be finite, got {text!r}")
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _positive(args, *names):
    for n in names:
        v = getattr(args, n)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise UsageError(f"--{n.replace('_', '-')} must be positive, got {v!r}")


def _nonneg(args, *names):
    for n in names:
        v = getattr(args, n)
        if not (math.isfinite(v) and v >= 0):
            raise UsageError(f"--{n.replace('_', '-')} must be non-negative, got {v!r}")


def cmd_fixed_point(args):
    _require(args, "t")
    fp = fixed_points(args.t)
    doc = {
        "p_plus": fp.p_plus,
        "p_minus": fp.p_minus,
        "gamma": fp.gamma,
        "gamma_abs_sq": fp.gamma_abs_sq,
        "branch": {"a": fp.a, "b": fp.b},
    }
    with _open_out(args.out) as fh:
        io.dump_json(doc, fh, args.precision)


def cmd_iterate(args):
    _require(args, "t", "n")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    trace = iterate_p(args.t, args.p1, args.n)
    with _open_out(args.out) as fh:
        if args.format == "json":
            io.dump_json({"rows": [dict(zip(io.TRACE_COLUMNS, [n, p.real, p.imag, c.real, c.imag, e]))
                                   for n, p, c, e in trace.rows()]}, fh, args.precision)
        else:
            io.write_trace_csv(trace, fh, args.precision)
    if trace.pole is not None:
        raise trace.pole


def _sweep_rows(args):
    omegas = np.linspace(args.omega_min, args.omega_max, args.steps)
    cfgs = [LowPassConfig(args.L, args.C, float(w), args.r, args.r_prime) for w in omegas]
    mg = np.array([minus_gamma(c) for c in cfgs])
    delta = _anchored_phase(mg)
    for cfg, m, d in zip(cfgs, mg, delta):
        regime = regime_of(cfg)
        if args.limit:
            rep_regime, A = regime, a_parameter(cfg)
            z = zlim = limiting_impedance(cfg)
        else:
            rep = regime_analysis(cfg)
            rep_regime, A, z, zlim = rep.regime, rep.A, rep.z_plus, rep.z_plus_limit
        if regime is Regime.BELOW_CUTOFF:
            gd = io.fmt(group_velocity(cfg, cfg.omega).seconds_per_section, args.precision)
        else:
            gd = ""
        p = args.precision
        yield [io.fmt(cfg.omega, p), rep_regime.value, io.fmt(A, p), io.fmt(z.real, p), io.fmt(z.imag, p),
               io.fmt(zlim.real, p), io.fmt(zlim.imag, p), io.fmt(abs(m), p), io.fmt(d, p), gd]


def cmd_sweep(args):
    _require(args, "L", "C", "omega_min", "omega_max", "steps")
    _positive(args, "L", "C", "omega_min", "omega_max")
    _nonneg(args, "r", "r_prime")
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    if not args.omega_min < args.omega_max:
        raise UsageError("--omega-min must be below --omega-max")
    wc = 2.0 / math.sqrt(args.L * args.C)
    lossless = args.r == 0 and args.r_prime == 0
    if args.limit and not lossless:
        raise UsageError("--limit evaluates closed-form lossless limits; drop --r/--r-prime")
    if lossless and not args.limit and not args.omega_min > wc:
        raise UsageError(
            f"lossless sweep reaches below cutoff omega_c = {wc:.6g} (on the branch cut); "
            "pass --r/--r-prime > 0 or --limit"
        )
    rows = list(_sweep_rows(args))
    with _open_out(args.out) as fh:
        io.write_csv(fh, io.SWEEP_COLUMNS, rows)


def cmd_packet(args):
    _require(args, "L", "C", "omega0", "sigma", "sections")
    if args.split and args.out in (None, "-"):
        raise UsageError("--split needs --out")
    _positive(args, "L", "C", "omega0", "sigma")
    _nonneg(args, "r", "r_prime")
    if not args.sections or min(args.sections) < 0:
        raise UsageError("--sections must list non-negative integers")
    filt = LowPassConfig(args.L, args.C, args.omega0, args.r, args.r_prime)
    if args.omega0 >= filt.omega_c:
        raise UsageError(f"--omega0 must lie below the cutoff omega_c = {filt.omega_c:.6g}")
    cfg = gaussian_packet_config(filt, args.omega0, args.sigma, args.sections,
                                 t_center=args.t_center, frequency_grid=args.frequency_grid)
    traces = propagate_packet(cfg, filt, jobs=args.jobs)
    if args.out in (None, "-"):
        io.write_sections_csv(traces, sys.stdout, args.precision)
        summary_path = args.summary
    else:
        out = Path(args.out)
        if args.split:
            for tr in traces:
                with open(out.with_name(f"{out.stem}_section{tr.section}{out.suffix or '.csv'}"), "w",
                          encoding="utf-8", newline="") as fh:
                    io.write_section_csv(tr, fh, args.precision)
        else:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                io.write_sections_csv(traces, fh, args.precision)
        summary_path = args.summary or str(out.with_suffix(".summary.json"))
    summary = {str(tr.section): tr.peak_time for tr in traces}
    if summary_path:
        with _open_out(summary_path) as fh:
            io.dump_json(summary, fh, args.precision)


def cmd_contraction(args):
    if args.demo == "quadratic":
        n = 10_000 if args.n is None else args.n
        if n < 100:
            raise UsageError("--n must be >= 100")
        _, report = quadratic_counterexample(n, args.z1)
        doc = report.to_json()
    elif args.demo == "tangent":
        count = 3 if args.count is None else args.count
        if count < 1:
            raise UsageError("--count must be >= 1")
        doc = {"fixed_points": [{"zeta": z, "derivative_magnitude": d} for z, d in tangent_fixed_points(count)]}
    else:
        _require(args, "L", "C", "omega", "r")
        r_prime = args.r if args.r_prime is None else args.r_prime
        args.r_prime = r_prime
        _positive(args, "L", "C", "omega", "r", "r_prime")
        filt = LowPassConfig(args.L, args.C, args.omega, args.r, r_prime)
        doc = basin_verification(filt, samples=args.samples, seed=args.seed).to_json()
    with _open_out(args.out) as fh:
        io.dump_json(doc, fh, args.precision)


def cmd_resistive(args):
    _require(args, "R", "p", "n")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    res = resistive_ladder(args.R, args.p, args.n, args.z1)
    if res.converges:
        doc = {"partial_sums": list(res.partial_sums), "converges": True,
               "limit": res.closed_form_limit.real, "formal": None}
    else:
        formal = res.closed_form_limit.formal
        doc = {"partial_sums": list(res.partial_sums), "converges": False, "limit": None,
               "formal": None if formal is None else formal.real, "note": res.closed_form_limit.label}
    with _open_out(args.out) as fh:
        io.dump_json(doc, fh, args.precision)


def build_parser():
    parser = _Parser(prog="lcladder", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="output path ('-' or omitted for stdout)")
    common.add_argument("--precision", choices=sorted(io.PRECISIONS), default="standard")
    common.add_argument("--params", default=None, help="flat JSON object supplying option defaults")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("fixed-point", parents=[common], help="fixed points and gamma for a given t")
    p.add_argument("--t", type=complex_pair)
    p.set_defaults(func=cmd_fixed_point)
    subs["fixed-point"] = p

    p = sub.add_parser("iterate", parents=[common], help="normalised recursion trace as CSV")
    p.add_argument("--t", type=complex_pair)
    p.add_argument("--p1", type=complex_pair, default=complex(1.0))
    p.add_argument("--n", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_iterate)
    subs["iterate"] = p

    p = sub.add_parser("sweep", parents=[common], help="low-pass frequency sweep as CSV")
    p.add_argument("--L", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--r-prime", dest="r_prime", type=float, default=None)
    p.add_argument("--omega-min", dest="omega_min", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--limit", action="store_true", help="use closed-form lossless limits")
    p.set_defaults(func=cmd_sweep)
    subs["sweep"] = p

    p = sub.add_parser("packet", parents=[common], help="Gaussian wave packet along the ladder")
    p.add_argument("--L", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--r-prime", dest="r_prime", type=float, default=None)
    p.add_argument("--omega0", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--sections", type=int_list)
    p.add_argument("--t-center", dest="t_center", type=float, default=None)
    p.add_argument("--frequency-grid", dest="frequency_grid", type=int, default=None)
    p.add_argument("--split", action="store_true", help="one CSV per section instead of long format")
    p.add_argument("--summary", default=None, help="peak-time summary JSON path")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_packet)
    subs["packet"] = p

    p = sub.add_parser("contraction", parents=[common], help="fixed-point counterexamples and basin check")
    p.add_argument("--demo", choices=["quadratic", "tangent", "ladder-basin"], required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--z1", type=float, default=0.0)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--L", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--r-prime", dest="r_prime", type=float, default=None)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_contraction)
    subs["contraction"] = p

    p = sub.add_parser("resistive", parents=[common], help="resistive ladder partial sums")
    p.add_argument("--R", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--z1", type=float, default=None)
    p.set_defaults(func=cmd_resistive)
    subs["resistive"] = p
    return parser, subs


def _apply_params(parser, subs, args, argv):
    try:
        with open(args.params, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read --params file: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("--params file must hold a flat JSON object")
    sp = subs[args.command]
    known = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("params", "help"):
            raise UsageError(f"unknown parameter {key!r} in --params file")
        action = known[dest]
        if isinstance(value, (dict, list)) and not (isinstance(value, list) and len(value) == 2):
            raise UsageError(f"parameter {key!r} must be a scalar")
        if action.type is not None and not isinstance(value, bool):
            text = ",".join(str(v) for v in value) if isinstance(value, list) else str(value)
            try:
                value = action.type(text)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"bad value for {key!r}: {exc}") from None
        defaults[dest] = value
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


_NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d|inf|nan)")


def _join_negative_values(argv):
    """Rewrite ``--t -1,0`` as ``--t=-1,0`` so argparse does not read it as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None):
    parser, subs = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        if args.params:
            try:
                args = _apply_params(parser, subs, args, argv)
            except SystemExit as exc:
                return exc.code
        if getattr(args, "r_prime", 0.0) is None and args.command in ("sweep", "packet"):
            args.r_prime = args.r
        args.func(args)
    except UsageError as exc:
        print(f"lcladder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CutError, PoleError) as exc:
        print(f"lcladder: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except BandwidthError as exc:
        print(f"lcladder: bandwidth error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SearchFailure as exc:
        print(f"lcladder: search failure: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except ValueError as exc:
        print(f"lcladder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
