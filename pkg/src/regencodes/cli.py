"""Command-line front end: codecs, cost model, simulator and benchmarks.

Every command prints the fully resolved parameters before its results.
Errors are reported as a JSON object on stderr with a nonzero exit code.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from fractions import Fraction

from . import __version__, bench, costmodel, footprint, simulate
from .codec import Codec
from .errors import RegenError
from .gf import DEFAULT_POLYS, build_field
from .shares import CodeConfig, Scheme, TrafficCounter, read_share, write_share

COST_COLUMNS = costmodel.CSV_COLUMNS
ARC_COLUMNS = ["scheme", "n", "k", "delta", "p", "lambda", "M", "cost", "availability"]
TRADEOFF_COLUMNS = [
    "target", "scheme", "n", "k", "d", "storage_total", "repair_bandwidth", "unavailability",
]
GRID_COMMANDS = ("analyze", "optimize-d", "optimize-n", "arc", "simulate")
EXIT_USAGE = 2
EXIT_ERROR = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- output -------------------------------------------------------------------


def _plain(value):
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def emit(out, fmt: str, command: str, params: dict, rows: list[dict], columns: list[str], summary=None):
    params = _plain(params)
    rows = [_plain(r) for r in rows]
    if fmt == "json":
        doc = {"command": command, "params": params, "results": rows}
        if summary is not None:
            doc["summary"] = _plain(summary)
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
        return
    out.write(f"# command: {command}\n")
    out.write(f"# params: {json.dumps(params, sort_keys=True)}\n")
    if summary is not None:
        out.write(f"# summary: {json.dumps(_plain(summary), sort_keys=True)}\n")
    if fmt == "csv":
        writer = csv.DictWriter(out, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({c: r.get(c, "") for c in columns})
        return
    cells = [[_fmt_cell(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# -- parameter helpers --------------------------------------------------------


def _prob(args, value):
    """p as a float, or an exact Fraction parsed from its decimal text with --exact."""
    if getattr(args, "exact", False):
        return Fraction(str(value))
    return float(value)


def _field(args):
    return build_field(args.field_q, args.poly)


def _resolved(args, skip=("func", "_parser", "grid", "files", "helpers")) -> dict:
    out = {k: v for k, v in vars(args).items() if k not in skip}
    if out.get("poly") is None and "field_q" in out:
        out["poly"] = DEFAULT_POLYS[args.field_q]
    if isinstance(out.get("poly"), int):
        out["poly"] = hex(out["poly"])
    return out


def _model(args, d=None, point=None) -> costmodel.SystemModel:
    return costmodel.SystemModel(
        args.n,
        args.k,
        args.d if d is None else d,
        _prob(args, args.p),
        args.lam,
        args.M,
        point or args.point,
    )


def _cost_row(rep: costmodel.CostReport) -> dict:
    return rep.csv_row()


# -- command implementations --------------------------------------------------


def cmd_info(args, out):
    f = _field(args)
    rows = [
        {"key": "version", "value": __version__},
        {"key": "field_q", "value": f.q},
        {"key": "reduction_poly", "value": hex(f.reduction_poly)},
        {"key": "field_order", "value": f.order},
        {"key": "symbol_bytes", "value": f.symbol_bytes},
    ]
    for r in footprint.footprint_table(args.n, args.k, args.field_q):
        rows.append({"key": f"matrix_bytes_nominal_{r['scheme']}", "value": r["nominal_bytes"]})
        rows.append({"key": f"matrix_bytes_actual_{r['scheme']}", "value": r["actual_bytes"]})
    emit(out, args.format, "info", _resolved(args), rows, ["key", "value"])


def _code_config(args, file_size=None) -> CodeConfig:
    return CodeConfig(
        Scheme.parse(args.scheme),
        args.n,
        args.k,
        args.d,
        q=args.field_q,
        file_size=file_size,
        systematic=args.systematic,
    )


def cmd_encode(args, out):
    with open(args.file, "rb") as fh:
        data = fh.read()
    cfg = _code_config(args, len(data))
    shares = Codec(cfg, seed=args.seed, field=_field(args)).encode(data)
    os.makedirs(args.out_dir, exist_ok=True)
    stem = os.path.basename(args.file)
    rows = []
    for s in shares:
        path = os.path.join(args.out_dir, f"{stem}.{s.node_index:03d}.rgc")
        write_share(path, s)
        rows.append({"node": s.node_index, "path": path, "bytes": os.path.getsize(path)})
    params = _resolved(args) | {"file": args.file, "d": cfg.d, "file_size": len(data)}
    emit(out, args.format, "encode", params, rows, ["node", "path", "bytes"])


def _load(paths):
    shares = [read_share(p) for p in paths]
    if not shares:
        raise UsageError("no share files given")
    return shares


def cmd_decode(args, out):
    shares = _load(args.files)
    cfg = shares[0].config
    data = Codec(cfg, seed=args.seed, field=build_field(cfg.q, args.poly)).decode(shares)
    with open(args.output, "wb") as fh:
        fh.write(data)
    params = _resolved(args) | {
        "scheme": cfg.scheme.name, "n": cfg.n, "k": cfg.k, "d": cfg.d,
        "systematic": cfg.systematic, "shares": list(args.files),
    }
    rows = [{"output": args.output, "bytes": len(data), "nodes_used": len(shares)}]
    emit(out, args.format, "decode", params, rows, ["output", "bytes", "nodes_used"])


def cmd_repair(args, out):
    helpers = _load(args.helpers)
    cfg = helpers[0].config
    codec = Codec(cfg, seed=args.seed, field=build_field(cfg.q, args.poly))
    traffic = TrafficCounter()
    share = codec.repair(helpers, args.failed, traffic, repair_seed=args.seed)
    write_share(args.output, share)
    params = _resolved(args) | {
        "scheme": cfg.scheme.name, "n": cfg.n, "k": cfg.k, "d": cfg.d,
        "helpers": list(args.helpers),
    }
    rows = [{
        "failed": args.failed, "output": args.output,
        "traffic_bytes": traffic.bytes, "transfers": traffic.transfers,
    }]
    emit(out, args.format, "repair", params, rows, ["failed", "output", "traffic_bytes", "transfers"])


def run_analyze(args):
    rep = costmodel.system_repair_cost(_model(args), args.law)
    return [_cost_row(rep) | {"decode_term": float(rep.decode_term), "optimal_term": float(rep.optimal_term),
                               "conditioning_mass": float(rep.conditioning_mass)}]


def run_optimize_d(args):
    p = _prob(args, args.p)
    d, rep = costmodel.optimize_d(args.n, args.k, p, args.lam, args.M, args.point, args.law)
    if args.curve:
        curve = costmodel.cost_curve(args.n, args.k, p, args.lam, args.M, args.point, args.law)
        return [_cost_row(r) | {"d_opt": d} for r in curve.values()]
    return [_cost_row(rep) | {"d_opt": d}]


def run_optimize_n(args):
    p = _prob(args, args.p)
    n, d, rep = costmodel.optimize_n(args.k, p, args.lam, args.M, args.point, args.n_max, args.law)
    return [_cost_row(rep) | {"n_opt": n, "d_opt": d, "n_closed_form": costmodel.n_opt_closed_form(args.k)}]


def _arc_delta(args):
    if args.delta_multiple is not None:
        return costmodel.arc_delta(args.n, args.k, args.delta_multiple)
    if args.delta in (None, "ideal"):
        return None
    return int(args.delta)


def run_arc(args):
    p = _prob(args, args.p)
    delta = _arc_delta(args)
    rep = costmodel.arc_system_cost(args.n, args.k, p, args.lam, args.M, delta, args.law)
    _, msr = costmodel.optimize_d(args.n, args.k, p, args.lam, args.M, "msr", args.law)
    return [{
        "scheme": "arc", "n": args.n, "k": args.k, "delta": "ideal" if delta is None else delta,
        "p": float(p), "lambda": args.lam, "M": args.M, "cost": float(rep.expected_cost),
        "availability": float(rep.availability),
        "savings_vs_msr": float(1 - rep.expected_cost / msr.expected_cost),
    }]


def run_simulate(args):
    model = costmodel.SystemModel(args.n, args.k, args.d, float(args.p), args.lam, args.M,
                                  "msr" if args.point == "arc" else args.point)
    cfg = simulate.SimConfig(
        model,
        horizon_days=args.horizon,
        trials=args.trials,
        seed=args.seed,
        events=args.events,
        point=args.point,
        arc_delta=args.arc_delta,
        law=args.law,
        full_state=args.full_state,
    )
    res = simulate.run_simulation(cfg)
    rows = [{c: getattr(t, c) for c in simulate.CSV_COLUMNS} for t in res.trials]
    return rows, res.to_dict() | {"z_score": res.z_score}


def _grid_combos(args, parser_for) -> list[argparse.Namespace]:
    if not args.grid:
        return [args]
    sweep = parse_grid_file(args.grid)
    types = {a.dest: a.type for a in parser_for._actions if a.dest in sweep}
    unknown = sorted(set(sweep) - set(types))
    if unknown:
        raise UsageError(f"grid keys not accepted by {args.command}: {', '.join(unknown)}")
    keys = list(sweep)
    combos = []
    for values in itertools.product(*(sweep[k] for k in keys)):
        ns = argparse.Namespace(**vars(args))
        for key, raw in zip(keys, values):
            conv = types[key] or str
            setattr(ns, key, conv(raw))
        combos.append(ns)
    return combos


def parse_grid_file(path) -> dict:
    """``key=v1,v2,...`` per line; blank lines and ``#`` comments are ignored."""
    sweep = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value[,value...]")
            key, vals = line.split("=", 1)
            key = key.strip().replace("-", "_")
            values = [v.strip() for v in vals.split(",") if v.strip()]
            if not values:
                raise UsageError(f"{path}:{lineno}: no values for {key}")
            sweep[key] = values
    return sweep


def _run_gridded(args, out, runner, columns, parser_for):
    rows, summaries = [], []
    for ns in _grid_combos(args, parser_for):
        result = runner(ns)
        if isinstance(result, tuple):
            part, summary = result
            summaries.append(summary)
        else:
            part = result
        rows.extend(part)
    params = _resolved(args)
    if args.grid:
        params["grid"] = parse_grid_file(args.grid)
    summary = None
    if summaries:
        summary = summaries[0] if len(summaries) == 1 else summaries
    emit(out, args.format, args.command, params, rows, columns, summary)


def cmd_tradeoff(args, out):
    twin = None
    pts = costmodel.compare_schemes(
        args.k, _prob(args, args.p), args.lam, args.M, args.targets, args.n_max, twin, args.law, args.sweep
    )
    rows = [p.to_dict() for p in pts]
    emit(out, args.format, "tradeoff", _resolved(args), rows, TRADEOFF_COLUMNS)


def cmd_bench(args, out):
    grid = []
    for k in args.ks:
        n = args.n or 2 * k
        for name in args.schemes:
            scheme = Scheme.parse(name)
            if args.systematic and scheme is Scheme.RL:
                continue
            d = None if scheme is Scheme.RS else (args.d or 2 * k - 2)
            grid.append((scheme, n, k, d))
    configs, skipped = [], []
    for scheme, n, k, d in grid:
        try:
            configs.append(CodeConfig(scheme, n, k, d, q=args.field_q, systematic=args.systematic))
        except RegenError as exc:
            skipped.append({"scheme": scheme.name, "n": n, "k": k, "d": d, "reason": str(exc)})
    skip_objs = []
    points = bench.run_bench(
        configs, tuple(args.phases), args.reps, int(args.M * bench.MB), args.seed, True, skip_objs
    )
    for s in skip_objs:
        c = s.config
        skipped.append({"scheme": c.scheme.name, "n": c.n, "k": c.k, "d": c.d, "reason": s.reason})
    summary = {"ratios": bench.ratios(points), "skipped": skipped}
    emit(out, args.format, "bench", _resolved(args), [p.to_dict() for p in points], bench.CSV_COLUMNS, summary)


# -- parser ---------------------------------------------------------------------


def _int_list(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _float_list(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _poly(text):
    return int(str(text), 0)


def _cost_args(p, with_d=True, n=True):
    if n:
        p.add_argument("--n", type=int, default=32, help="devices per file (default 32)")
    p.add_argument("--k", type=int, default=16, help="recovery threshold (default 16)")
    if with_d:
        p.add_argument("--d", type=int, default=29, help="repair degree (default 29)")
    p.add_argument("--p", type=float, default=0.99, help="device availability (default 0.99)")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, default=1.0, help="repairs per device per day")
    p.add_argument("--M", type=float, default=64.0, help="file size in MB (default 64)")
    p.add_argument("--law", choices=costmodel.LAWS, default="survivors",
                   help="live-helper law: Binomial(n-1,p) survivors or Binomial(n,p) literal")
    p.add_argument("--exact", action="store_true", help="exact rational arithmetic (p parsed as a decimal)")
    p.add_argument("--grid", help="key=value[,value...] sweep file")


def _global_args(p, defaults: bool):
    def dflt(v):
        return v if defaults else argparse.SUPPRESS

    p.add_argument("--seed", type=int, default=dflt(0), help="seed for every random choice (default 0)")
    p.add_argument("--field-q", type=int, choices=(8, 16), default=dflt(16), help="symbol width in bits")
    p.add_argument("--poly", type=_poly, default=dflt(None), help="reduction polynomial, e.g. 0x1100B")
    p.add_argument("--format", choices=("json", "csv", "table"), default=dflt("json"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="regencodes", description=__doc__.splitlines()[0])
    _global_args(parser, defaults=True)
    parser.add_argument("--version", action="version", version=__version__)
    # the same flags after the subcommand; suppressed defaults keep the top-level values
    common = _Parser(add_help=False)
    _global_args(common, defaults=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser
    sub.add_parser = lambda name, **kw: _add(name, parents=[common], **kw)

    p = sub.add_parser("info", help="field parameters and matrix footprints")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--k", type=int, default=16)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("encode", help="write n share files")
    p.add_argument("--scheme", choices=[s.name.lower() for s in Scheme], default="pm")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--d", type=int, default=None, help="repair degree (default min(2k-2, n-1))")
    p.add_argument("--systematic", action="store_true")
    p.add_argument("--out-dir", default=".", help="directory for the .rgc share files")
    p.add_argument("file")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="rebuild a file from any k share files")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("repair", help="regenerate one lost share from helper shares")
    p.add_argument("--failed", type=int, required=True)
    p.add_argument("--helpers", nargs="+", required=True)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("analyze", help="expected system repair cost")
    _cost_args(p)
    p.add_argument("--point", choices=costmodel.POINTS, default="msr")
    p.set_defaults(func=lambda a, o: _run_gridded(a, o, run_analyze, COST_COLUMNS, a._parser))

    p = sub.add_parser("optimize-d", help="best repair degree for (n, k, p)")
    _cost_args(p, with_d=False)
    p.add_argument("--point", choices=costmodel.POINTS, default="msr")
    p.add_argument("--curve", action="store_true", help="emit the cost of every d")
    p.set_defaults(func=lambda a, o: _run_gridded(a, o, run_optimize_d, COST_COLUMNS + ["d_opt"], a._parser))

    p = sub.add_parser("optimize-n", help="best (n, d) for (k, p)")
    _cost_args(p, with_d=False, n=False)
    p.add_argument("--point", choices=costmodel.POINTS, default="msr")
    p.add_argument("--n-max", type=int, default=None, help="largest n searched (default 8k)")
    p.set_defaults(func=lambda a, o: _run_gridded(
        a, o, run_optimize_n, COST_COLUMNS + ["n_opt", "d_opt", "n_closed_form"], a._parser))

    p = sub.add_parser("arc", help="adaptive regenerating code cost")
    _cost_args(p, with_d=False)
    p.add_argument("--delta", default="ideal", help="sub-block count: 'ideal' or an integer")
    p.add_argument("--delta-multiple", type=int, default=None,
                   help="use delta = multiple * (n-k) instead of --delta")
    p.set_defaults(func=lambda a, o: _run_gridded(a, o, run_arc, ARC_COLUMNS + ["savings_vs_msr"], a._parser))

    p = sub.add_parser("tradeoff", help="storage vs bandwidth per unavailability target")
    _cost_args(p, with_d=False, n=False)
    p.add_argument("--targets", type=_float_list, default=[1e-2, 1e-4, 1e-6])
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--sweep", type=int, default=0, help="extra n values beyond the minimum")
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the repair cost")
    _cost_args(p)
    p.add_argument("--point", choices=("msr", "mbr", "arc"), default="msr")
    p.add_argument("--arc-delta", type=int, default=None)
    p.add_argument("--events", type=int, default=None, help="repairs per trial (overrides --horizon)")
    p.add_argument("--horizon", type=float, default=1000.0, help="simulated days per trial")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--full-state", choices=("resample", "optimal"), default="resample")
    p.set_defaults(func=lambda a, o: _run_gridded(a, o, run_simulate, simulate.CSV_COLUMNS, a._parser))

    p = sub.add_parser("bench", help="time encode/decode/repair")
    p.add_argument("--ks", type=_int_list, default=[4, 8, 12, 16])
    p.add_argument("--n", type=int, default=None, help="devices (default 2k)")
    p.add_argument("--d", type=int, default=None, help="repair degree (default 2k-2)")
    p.add_argument("--schemes", type=lambda s: s.split(","), default=["rs", "pm", "el", "rl"])
    p.add_argument("--phases", type=lambda s: s.split(","), default=list(bench.PHASES))
    p.add_argument("--systematic", action="store_true")
    p.add_argument("--M", type=float, default=16.0, help="payload in MB (default 16)")
    p.add_argument("--reps", type=int, default=3)
    p.set_defaults(func=cmd_bench)

    for name, action in sub.choices.items():
        action.set_defaults(_parser=action)
    return parser


def _error(err, kind: str, message: str, code: int) -> int:
    err.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")
    return code


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.grid if hasattr(args, "grid") else False:
            if args.command not in GRID_COMMANDS:
                raise UsageError(f"--grid is not supported by {args.command}")
        buf = io.StringIO()
        args.func(args, buf)
        out.write(buf.getvalue())
        return 0
    except UsageError as exc:
        return _error(err, "UsageError", str(exc), EXIT_USAGE)
    except (RegenError, costmodel.CostModelError, OSError, ValueError) as exc:
        return _error(err, type(exc).__name__, str(exc), EXIT_ERROR)


if __name__ == "__main__":
    sys.exit(main())
