"""Command-line front end: ``gonodyn simulate|fixed-points|classify|predict|basin|sweep``.

Exit status is 0 on success, 2 for usage or configuration errors and 3
when a proven identity fails numerically.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from .exceptions import GonodynError, InvariantViolation, NotAFixedPoint, ParameterError
from .fixed_points import Form, all_fixed_points, default_seeds, form_of, residual
from .limits import (
    PredictorConfig,
    classify_region,
    predict_limit,
    predict_limit_general,
    simulate_until,
)
from .operator import GeneralOperator, HemophiliaParams, iterate, load_params, preset
from .scan import STATE_NAMES, GridError, basin, parse_grid, sweep
from .spectral import (
    HYPERBOLIC_TOL,
    IDENTITY_TOL,
    char_coeffs,
    classify,
    contains,
)
from .svg import heat_map, line_plot

log = logging.getLogger("gonodyn")


class UsageError(GonodynError):
    pass


def fmt(value) -> str:
    """17 significant digits so that printed floats read back exactly."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


class Table:
    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []
        self.meta = {}

    def add(self, *values):
        self.rows.append(list(values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        for key, value in self.meta.items():
            buf.write(f"# {key}={fmt(value)}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        def plain(v):
            if isinstance(v, (np.floating, np.integer, np.bool_)):
                return v.item()
            if isinstance(v, float) and not np.isfinite(v):
                return fmt(v)
            return v

        rows = [{c: plain(v) for c, v in zip(self.columns, row)} for row in self.rows]
        return json.dumps({"rows": rows, **{k: plain(v) for k, v in self.meta.items()}}, indent=2) + "\n"


# -- argument handling -------------------------------------------------------------

def load_operator(args):
    if args.params and args.preset:
        raise UsageError("give either --params or --preset, not both")
    if args.params:
        try:
            return load_params(args.params)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read parameters from {args.params}: {exc}") from exc
    try:
        return preset(args.preset or "classical")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def require_hemophilia(op, command):
    if not isinstance(op, HemophiliaParams):
        raise UsageError(f"{command} needs hemophilia parameters, not a general operator")
    return op


def parse_state(text, dim=4):
    if text is None:
        return None
    try:
        values = [float(v) for v in text.replace(" ", "").split(",")]
    except ValueError:
        raise UsageError(f"bad --state {text!r}; expected comma-separated numbers") from None
    if len(values) != dim:
        raise UsageError(f"--state needs {dim} values, got {len(values)}")
    if not all(np.isfinite(values)):
        raise UsageError("--state must be finite")
    return np.array(values)


def state_names(op):
    if isinstance(op, GeneralOperator):
        return [f"x{i + 1}" for i in range(op.eta)] + [f"y{l + 1}" for l in range(op.nu)]
    return list(STATE_NAMES)


def emit(text: str, args):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit_table(table: Table, args, svg=None):
    if args.format == "json":
        emit(table.to_json(), args)
    elif args.format == "svg":
        if svg is None:
            raise UsageError(f"--format svg is not available for {args.command}")
        emit(svg(), args)
    else:
        emit(table.to_csv(), args)


def spectrum_columns():
    return [f"lambda{k}_{part}" for k in range(1, 5) for part in ("re", "im")]


def spectrum_values(spectrum):
    return [v for lam in spectrum for v in (lam.real, lam.imag)]


def check_zero_and_two(params, s, spectrum):
    if not np.any(s):
        return
    coeffs = char_coeffs(params, s)
    if not (contains(spectrum, 0.0, IDENTITY_TOL) and contains(spectrum, 2.0, IDENTITY_TOL)
            and abs(coeffs.two_identity) <= IDENTITY_TOL):
        raise InvariantViolation(f"0 and 2 are not both eigenvalues at fixed point {s}")


# -- commands --------------------------------------------------------------------

def cmd_simulate(args):
    op = load_operator(args)
    names = state_names(op)
    t0 = parse_state(args.state, len(names)) if args.state else np.ones(len(names))
    traj = iterate(op, t0, n=args.steps)
    table = Table(["n"] + names)
    for k, s in enumerate(traj.states):
        table.add(k, *s)
    table.meta["termination"] = traj.termination.value

    def svg():
        return line_plot({name: traj.states[:, i] for i, name in enumerate(names)},
                         log=args.log, ylabel="abundance")

    emit_table(table, args, svg)


def _fixed_point_table(params, points):
    table = Table(["form", "x", "y", "u", "v", "residual"] + spectrum_columns() + ["class"])
    for fp in points:
        cls = classify(params, fp.state)
        check_zero_and_two(params, fp.state, cls.spectrum)
        table.add(fp.form.value, *fp.state, fp.residual, *spectrum_values(cls.spectrum), cls.tag.value)
    return table


def _seeds(args, params):
    return default_seeds(params, points=args.seed_points, low=args.seed_low, high=args.seed_high)


def cmd_fixed_points(args):
    params = require_hemophilia(load_operator(args), "fixed-points")
    points = all_fixed_points(params, search=not args.no_search, seeds=_seeds(args, params))
    emit_table(_fixed_point_table(params, points), args)


def cmd_classify(args):
    params = require_hemophilia(load_operator(args), "classify")
    if args.state:
        s = parse_state(args.state)
        try:
            char_coeffs(params, s)
        except NotAFixedPoint as exc:
            raise UsageError(f"{args.state} is not a fixed point: {exc}") from exc
        states = [(form_of(s), s)]
    else:
        states = [(fp.form, fp.state)
                  for fp in all_fixed_points(params, search=not args.no_search,
                                             seeds=_seeds(args, params))]
    table = Table(["x", "y", "u", "v", "form"] + spectrum_columns() + ["class"])
    for form, s in states:
        cls = classify(params, s)
        check_zero_and_two(params, s, cls.spectrum)
        table.add(*s, form.value if form else "", *spectrum_values(cls.spectrum), cls.tag.value)
    emit_table(table, args)


def cmd_predict(args):
    op = load_operator(args)
    names = state_names(op)
    if not args.state:
        raise UsageError("predict needs --state")
    t = parse_state(args.state, len(names))
    if isinstance(op, GeneralOperator):
        try:
            pred = predict_limit_general(op, t)
        except GonodynError as exc:
            raise UsageError(str(exc)) from exc
        region = ""
    else:
        pred = predict_limit(op, t, PredictorConfig(k_max=args.k_max))
        region = str(classify_region(t, op))
    sim = simulate_until(op, t, n=args.steps)
    limit = pred.limit if pred.limit is not None else [None] * len(names)
    table = Table(names + ["region", "prediction", "justification", "theorem_backed"]
                  + [f"limit_{n}" for n in names] + ["simulated", "steps"])
    table.add(*t, region, pred.outcome.value, pred.justification, pred.theorem_backed,
              *limit, sim.outcome.value, sim.steps)
    emit_table(table, args)


def cmd_basin(args):
    params = require_hemophilia(load_operator(args), "basin")
    if not args.grid:
        raise UsageError("basin needs --grid, e.g. x=0:5:100,u=0:5:100")
    axes = parse_grid(args.grid, allowed=STATE_NAMES)
    if len(axes) > 2:
        raise UsageError("basin grids have one or two free coordinates")
    pinned = parse_state(args.state) if args.state else np.zeros(4)
    records = basin(params, axes, pinned, steps=args.steps, k_max=args.k_max)
    table = Table(["index"] + list(STATE_NAMES)
                  + ["outcome", "steps", "prediction", "justification", "agrees"])
    for rec in records:
        table.add(":".join(map(str, rec.index)), *rec.state, rec.outcome, rec.steps,
                  rec.prediction.outcome.value, rec.prediction.justification, rec.agrees)
    bad = [r for r in records if r.agrees is False and r.prediction.theorem_backed]
    if bad:
        raise InvariantViolation(f"{len(bad)} proven predictions disagree with simulation, "
                                 f"first at {bad[0].state}")

    def svg():
        xs = axes[0].values
        ys = axes[1].values if len(axes) > 1 else np.array([0.0])
        ny = len(ys)
        cells = [[records[i * ny + j].outcome for j in range(ny)] for i in range(len(xs))]
        return heat_map(cells, xs, ys, axes[0].name, axes[1].name if len(axes) > 1 else "")

    emit_table(table, args, svg)


def cmd_sweep(args):
    params = require_hemophilia(load_operator(args), "sweep")
    if not args.grid:
        raise UsageError("sweep needs --grid, e.g. c1=0:1:200")
    axes = parse_grid(args.grid)
    rows = sweep(params, axes)
    forms = (Form.II, Form.III, Form.IV)
    columns = [a.name for a in axes] + ["valid"] + [f"exists_{f.value}" for f in forms]
    for f in forms:
        columns += [f"{f.value}_class", f"{f.value}_p1", f"{f.value}_p2", f"{f.value}_p3"]
    table = Table(columns)
    for row in rows:
        values = [row.values[a.name] for a in axes] + [row.valid] + [row.exists(f) for f in forms]
        for f in forms:
            entry = row.forms.get(f)
            if entry:
                cls, coeffs = entry
                values += [cls.tag.value, coeffs.p1, coeffs.p2, coeffs.p3]
            else:
                values += [None] * 4
        table.add(*values)
    emit_table(table, args)


COMMANDS = {
    "simulate": cmd_simulate,
    "fixed-points": cmd_fixed_points,
    "classify": cmd_classify,
    "predict": cmd_predict,
    "basin": cmd_basin,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("operator")
    src.add_argument("--params", help="JSON parameter file")
    src.add_argument("--preset", help="built-in parameters: classical (default) or w0")
    common.add_argument("--state", help="state as comma-separated coordinates, e.g. 1,1,1,1")
    common.add_argument("--steps", type=int, default=200, help="iteration cap (default 200)")
    common.add_argument("--grid", help="grid spec name=low:high:count[,name=low:high:count]")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gonodyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", parents=[common], help="iterate the operator")
    sim.add_argument("--log", action="store_true", help="log10|value| axis in SVG output")
    for name, text in (("fixed-points", "list fixed points with their forms"),
                       ("classify", "stability class of each fixed point")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--no-search", action="store_true", help="closed-form fixed points only")
        p.add_argument("--seed-points", type=int, default=5, help="Newton seeds per axis")
        p.add_argument("--seed-low", type=float, default=-3.0, help="lower seed bound")
        p.add_argument("--seed-high", type=float, default=3.0, help="upper seed bound")
    for name, text in (("predict", "predicted limit of one state"),
                       ("basin", "simulated and predicted limits over a state grid")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--k-max", type=int, default=50, help="iterate search depth")
    sub.add_parser("sweep", parents=[common], help="stability across a coefficient range")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.steps < 0:
        parser.error("--steps must be nonnegative")
    try:
        COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(f"gonodyn: invariant violated: {exc}", file=sys.stderr)
        return 3
    except (UsageError, GridError, ParameterError, NotAFixedPoint) as exc:
        print(f"gonodyn: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
