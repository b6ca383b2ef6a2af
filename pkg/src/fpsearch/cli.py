"""Command-line front end.

Exit codes: 0 success, 1 claim failure, 2 usage error, 3 numerical failure.
Any flag may also come from a ``--config`` file of ``key=value`` lines
(keys are the long flag names, dashes or underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import applications as apps
from . import bounds, gate, ode, verify
from .errors import DomainError, IntegrationError, QuadratureError
from .schedules import ScheduleKind, ScheduleParams, make_schedule, sample_schedule, total_time

EXIT_OK, EXIT_CLAIM, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
FAMILIES = [k.value for k in ScheduleKind]
DOMINANCE_TOL = 1e-6


class UsageError(Exception):
    pass


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def write_csv(stream, header, rows):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(fmt(v)) if math.isfinite(v) else None
    return obj


def emit_json(stream, payload):
    json.dump(_jsonable(payload), stream, indent=2, sort_keys=True)
    stream.write("\n")


class _Output:
    """Context manager yielding the output stream (stdout for '-' or None)."""

    def __init__(self, path):
        self.path = path
        self._fh = None

    def __enter__(self):
        if self.path in (None, "-"):
            return sys.stdout
        self._fh = open(self.path, "w", newline="")
        return self._fh

    def __exit__(self, *exc):
        if self._fh is not None:
            self._fh.close()


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _schedule(args):
    return make_schedule(args.family, args.epsilon, args.w)


def cmd_schedule(args):
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    t, s, sd = sample_schedule(_schedule(args), args.samples)
    with _Output(args.output) as out:
        if args.format == "json":
            emit_json(out, {"t": t.tolist(), "s": s.tolist(), "ds_dt": sd.tolist()})
        else:
            write_csv(out, ["t", "s", "ds_dt"], zip(t, s, sd))
    return EXIT_OK


def _thm3(args, lam):
    if args.family == ScheduleKind.STANDARD.value and lam >= args.w:
        return bounds.theorem3_closed_standard(lam, args.epsilon, args.w).raw
    return None


def _simulate_one(sched, lam, args):
    config = ode.IntegratorConfig(step=args.step)
    if getattr(args, "frame", "lab") == "phi":
        return ode.evolve_phi_frame(sched, lam, config)
    return ode.evolve(sched, lam, config)


def cmd_simulate(args):
    sched = _schedule(args)
    res = _simulate_one(sched, args.lam, args)
    thm1 = bounds.theorem1_bound(sched, args.lam)
    row = {
        "lambda": args.lam,
        "P": res.success_probability,
        "delta": res.error_amplitude,
        "bound_thm1": thm1.raw,
        "bound_thm3": _thm3(args, args.lam),
        "T": sched.total_time,
        "steps": res.steps,
        "norm_drift": res.norm_drift,
    }
    with _Output(args.output) as out:
        if args.format == "csv":
            write_csv(out, list(row), [list(row.values())])
        else:
            emit_json(out, row)
    return EXIT_OK


def lambda_grid(lo, hi, count, spacing):
    if count < 1:
        raise UsageError("--count must be positive")
    if not 0 < lo <= hi <= 1:
        raise UsageError("need 0 < lambda-min <= lambda-max <= 1")
    if count == 1:
        return np.array([lo])
    if spacing == "log":
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def cmd_sweep(args):
    sched = _schedule(args)
    grid = lambda_grid(args.lambda_min, args.lambda_max, args.count, args.spacing)
    header = ["lambda", "P", "delta", "bound_thm1", "bound_thm3", "dominated", "error"]
    rows, failed, undominated = [], 0, 0
    config = ode.IntegratorConfig(step=args.step)
    results = {}
    try:
        for lam, res in ode.sweep_lambda(sched, grid, config, jobs=args.jobs):
            results[lam] = res
    except IntegrationError:
        # fall back to point-by-point so each failure is recorded against its row
        results = {}
    for lam in grid:
        lam = float(lam)
        try:
            res = results.get(lam) or ode.evolve(sched, lam, config)
        except (DomainError, IntegrationError) as exc:
            failed += 1
            rows.append([lam, None, None, None, None, None, str(exc)])
            continue
        thm1 = bounds.theorem1_bound(sched, lam).raw
        dominated = res.error_amplitude <= thm1 + DOMINANCE_TOL
        undominated += not dominated
        rows.append([lam, res.success_probability, res.error_amplitude, thm1, _thm3(args, lam), dominated, ""])
    with _Output(args.output) as out:
        if args.format == "json":
            emit_json(out, [dict(zip(header, r)) for r in rows])
        else:
            write_csv(out, header, rows)
    if failed:
        return EXIT_NUMERIC
    return EXIT_CLAIM if undominated else EXIT_OK


def cmd_bounds(args):
    sched = _schedule(args)
    rep = bounds.theorem1_bound(sched, args.lam)
    payload = {"lambda": args.lam, "family": args.family, "epsilon": args.epsilon, "w": args.w, "theorem1": rep.to_dict()}
    thm3 = None
    if args.family == ScheduleKind.STANDARD.value and args.lam >= args.w:
        thm3 = bounds.theorem3_closed_standard(args.lam, args.epsilon, args.w).to_dict()
    payload["theorem3_closed"] = thm3
    if args.family == ScheduleKind.FAST.value:
        payload["theorem2_exact_at_w"] = bounds.theorem2_exact(args.epsilon, args.w)
    if args.dt is not None:
        payload["theorem4"] = bounds.theorem4_bound(sched, args.lam, args.dt)
    with _Output(args.output) as out:
        emit_json(out, payload)
    return EXIT_OK


def cmd_gate(args):
    sched = _schedule(args)
    seq = gate.angle_sequence(sched, args.dt, include_endpoint=args.include_endpoint)
    with _Output(args.output) as out:
        if args.format == "json":
            payload = {
                "dt": args.dt,
                "slices": len(seq),
                "queries": seq.query_count,
                "degenerate": seq.degenerate,
                "alpha": seq.alphas.tolist(),
                "beta": seq.betas.tolist(),
            }
            if args.lam is not None:
                res = gate.run_sequence(seq, args.lam)
                payload.update(
                    {
                        "lambda": args.lam,
                        "P": res.success_probability,
                        "delta": res.error_amplitude,
                        "bound_thm4": bounds.theorem4_bound(sched, args.lam, args.dt),
                    }
                )
            emit_json(out, payload)
        else:
            write_csv(out, ["j", "alpha", "beta"], ((j, a, b) for j, (a, b) in enumerate(seq.pairs)))
    return EXIT_OK


def cmd_relprime(args):
    _, _, report = apps.run_relprime_search(args.J, args.epsilon, dt=args.dt, config=ode.IntegratorConfig(step=args.step))
    with _Output(args.output) as out:
        emit_json(out, report)
    return EXIT_OK


def cmd_oaa(args):
    rng = np.random.default_rng(args.seed)
    V = apps.random_unitary(2**args.n, rng)
    psi = apps.random_state(2**args.n, rng)
    inst = apps.build_oaa_unitary(args.n, args.m, args.lam, V, rng=rng)
    sched = _schedule(args)
    payload = {"n": args.n, "m": args.m, "lambda": args.lam, "seed": args.seed, "convention": args.convention}
    if args.dt is not None:
        seq = gate.angle_sequence(sched, args.dt)
        payload["mode"] = "gate"
        payload["queries"] = seq.query_count
        payload["P"] = apps.run_oblivious_amplification(inst, psi, sequence=seq)
        payload["P_two_level"] = gate.run_sequence(seq, args.lam).success_probability
    else:
        payload["mode"] = "adiabatic"
        payload["P"] = apps.run_oblivious_amplification(
            inst, psi, schedule=sched, convention=args.convention, config=ode.IntegratorConfig(step=args.step)
        )
        payload["P_two_level"] = ode.evolve(sched, args.lam).success_probability
    with _Output(args.output) as out:
        emit_json(out, payload)
    return EXIT_OK


def cmd_verify(args):
    names = args.suite or None
    unknown = [n for n in names or () if n not in verify.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(verify.SUITES)}")
    results = verify.run_suites(names, quick=args.quick, seed=args.seed, jobs=args.jobs)
    payload = {name: [c.to_dict() for c in claims] for name, claims in results.items()}
    failing = [c.claim for claims in results.values() for c in claims if not c.passed]
    payload["all_passed"] = not failing
    payload["failing"] = failing
    with _Output(args.output) as out:
        emit_json(out, payload)
    for name in failing:
        print(f"FAILED {name}", file=sys.stderr)
    return EXIT_CLAIM if failing else EXIT_OK


FIGURE2_W = 1.0 / 20.0
FIGURE2_FAMILIES = ("constant", "standard", "fast")


def figure2_tables(samples=201, inset_points=40):
    """Schedule curves against t/T at w = 1/20 and the T-vs-w inset (T in units of 1/eps)."""
    u = np.linspace(0.0, 1.0, samples)
    curves = [u]
    for fam in FIGURE2_FAMILIES:
        sched = make_schedule(fam, 1.0, FIGURE2_W)
        curves.append(np.asarray(sched.s(u * sched.total_time)))
    ws = np.geomspace(1e-3, 0.999, inset_points)
    inset = [
        (w, *(total_time(ScheduleParams(k, 1.0, w)) for k in ("constant_primed", "standard", "fast")))
        for w in ws
    ]
    curve_header = ["t_over_T"] + [f"s_{f}" for f in FIGURE2_FAMILIES]
    inset_header = ["w", "T_constant_primed", "T_standard", "T_fast"]
    return (curve_header, list(zip(*curves))), (inset_header, inset)


def cmd_figure2(args):
    (ch, crows), (ih, irows) = figure2_tables(args.samples)
    if args.outdir in (None, "-"):
        write_csv(sys.stdout, ch, crows)
        sys.stdout.write("\n")
        write_csv(sys.stdout, ih, irows)
        return EXIT_OK
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "figure2_curves.csv", "w", newline="") as fh:
        write_csv(fh, ch, crows)
    with open(outdir / "figure2_inset.csv", "w", newline="") as fh:
        write_csv(fh, ih, irows)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _add_schedule_flags(p, need_w=True):
    p.add_argument("--family", choices=FAMILIES, default="standard")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--w", type=float, default=0.05 if need_w else 0.5)


def _add_common(p, fmt_default="csv"):
    p.add_argument("--config", help="file of key=value lines")
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--format", choices=["csv", "json"], default=fmt_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--step", type=float, default=None, help="fixed RK4 step (default: adaptive choice)")


def build_parser():
    parser = argparse.ArgumentParser(prog="fpsearch", description="fixed-point adiabatic search numerics")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="sample s(t) and ds/dt")
    _add_schedule_flags(p)
    p.add_argument("--samples", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="one two-level evolution")
    _add_schedule_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--frame", choices=["lab", "phi"], default="lab")
    _add_common(p, "json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="error amplitude and bounds over a lambda grid")
    _add_schedule_flags(p)
    p.add_argument("--lambda-min", type=float, default=None)
    p.add_argument("--lambda-max", type=float, default=1.0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="error bounds at one lambda")
    _add_schedule_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--dt", type=float, default=None)
    _add_common(p, "json")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gate", help="partial-reflection angle sequence")
    _add_schedule_flags(p)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--include-endpoint", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("relprime", help="relatively-prime state preparation")
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--dt", type=float, default=None)
    _add_common(p, "json")
    p.set_defaults(func=cmd_relprime)

    p = sub.add_parser("oaa", help="oblivious amplitude amplification on a random instance")
    _add_schedule_flags(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--convention", choices=[c.value for c in apps.Convention], default="as_written")
    _add_common(p, "json")
    p.set_defaults(func=cmd_oaa)

    p = sub.add_parser("verify", help="run numerical claim suites")
    p.add_argument("--suite", action="append", help=f"one of: {', '.join(verify.SUITES)} (repeatable)")
    p.add_argument("--quick", action="store_true", help="reduced grids")
    _add_common(p, "json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figure2", help="schedule comparison at w = 1/20 plus T-vs-w table")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--outdir", default="-")
    p.add_argument("--config")
    p.set_defaults(func=cmd_figure2)
    return parser


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def read_config(path):
    """Parse ``key=value`` lines; blank lines and '#' comments are skipped."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(subparser, config):
    actions = {a.dest: a for a in subparser._actions}
    for key, raw in config.items():
        dest = "lam" if key == "lambda" else key
        action = actions.get(dest)
        if action is None or dest in ("help", "config"):
            raise UsageError(f"config key {key!r} does not apply to this command")
        if isinstance(action, argparse._StoreTrueAction):
            low = raw.lower()
            if low not in _TRUE | _FALSE:
                raise UsageError(f"config key {key!r} needs a boolean")
            value = low in _TRUE
        elif isinstance(action, argparse._AppendAction):
            value = [v.strip() for v in raw.split(",") if v.strip()]
        else:
            try:
                value = action.type(raw) if action.type else raw
            except ValueError as exc:
                raise UsageError(f"config key {key!r}: {exc}") from exc
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config key {key!r} must be one of {list(action.choices)}")
        action.required = False
        subparser.set_defaults(**{dest: value})


def parse_args(argv):
    parser = build_parser()
    # config values become subcommand defaults, so they are read before the real parse
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    choices = parser._subparsers._group_actions[0].choices
    if known.config and argv and argv[0] in choices:
        _apply_config(choices[argv[0]], read_config(known.config))
    args = parser.parse_args(argv)
    if args.command == "sweep" and args.lambda_min is None:
        args.lambda_min = args.w
    return args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"fpsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # argparse reports usage problems through SystemExit(2)
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"fpsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, QuadratureError) as exc:
        print(f"fpsearch: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
