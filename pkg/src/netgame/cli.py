"""Command-line front end: solving, verification, sweeps and case studies.

Every command writes CSV (or JSON with ``--format json``) to ``--out`` or
standard output.  Parameters come from flags and optionally a ``key=value``
file given with ``--config``; flags win.  Exit codes: 0 ok, 1 usage or
input error, 2 verification mismatch, 3 resource limit.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from netgame import graph as gr
from netgame.closedform import SIZING_EXACT, SIZING_MODES, solve, witness
from netgame.errors import NetGameError, ResourceLimitError
from netgame.model import PARAM_KEYS, GameParams, parse_kv, to_fraction
from netgame.oracle import DEFAULT_LIMIT_N, solve_exhaustive
from netgame.planning import (
    DEFAULT_STEP,
    ResilienceCost,
    SweepRecord,
    attack_timing,
    best_attack,
    cost_ratio_sweep,
    grid,
    joint_sweep,
    plan_resilience,
)
from netgame.records import (
    OUTCOME_COLUMNS,
    format_number,
    outcome_record,
    outcome_row,
    write_csv,
    write_json,
)
from netgame.verify import DEFAULT_EPS, REPORT_COLUMNS, named_grid, verify_grid

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_RESOURCE = 0, 1, 2, 3

COSTS = {"quartic": ResilienceCost.quartic, "zero": ResilienceCost.zero}

#: Case-study settings: node count, the two cost pairs and the sweep windows.
CASE_N = 10
CASE_COSTS_1 = (Fraction(1, 20), Fraction(1, 8))
CASE_COSTS_2 = (Fraction(1, 30), Fraction(1, 20))
CASE_TAU = Fraction(3, 10)
CASE_TAU_WINDOW = (Fraction(2, 5), Fraction(3, 5))
CASE_RATIO_WINDOW = (Fraction(1), Fraction(3))
CASE_RATIO_STEP = Fraction(1, 10)

PLAN_COLUMNS = ("tau_R", "regime", "situation", "e1", "eA", "e2", "u_D", "u_A", "f_D")
TIMING_COLUMNS = ("tau", "tau_R", "regime", "situation", "e1", "eA", "e2", "u_D", "u_A")
FIG6_COLUMNS = ("tau_R", "u_D", "u_A", "situation")

# keys a config file may set, mapped to argparse destinations
CONFIG_KEYS = {
    **{k: k for k in PARAM_KEYS},
    "step": "step", "format": "format", "out": "out", "dot": "dot", "grid": "grid",
    "limit-n": "limit_n", "limit_n": "limit_n", "sizing": "sizing", "seed": "seed",
    "eps": "eps", "cost": "cost",
}


class UsageError(NetGameError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


class _Output:
    """Collects the text of one run and writes it once."""

    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.chunks: list[str] = []
        # lines always shown on stdout after the main output
        self.trailer: list[str] = []

    def table(self, rows: Sequence[Mapping[str, Any]], columns: Sequence[str],
              params: Mapping[str, Any], record: Any) -> None:
        if self.args.format == "json":
            self.chunks.append(write_json(record))
        else:
            self.chunks.append(write_csv(rows, columns, params))

    def flush(self) -> None:
        text = "".join(self.chunks)
        if self.args.out:
            _write(self.args.out, text)
        else:
            sys.stdout.write(text)
        for line in self.trailer:
            print(line)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


# --- argument handling -------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; flags override it")
    for key in PARAM_KEYS:
        p.add_argument(f"--{key}", default=None, help="fraction p/q or decimal")
    p.add_argument("--step", default=None, help=f"grid step (default {DEFAULT_STEP})")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--dot", default=None, help="also write the first-stage network as DOT")
    p.add_argument("--sizing", choices=SIZING_MODES, default=None)
    p.add_argument("--cost", choices=tuple(COSTS), default=None, help="resilience cost R_D")
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, text in (
        ("solve", "closed-form equilibrium for one parameter set"),
        ("oracle", "exhaustive equilibrium for one parameter set (small n)"),
        ("sweep-tauR", "closed form over recovery delays tau_R in [0, 1 - tau]"),
        ("plan", "resilience planning: best tau_R under the cost R_D"),
    ):
        _common(sub.add_parser(name, help=text))

    p = sub.add_parser("verify", help="compare closed form and oracle on a grid")
    _common(p)
    p.add_argument("--grid", default=None, help="named grid: default or lattice")
    p.add_argument("--limit-n", dest="limit_n", type=int, default=None)
    p.add_argument("--eps", default=None)

    p = sub.add_parser("sweep-attack", help="attacker's timing over tau")
    _common(p)
    p.add_argument("--tau-min", default=None)
    p.add_argument("--tau-max", default=None)
    p.add_argument("--fixed-tau-R", dest="fixed", action="store_true",
                   help="keep --tau_R fixed instead of planning it per tau")

    p = sub.add_parser("sweep-cost-ratio", help="joint optimum across c_A / c_D")
    _common(p)
    p.add_argument("--ratio-min", default=None)
    p.add_argument("--ratio-max", default=None)
    p.add_argument("--ratio-step", default=None)
    p.add_argument("--tau-min", default=None)
    p.add_argument("--tau-max", default=None)

    p = sub.add_parser("construct", help="build a named topology")
    _common(p)
    shape = p.add_mutually_exclusive_group(required=True)
    shape.add_argument("--harary", nargs=2, type=int, metavar=("N", "D"))
    shape.add_argument("--tree", type=int, metavar="N")
    shape.add_argument("--ring", type=int, metavar="N")
    shape.add_argument("--case4", nargs=2, type=int, metavar=("N", "K"))

    p = sub.add_parser("casestudy", help="reproduce a case-study data set")
    _common(p)
    p.add_argument("name", choices=("fig6", "fig7", "fig9", "fig10"))
    p.add_argument("--ratio-step", default=None)
    return parser


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from ``--config``, then from the built-in defaults."""
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
        for key, value in parse_kv(text).items():
            if key not in CONFIG_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            dest = CONFIG_KEYS[key]
            if getattr(args, dest, None) is None:
                setattr(args, dest, value)
    defaults = {
        "step": DEFAULT_STEP, "format": "csv", "sizing": SIZING_EXACT, "cost": "quartic",
        "seed": 0, "grid": "default", "limit_n": DEFAULT_LIMIT_N, "eps": DEFAULT_EPS,
    }
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    if args.format not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {args.format!r}")
    if args.sizing not in SIZING_MODES:
        raise UsageError(f"sizing must be one of {', '.join(SIZING_MODES)}")
    if args.cost not in COSTS:
        raise UsageError(f"cost must be one of {', '.join(COSTS)}")
    args.step = to_fraction(args.step)
    args.limit_n = int(args.limit_n)
    args.seed = int(args.seed)
    return args


def _params(args: argparse.Namespace, required: Sequence[str] = PARAM_KEYS,
            fallback: Mapping[str, Any] | None = None) -> GameParams:
    values = dict(fallback or {})
    for key in PARAM_KEYS:
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    missing = [k for k in required if k not in values]
    if missing:
        raise UsageError("missing " + ", ".join(f"--{k}" for k in missing))
    return GameParams.from_mapping(values)


def _fraction(value: Any, default: Fraction) -> Fraction:
    return default if value is None else to_fraction(value)


def _run_params(args: argparse.Namespace, **extra: Any) -> dict[str, Any]:
    out: dict[str, Any] = {"command": args.command}
    if args.command == "casestudy":
        out["case"] = args.name
    out.update({k: getattr(args, k) for k in PARAM_KEYS if getattr(args, k) is not None})
    out.update(extra)
    return out


# --- commands ----------------------------------------------------------------


def cmd_solve(args: argparse.Namespace, out: _Output) -> int:
    p = _params(args)
    o = solve(p, args.sizing)
    out.table([outcome_row(p, o)], OUTCOME_COLUMNS, _run_params(args, sizing=args.sizing),
              outcome_record(p, o))
    if args.dot:
        triple = witness(o, p)
        _write(args.dot, gr.to_dot(gr.Graph(p.n, tuple(sorted(triple.e1))), "E1"))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace, out: _Output) -> int:
    p = _params(args)
    r = solve_exhaustive(p, limit_n=args.limit_n)
    e1, eA, e2 = r.counts
    row = {
        "n": p.n, "c_D": p.c_D, "c_A": p.c_A, "tau": p.tau, "tau_R": p.tau_R,
        "regime": "", "situation": r.situation, "e1": e1, "eA": eA, "e2": e2,
        "u_D": r.u_D, "u_A": r.u_A, "delta": None,
    }
    record = {
        "params": p.to_dict(),
        "situation": r.situation,
        "counts": list(r.counts),
        "u_D": format_number(r.u_D),
        "u_A": format_number(r.u_A),
        "evaluations": r.evaluations,
        "survivors": len(r.best_triples),
        "witness": {k: [list(e) for e in sorted(getattr(r.witness, k))] for k in ("e1", "eA", "e2")},
    }
    out.table([row], OUTCOME_COLUMNS, _run_params(args, limit_n=args.limit_n), record)
    if args.dot:
        _write(args.dot, gr.to_dot(gr.Graph(p.n, tuple(sorted(r.witness.e1))), "E1"))
    return EXIT_OK


def _ns(args: argparse.Namespace) -> list[int]:
    if args.n is None:
        raise UsageError("missing --n")
    try:
        return [int(v) for v in str(args.n).split(",")]
    except ValueError:
        raise UsageError(f"--n must be integers separated by commas, got {args.n!r}") from None


def cmd_verify(args: argparse.Namespace, out: _Output) -> int:
    points = named_grid(args.grid, _ns(args), args.seed)
    report = verify_grid(points, args.eps, args.limit_n)
    params = _run_params(args, grid=args.grid, seed=args.seed, eps=to_fraction(args.eps))
    out.table(report.rows(), REPORT_COLUMNS, params,
              {"summary": report.summary(), "points": report.rows()})
    out.trailer.append(report.summary())
    return EXIT_MISMATCH if report.mismatches else EXIT_OK


def _plan_rows(result) -> list[dict[str, Any]]:
    rows = []
    for pt in result.curve:
        o = pt.outcome
        rows.append({
            "tau_R": pt.tau_R, "regime": o.regime, "situation": o.situation,
            "e1": o.counts[0], "eA": o.counts[1], "e2": o.counts[2],
            "u_D": o.u_D, "u_A": o.u_A, "f_D": pt.f_D,
        })
    return rows


def _sweep_tauR_rows(base: GameParams, step: Fraction, sizing: str) -> list[dict[str, str]]:
    rows = []
    for tau_R in grid(0, 1 - base.tau, step):
        p = base.with_(tau_R=tau_R)
        rows.append(outcome_row(p, solve(p, sizing)))
    return rows


def cmd_sweep_tauR(args: argparse.Namespace, out: _Output) -> int:
    base = _params(args, PARAM_KEYS[:4], {"tau_R": 0})
    rows = _sweep_tauR_rows(base, args.step, args.sizing)
    params = _run_params(args, step=args.step, sizing=args.sizing)
    out.table(rows, OUTCOME_COLUMNS, params, {"params": params, "rows": rows})
    return EXIT_OK


def _plan_record(result) -> dict[str, Any]:
    return {
        "params": result.base.to_dict(),
        "step": format_number(result.step),
        "best_tau_R": format_number(result.best_tau_R),
        "f_D": format_number(result.f_D),
        "situation": result.outcome.situation if result.outcome else None,
        "infeasible": [[format_number(a), format_number(b)] for a, b in result.infeasible_intervals],
        "rows": [{k: format_number(v) if not isinstance(v, str) else v for k, v in r.items()}
                 for r in _plan_rows(result)],
    }


def _plan_params(args: argparse.Namespace, result) -> dict[str, Any]:
    return _run_params(
        args, step=args.step, cost=args.cost, best_tau_R=result.best_tau_R, f_D=result.f_D,
        infeasible=",".join(f"{format_number(a)}:{format_number(b)}"
                            for a, b in result.infeasible_intervals),
    )


def cmd_plan(args: argparse.Namespace, out: _Output) -> int:
    base = _params(args, PARAM_KEYS[:4], {"tau_R": 0})
    result = plan_resilience(base, COSTS[args.cost](), args.step, args.sizing)
    out.table(_plan_rows(result), PLAN_COLUMNS, _plan_params(args, result), _plan_record(result))
    return EXIT_OK


def _sweep_records(records: Sequence[SweepRecord], args: argparse.Namespace,
                   out: _Output, **extra: Any) -> None:
    rows = [r.row() for r in records]
    best = best_attack(records)
    if best is not None:
        extra.update(best_tau=best.tau, best_u_A=best.u_A)
    params = _run_params(args, step=args.step, cost=args.cost, **extra)
    record = {
        "params": {k: _text(v) for k, v in params.items()},
        "rows": [{k: _text(v) for k, v in r.items()} for r in rows],
    }
    out.table(rows, SweepRecord.COLUMNS, params, record)


def _text(v: Any) -> Any:
    if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
        return format_number(v)
    return v


def _taus(args: argparse.Namespace) -> list[Fraction]:
    lo = _fraction(args.tau_min, CASE_TAU_WINDOW[0])
    hi = _fraction(args.tau_max, CASE_TAU_WINDOW[1])
    return grid(lo, hi, args.step)


def cmd_sweep_attack(args: argparse.Namespace, out: _Output) -> int:
    if args.fixed:
        base = _params(args, ("n", "c_D", "c_A", "tau_R"), {"tau": 0})
        result = attack_timing(base, args.step, args.sizing)
        rows = [
            {"tau": pt.tau, "tau_R": pt.tau_R, "regime": pt.outcome.regime,
             "situation": pt.outcome.situation, "e1": pt.outcome.counts[0],
             "eA": pt.outcome.counts[1], "e2": pt.outcome.counts[2],
             "u_D": pt.u_D, "u_A": pt.u_A}
            for pt in result.curve
        ]
        params = _run_params(args, step=args.step, best_tau=result.best_tau, u_A=result.u_A)
        record = {"params": {k: _text(v) for k, v in params.items()},
                  "rows": [{k: _text(v) for k, v in r.items()} for r in rows]}
        out.table(rows, TIMING_COLUMNS, params, record)
        return EXIT_OK
    base = _params(args, ("n", "c_D", "c_A"), {"tau": 0, "tau_R": 0})
    records = joint_sweep(base, COSTS[args.cost](), _taus(args), args.step, args.sizing)
    _sweep_records(records, args, out)
    return EXIT_OK


def cmd_sweep_cost_ratio(args: argparse.Namespace, out: _Output) -> int:
    if args.n is None or args.c_D is None:
        raise UsageError("sweep-cost-ratio needs --n and --c_D")
    lo = _fraction(args.ratio_min, CASE_RATIO_WINDOW[0])
    hi = _fraction(args.ratio_max, CASE_RATIO_WINDOW[1])
    ratios = grid(lo, hi, _fraction(args.ratio_step, CASE_RATIO_STEP))
    records = cost_ratio_sweep(args.c_D, ratios, int(args.n), COSTS[args.cost](), _taus(args),
                               args.step, args.sizing)
    _sweep_records(records, args, out)
    return EXIT_OK


def cmd_construct(args: argparse.Namespace, out: _Output) -> int:
    if args.harary:
        g, name = gr.harary(*args.harary), "H_{}_{}".format(*reversed(args.harary))
    elif args.tree is not None:
        g, name = gr.tree(args.tree), "tree"
    elif args.ring is not None:
        g, name = gr.ring(args.ring), "ring"
    else:
        g, name = gr.case4_witness(*args.case4), "case4"
    if args.format == "json":
        out.chunks.append(write_json({"n": g.n, "m": g.m, "edges": [list(e) for e in g.edges]}))
    else:
        out.chunks.append(gr.to_edge_list(g))
    if args.dot:
        _write(args.dot, gr.to_dot(g, name))
    return EXIT_OK


def cmd_casestudy(args: argparse.Namespace, out: _Output) -> int:
    n = CASE_N
    if args.name in ("fig6", "fig7"):
        c_D, c_A = CASE_COSTS_1
        base = GameParams(n, c_D, c_A, CASE_TAU, 0)
        if args.name == "fig6":
            rows = [
                {k: r[k] for k in FIG6_COLUMNS}
                for r in _sweep_tauR_rows(base, args.step, args.sizing)
            ]
            args.n, args.c_D, args.c_A, args.tau = n, c_D, c_A, CASE_TAU
            params = _run_params(args, step=args.step)
            out.table(rows, FIG6_COLUMNS, params, {"params": params, "rows": rows})
            return EXIT_OK
        result = plan_resilience(base, COSTS[args.cost](), args.step, args.sizing)
        args.n, args.c_D, args.c_A, args.tau = n, c_D, c_A, CASE_TAU
        out.table(_plan_rows(result), PLAN_COLUMNS, _plan_params(args, result), _plan_record(result))
        return EXIT_OK
    args.n = n
    args.c_D, args.c_A = CASE_COSTS_2
    args.tau_min = args.tau_max = None
    if args.name == "fig9":
        base = GameParams(n, args.c_D, args.c_A, 0, 0)
        records = joint_sweep(base, COSTS[args.cost](), _taus(args), args.step, args.sizing)
        _sweep_records(records, args, out)
        return EXIT_OK
    ratios = grid(*CASE_RATIO_WINDOW, _fraction(args.ratio_step, CASE_RATIO_STEP))
    records = cost_ratio_sweep(args.c_D, ratios, n, COSTS[args.cost](), _taus(args),
                               args.step, args.sizing)
    args.c_A = None
    _sweep_records(records, args, out)
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace, _Output], int]] = {
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
    "sweep-tauR": cmd_sweep_tauR,
    "plan": cmd_plan,
    "sweep-attack": cmd_sweep_attack,
    "sweep-cost-ratio": cmd_sweep_cost_ratio,
    "construct": cmd_construct,
    "casestudy": cmd_casestudy,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = resolve(build_parser().parse_args(argv))
        out = _Output(args)
        status = COMMANDS[args.command](args, out)
        out.flush()
        return status
    except ResourceLimitError as exc:
        print(f"netgame: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (NetGameError, ValueError) as exc:
        print(f"netgame: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
