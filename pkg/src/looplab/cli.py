"""Command-line entry point: ``looplab <command> ...`` (or ``python -m looplab``)."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import LoopLabError
from .geometry import Row, RowPair, act_row, row_boundary_pairing, stack_boundary_pattern
from .involution import involution_v, maximal_fundamental_intervals, sample_involution, sweep_involution, symbol_string
from .matching import enumerate_matchings, format_matching, parse_matching
from .poly import format_rational, to_rational
from .simulation import (
    DEFAULT_MAX_ROWS,
    BiasSchedule,
    load_schedules,
    run_invariance_experiment,
)
from .transfer import (
    DEFAULT_MAX_N,
    build_transfer_matrix,
    commutator_is_zero,
    commutator_on_grid,
    evaluated_csv,
    stationary_distribution,
)
from .yang_baxter import verify_yang_baxter, verify_yang_baxter_symbolic, verify_aux_composition, verify_row_switch

OK, FAIL = "✓", "✗"


@dataclass
class CommandResult:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)
    summary: str = ""


class _Output:
    def __init__(self, directory: str | None):
        self.directory = Path(os.environ.get("LOOPLAB_OUT") or directory or "looplab-out")
        self.written: list[str] = []

    def write(self, name: str, payload: dict | str) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / name
        text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
        path.write_text(text, encoding="utf-8")
        self.written.append(str(path))


def _envelope(command: str, params: dict, result) -> dict:
    return {"tool": "looplab", "version": __version__, "command": command, "parameters": params, "result": result}


def _mark(ok: bool) -> str:
    return OK if ok else FAIL


def _positive_even(value: str) -> int:
    L = int(value)
    if L < 2 or L % 2:
        raise argparse.ArgumentTypeError(f"L must be even and >= 2, got {value}")
    return L


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def _rational(value: str):
    try:
        return to_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {value!r}") from exc


# --- commands ---------------------------------------------------------------------------


def cmd_enumerate(args, out: _Output) -> CommandResult:
    ms = enumerate_matchings(args.n)
    out.write(f"enumerate-n{args.n}.json", _envelope("enumerate", {"n": args.n}, [m.to_json() for m in ms]))
    lines = [format_matching(m) for m in ms]
    return CommandResult(0, out.written, f"|NC_{args.n}| = {len(ms)}\n" + "\n".join(lines))


def cmd_act(args, out: _Output) -> CommandResult:
    row, m = Row(args.row), parse_matching(args.matching)
    result = act_row(row, m)
    params = {"row": args.row, "matching": format_matching(m)}
    out.write("act.json", _envelope("act", params, {"matching": format_matching(result), **result.to_json()}))
    return CommandResult(0, out.written, f"{args.row} acting on {format_matching(m)} -> {format_matching(result)}")


def cmd_intervals(args, out: _Output) -> CommandResult:
    pair = RowPair(Row(args.top), Row(args.bottom))
    blocks = maximal_fundamental_intervals(pair)
    payload = {"symbols": symbol_string(pair), "blocks": [b.to_json() for b in blocks]}
    out.write("intervals.json", _envelope("intervals", pair.to_json(), payload))
    text = " ".join(str(b.interval) for b in blocks) or "(none)"
    return CommandResult(0, out.written, f"{payload['symbols']}: {text}")


def cmd_involution(args, out: _Output) -> CommandResult:
    pair = RowPair(Row(args.top), Row(args.bottom))
    image = involution_v(pair)
    same = stack_boundary_pattern(image) == stack_boundary_pattern(pair)
    payload = {"image": image.to_json(), "pattern_preserved": same,
               "pattern": stack_boundary_pattern(pair).to_json()}
    out.write("involution.json", _envelope("involution", pair.to_json(), payload))
    summary = f"V({args.top}/{args.bottom}) = {image.top}/{image.bottom}  Pat preserved {_mark(same)}"
    return CommandResult(0 if same else 1, out.written, summary)


def cmd_verify_involution(args, out: _Output) -> CommandResult:
    L = args.L
    if args.samples:
        report = sample_involution(L, args.samples, args.seed)
        head = f"{args.samples} random pairs at L={L}"
    else:
        report = sweep_involution(L, workers=args.threads)
        head = f"4^{L} = {report.pairs} pairs"
    params = {"L": L, "samples": args.samples, "seed": args.seed}
    out.write(f"verify-involution-L{L}.json", _envelope("verify involution", params, report.to_json()))
    summary = (
        f"{head}: V∘V {_mark(report.involutive == 0)}, Pat∘V {_mark(report.pattern == 0)}, "
        f"count-switch {_mark(report.count_switch == 0)}, R-equivariance {_mark(report.rotation == 0)}"
    )
    summary += (
        f"\nblocks disjoint {_mark(report.disjoint == 0)}, blocks stable under V {_mark(report.stable_blocks == 0)}, "
        f"single-block Pat {_mark(report.block_pattern == 0)} ({report.blocks_checked} blocks)"
    )
    return CommandResult(0 if report.holds else 1, out.written, summary)


def cmd_verify_commute(args, out: _Output) -> CommandResult:
    report = commutator_is_zero(args.n, inject_defect=args.inject_defect, max_n=args.max_n)
    payload = report.to_json()
    if not args.inject_defect:
        payload["grid_check"] = commutator_on_grid(build_transfer_matrix(args.n, max_n=args.max_n))
    ok = report.holds and payload.get("grid_check", True)
    out.write(f"verify-commute-n{args.n}.json", _envelope("verify commute", {"n": args.n, "inject_defect": args.inject_defect}, payload))
    summary = (
        f"n={args.n}: commutator {'identically zero' if report.holds else 'NONZERO'} "
        f"(max |coeff| {report.max_abs_coefficient}, {report.nonzero_entries} nonzero entries) {_mark(ok)}"
    )
    return CommandResult(0 if ok else 1, out.written, summary)


def cmd_verify_yangbaxter(args, out: _Output) -> CommandResult:
    if args.p is None and args.q is None:
        report = verify_yang_baxter_symbolic()
        params: dict = {"mode": "symbolic"}
    elif args.p is None or args.q is None:
        raise LoopLabError("give both --p and --q, or neither")
    else:
        report = verify_yang_baxter(args.p, args.q)
        params = {"p": format_rational(args.p), "q": format_rational(args.q)}
    out.write("verify-yangbaxter.json", _envelope("verify yangbaxter", params, report))
    return CommandResult(0 if report["holds"] else 1, out.written, f"{report['claim']}: {_mark(report['holds'])}")


def cmd_verify_auxcompose(args, out: _Output) -> CommandResult:
    report = verify_aux_composition(args.s, args.t)
    params = {"s": format_rational(args.s), "t": format_rational(args.t)}
    out.write("verify-auxcompose.json", _envelope("verify auxcompose", params, report))
    return CommandResult(0 if report["holds"] else 1, out.written, f"{report['claim']}: {_mark(report['holds'])}")


def cmd_verify_rowswitch(args, out: _Output) -> CommandResult:
    if (args.p is None) != (args.q is None):
        raise LoopLabError("give both --p and --q, or neither")
    report = verify_row_switch(args.L, args.p, args.q, max_width=args.max_L)
    params = {"L": args.L, "p": report["p"], "q": report["q"]}
    out.write(f"verify-rowswitch-L{args.L}.json", _envelope("verify rowswitch", params, report))
    summary = f"{report['claim']} ({report['mode']}, {report['patterns']} patterns): {_mark(report['holds'])}"
    return CommandResult(0 if report["holds"] else 1, out.written, summary)


def cmd_transfer(args, out: _Output) -> CommandResult:
    T = build_transfer_matrix(args.n, max_n=args.max_n)
    out.write(f"transfer-n{args.n}.json", _envelope("transfer", {"n": args.n}, T.to_json()))
    summary = f"T_{2 * args.n}: {T.size}x{T.size} polynomial matrix"
    if args.eval is not None:
        out.write(f"transfer-n{args.n}-eval.csv", evaluated_csv(T, args.eval))
        summary += f", evaluated at p={format_rational(args.eval)}"
    return CommandResult(0, out.written, summary)


def cmd_stationary(args, out: _Output) -> CommandResult:
    v = stationary_distribution(args.n, args.p, max_n=args.max_n)
    order = enumerate_matchings(args.n)
    payload = {format_matching(m): format_rational(x) for m, x in zip(order, v)}
    out.write(f"stationary-n{args.n}.json", _envelope("stationary", {"n": args.n, "p": format_rational(args.p)}, payload))
    return CommandResult(0, out.written, "\n".join(f"{k}: {x}" for k, x in payload.items()))


def _experiment_summary(report) -> str:
    lines = []
    for i, s in enumerate(report.schedules):
        line = f"{s.describe()}: mean rows {report.mean_rows(i):.3f}"
        if report.chi2:
            line += f", chi2 p-value {report.chi2[i][1]:.4f}"
        lines.append(line)
    if report.tv:
        lines.append(f"max pairwise TV {report.max_tv():.5f}")
    return "\n".join(lines)


def cmd_simulate(args, out: _Output) -> CommandResult:
    schedule = BiasSchedule.parse(args.schedule)
    report = run_invariance_experiment(args.L, [schedule], args.samples, args.seed,
                                       max_rows=args.max_rows, workers=args.threads)
    out.write(f"simulate-L{args.L}.json", report.to_json())
    return CommandResult(0, out.written, _experiment_summary(report))


def cmd_invariance(args, out: _Output) -> CommandResult:
    schedules = load_schedules(args.schedules)
    report = run_invariance_experiment(args.L, schedules, args.samples, args.seed,
                                       max_rows=args.max_rows, workers=args.threads)
    out.write(f"invariance-L{args.L}.json", report.to_json())
    ok = report.max_tv() < args.tv_threshold
    return CommandResult(0 if ok else 1, out.written, _experiment_summary(report) + f" (threshold {args.tv_threshold}) {_mark(ok)}")


# --- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="directory for artifacts (env LOOPLAB_OUT wins)")
    common.add_argument("--threads", type=_positive, default=1, help="worker processes for sweeps")

    parser = argparse.ArgumentParser(prog="looplab", description="Dense O(1) loop model verifications.")
    parser.add_argument("--version", action="version", version=f"looplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list NC_n")
    p.add_argument("--n", type=_positive, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("act", parents=[common], help="act with a row on a matching")
    p.add_argument("--row", required=True, help="tiles, e.g. rlrl")
    p.add_argument("--matching", required=True, help='e.g. "(1,4),(2,3)"')
    p.set_defaults(func=cmd_act)

    for name, func in (("intervals", cmd_intervals), ("involution", cmd_involution)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--top", required=True)
        p.add_argument("--bottom", required=True)
        p.set_defaults(func=func)

    verify = sub.add_parser("verify", help="run an exact verification")
    vsub = verify.add_subparsers(dest="claim", required=True)

    p = vsub.add_parser("involution", parents=[common])
    p.add_argument("--L", type=_positive_even, required=True)
    p.add_argument("--samples", type=_positive, default=None, help="random pairs instead of all 4^L")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_involution)

    p = vsub.add_parser("commute", parents=[common])
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--max-n", type=_positive, default=DEFAULT_MAX_N)
    p.add_argument("--inject-defect", action="store_true", help="negative control")
    p.set_defaults(func=cmd_verify_commute)

    p = vsub.add_parser("yangbaxter", parents=[common])
    p.add_argument("--p", type=_rational, default=None)
    p.add_argument("--q", type=_rational, default=None)
    p.set_defaults(func=cmd_verify_yangbaxter)

    p = vsub.add_parser("auxcompose", parents=[common])
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--t", type=_rational, required=True)
    p.set_defaults(func=cmd_verify_auxcompose)

    p = vsub.add_parser("rowswitch", parents=[common])
    p.add_argument("--L", type=_positive_even, required=True)
    p.add_argument("--p", type=_rational, default=None)
    p.add_argument("--q", type=_rational, default=None)
    p.add_argument("--max-L", type=_positive_even, default=8)
    p.set_defaults(func=cmd_verify_rowswitch)

    p = sub.add_parser("transfer", parents=[common])
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--eval", type=_rational, default=None)
    p.add_argument("--max-n", type=_positive, default=DEFAULT_MAX_N)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("stationary", parents=[common])
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--p", type=_rational, required=True)
    p.add_argument("--max-n", type=_positive, default=DEFAULT_MAX_N)
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("simulate", parents=[common])
    p.add_argument("--L", type=_positive_even, required=True)
    p.add_argument("--schedule", required=True, help="constant:P, cyclic:P1,P2,... or file:PATH")
    p.add_argument("--samples", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-rows", type=_positive, default=DEFAULT_MAX_ROWS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("invariance", parents=[common])
    p.add_argument("--L", type=_positive_even, required=True)
    p.add_argument("--schedules", required=True, help="JSON file with a list of schedules")
    p.add_argument("--samples", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-rows", type=_positive, default=DEFAULT_MAX_ROWS)
    p.add_argument("--tv-threshold", type=float, default=0.02)
    p.set_defaults(func=cmd_invariance)
    return parser


def run_command(argv: Sequence[str] | None = None) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CommandResult(int(exc.code or 0), [], "")
    out = _Output(args.out)
    try:
        return args.func(args, out)
    except (LoopLabError, OSError, json.JSONDecodeError, KeyError) as exc:
        return CommandResult(2, out.written, f"error: {exc}\n\n{parser.format_usage()}")


def main(argv: Sequence[str] | None = None) -> int:
    result = run_command(argv)
    if result.summary:
        stream = sys.stdout if result.exit_code != 2 else sys.stderr
        print(result.summary, file=stream)
    for path in result.artifacts:
        print(f"wrote {path}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
