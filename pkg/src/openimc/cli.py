"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 model error, 3 oracle mismatch.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .analysis import SET_NAMES, IllFormedModel, analyze
from .edges import DEFAULT_EXCLUDABLE_LIMIT
from .graph import to_dot
from .imdp import maximal_ilecs_avoiding
from .model import Imc, ModelError, format_rational, prepare, well_formed
from .oracle import RandomModelSpec, differential_run
from .parser import ModelDocument, dumps, emit_report, parse_model, parse_rational
from .simulate import (
    ConstantScheduler,
    DecayingScheduler,
    SchedulerSpec,
    constant_exit_scheduler,
    reference_decay_probability,
    simulate_reach,
)

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load(path: str) -> ModelDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_model(text)


def _target(doc: ModelDocument, m: Imc, spec: str | None) -> int:
    if spec is None:
        if "target" not in doc.sets:
            raise UsageError("no --target given and the model defines no 'target' set")
        spec = "target"
    mask = 0
    for token in filter(None, (tok.strip() for tok in spec.split(","))):
        if token in doc.sets:
            mask |= m.mask_of(doc.sets[token])
        else:
            mask |= m.mask_of([token])
    if not mask:
        raise UsageError("the target must contain at least one state")
    return mask


def _write_dot(args, m: Imc) -> None:
    if getattr(args, "emit_dot", None):
        Path(args.emit_dot).write_text(to_dot(m), encoding="utf-8")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_validate(args) -> int:
    doc = _load(args.model)
    m = doc.to_imc()
    _write_dot(args, m)
    report = well_formed(m)
    if args.format == "json":
        payload = {
            "well_formed": report.ok,
            "states": {
                v.state: {
                    "lo_sum": format_rational(v.lo_sum),
                    "hi_sum": format_rational(v.hi_sum),
                    "1a": v.cond_1a,
                    "1b": v.cond_1b,
                    "2a": v.cond_2a,
                    "2b": v.cond_2b,
                }
                for v in report.verdicts
            },
        }
        sys.stdout.write(dumps(payload))
    else:
        print(report.describe())
    if not report.ok:
        print(report.describe(), file=sys.stderr)
        return EXIT_MODEL
    return EXIT_OK


def cmd_check(args) -> int:
    doc = _load(args.model)
    m = doc.to_imc()
    _write_dot(args, m)
    report = analyze(m, _target(doc, m, args.target))
    if args.format == "json":
        sys.stdout.write(emit_report(report))
    else:
        for label, sets in (("UMC", report.umc), ("IMDP", report.imdp)):
            for name, mask in zip(SET_NAMES, sets.as_tuple()):
                print(f"{label:<4} {name}: {' '.join(report.names(mask)) or '-'}")
        for comp in report.ilecs.ilecs:
            print(f"ILEC {' '.join(report.names(comp))}")
    return EXIT_OK


def cmd_ilecs(args) -> int:
    doc = _load(args.model)
    m = doc.to_imc()
    _write_dot(args, m)
    wf = well_formed(m)
    if not wf.ok:
        raise IllFormedModel(wf)
    t = _target(doc, m, args.target)
    rep = maximal_ilecs_avoiding(m, t)
    if args.format == "json":
        sys.stdout.write(
            dumps(
                {
                    "target": m.names_of(t),
                    "ilecs": [m.names_of(c) for c in rep.ilecs],
                    "union": m.names_of(rep.union),
                    "rounds": rep.rounds,
                }
            )
        )
    else:
        for comp in rep.ilecs:
            print(" ".join(m.names_of(comp)))
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.states < 1 or args.instances < 0:
        raise UsageError("--states must be positive and --instances non-negative")
    spec = RandomModelSpec(
        states=args.states,
        density=args.density,
        denominator=args.denominator,
        flip=args.flip,
        seed=args.seed,
    )
    report = differential_run(spec, args.instances, limit=args.max_excludable)
    sys.stdout.write(dumps(report.to_dict()))
    if report.ok:
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for mm in report.mismatches:
        (out / f"mismatch_{mm.index}.imc").write_text(mm.model_text, encoding="utf-8")
        verdict = {"index": mm.index, "target": mm.target, "differing": mm.differing}
        (out / f"mismatch_{mm.index}.json").write_text(dumps(verdict), encoding="utf-8")
    print(f"{len(report.mismatches)} mismatches; counterexamples in {out}", file=sys.stderr)
    return EXIT_MISMATCH


def cmd_simulate(args) -> int:
    doc = _load(args.model)
    m = doc.to_imc()
    _write_dot(args, m)
    wf = well_formed(m)
    if not wf.ok:
        raise IllFormedModel(wf)
    t = _target(doc, m, args.target)
    start = m.index(args.start) if args.start else 0
    kind, _, param = args.scheduler.partition(":")
    if kind not in ("constant", "decaying") or not param:
        raise UsageError("--scheduler must be constant:<lambda> or decaying:<base>")
    value = _rational(param)
    if not 0 < value < 1:
        raise UsageError("scheduler parameter must lie in (0,1)")
    if args.ilec:
        region = m.mask_of(s.strip() for s in args.ilec.split(",") if s.strip())
    else:
        region = next((c for c in maximal_ilecs_avoiding(m, t).ilecs if c >> start & 1), 0)
    absorbed = prepare(m, t)
    if kind == "constant":
        sched = constant_exit_scheduler(absorbed, region, value) if region else ConstantScheduler()
    else:
        if not region:
            raise ModelError(f"start state {m.states[start]} lies in no ILEC avoiding the target")
        sched = DecayingScheduler(region, value, args.offset)
    spec = SchedulerSpec(sched, start=start, horizon=args.horizon, trials=args.trials, seed=args.seed)
    est = simulate_reach(m, t, spec)
    payload = {
        "estimate": est.estimate,
        "half_width_95": est.half_width,
        "hits": est.hits,
        "trials": est.trials,
        "horizon_bias": "runs still active at the horizon count as misses, so the estimate is biased low",
        "spec": {
            "scheduler": args.scheduler,
            "region": m.names_of(region),
            "start": m.states[start],
            "target": m.names_of(t),
            "horizon": args.horizon,
            "trials": args.trials,
            "seed": args.seed,
        },
    }
    if kind == "decaying":
        payload["reference_single_exit"] = float(reference_decay_probability(value, 64))
    sys.stdout.write(dumps(payload))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="openimc", description="Qualitative reachability for open interval Markov chains")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def model_cmd(name, func, help, target=True):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("model", help="path to a .imc file")
        if target:
            sp.add_argument("--target", help="comma-separated states or set names (default: set 'target')")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--emit-dot", metavar="PATH", help="also write the edge graph in DOT format")
        sp.set_defaults(func=func)
        return sp

    model_cmd("validate", cmd_validate, "report well-formedness", target=False)
    model_cmd("check", cmd_check, "compute all qualitative sets under both semantics")
    model_cmd("ilecs", cmd_ilecs, "list maximal ILECs avoiding the target")

    sp = model_cmd("simulate", cmd_simulate, "estimate reachability under a concrete scheduler")
    sp.add_argument("--scheduler", required=True, help="constant:<lambda> or decaying:<base>")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--horizon", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--start", help="initial state (default: first declared)")
    sp.add_argument("--ilec", help="region the scheduler confines to (default: maximal ILEC of the start state)")
    sp.add_argument("--offset", type=int, default=None, help="extra decay exponent (default: smallest feasible)")

    sp = sub.add_parser("oracle", help="differential test against the brute-force abstraction")
    sp.add_argument("--states", type=int, default=4)
    sp.add_argument("--instances", type=int, default=500)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--denominator", type=int, default=4)
    sp.add_argument("--density", type=float, default=0.6)
    sp.add_argument("--flip", type=float, default=0.5, help="probability of an open endpoint")
    sp.add_argument("--max-excludable", type=int, default=DEFAULT_EXCLUDABLE_LIMIT)
    sp.add_argument("--out", default="oracle_counterexamples", help="directory for counterexamples")
    sp.set_defaults(func=cmd_oracle)
    return p


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
