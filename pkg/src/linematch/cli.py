"""Command line entry point: ``linematch {run,sweep,verify,counterexample,gen}``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from .algorithms import ALGORITHMS, run
from .core import Instance, InstanceError, validate_instance
from .generators import KINDS, generate_instance
from .harness import ExperimentConfig, experiment
from .reductions import MODES, ReductionConfig, run_reduction
from .serialize import dumps, jsonable
from .verify import battery_json, reproduce_dh_counterexample, run_battery

STEP_COLUMNS = ("t", "request", "case", "server", "server_pos", "cost", "trigger", "opt",
                "p_right", "potential")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _steps_csv(transcript: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=STEP_COLUMNS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for step in transcript["steps"]:
        w.writerow({k: step.get(k, "") for k in STEP_COLUMNS})
    return buf.getvalue()


def cmd_run(args) -> int:
    inst = validate_instance(Instance.load(args.instance), strict=args.strict)
    if args.reduction != "none":
        rr = run_reduction(inst, args.algo, args.seed, ReductionConfig(args.reduction, args.epsilon))
        _emit(dumps(rr.to_dict()), args.output)
        return 0
    tr = run(inst, args.algo, args.seed)
    data = jsonable(tr.to_dict())
    _emit(_steps_csv(data) if args.format == "csv" else dumps(data), args.output)
    return 0


def cmd_sweep(args) -> int:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        overrides = {}
    else:
        cfg = ExperimentConfig()
        overrides = {"generator": args.generator}
    if args.n:
        overrides["sizes"] = tuple(args.n)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.algo:
        overrides["algorithms"] = tuple(args.algo)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.format:
        overrides["format"] = args.format
    data = {**cfg.to_dict(), **overrides}
    data["output"] = None
    cfg = ExperimentConfig.from_dict(data)
    report = experiment(cfg)
    _emit(report.to_csv() if cfg.format == "csv" else report.to_json(), args.output)
    return 0


def cmd_verify(args) -> int:
    reports = run_battery(seed=args.seed, quick=args.quick)
    _emit(battery_json(reports), args.output)
    return 0 if all(r.passed for r in reports) else 1


def cmd_counterexample(args) -> int:
    rep = reproduce_dh_counterexample()
    _emit(dumps(rep.to_dict()), args.output)
    return 0 if rep.passed else 1


def cmd_gen(args) -> int:
    inst = generate_instance(args.kind, args.n, args.seed)
    validate_instance(inst, strict=args.strict)
    _emit(inst.to_json() + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linematch",
                                description="Online matching of requests to servers on a line.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="serve one instance file and print the transcript")
    r.add_argument("instance")
    r.add_argument("--algo", choices=ALGORITHMS, default="mdh")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--strict", action="store_true",
                   help="require distinct servers >= 1 apart and requests on servers")
    r.add_argument("--reduction", choices=MODES, default="none")
    r.add_argument("--epsilon", type=float, default=None)
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run an experiment and print the report")
    s.add_argument("config", nargs="?", help="experiment config JSON")
    s.add_argument("--generator", choices=KINDS, default="uniform")
    s.add_argument("--n", type=int, nargs="+")
    s.add_argument("--trials", type=int)
    s.add_argument("--algo", choices=ALGORITHMS, nargs="+")
    s.add_argument("--seed", type=int)
    s.add_argument("--format", choices=("json", "csv"))
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the check battery; exit 1 on any violation")
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--quick", action="store_true", help="smaller samples")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("counterexample", help="exact branch probabilities of the DH example")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_counterexample)

    g = sub.add_parser("gen", help="write a generated instance as JSON")
    g.add_argument("--kind", choices=KINDS, default="uniform")
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--strict", action="store_true")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, ValueError, OSError) as exc:
        print(f"linematch: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
