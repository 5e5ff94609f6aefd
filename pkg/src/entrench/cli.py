"""``entrench`` command line: run, sweep, ode, snapshot, analyze."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from entrench import experiments as ex
from entrench.dynamics import ModelParams, run
from entrench.meanfield import MODELS, find_steady_states, write_steady_states
from entrench.spectrum import attitudes

log = logging.getLogger("entrench")


def _floats(text: str) -> list[float]:
    return [float(s) for s in text.split(",") if s.strip()]


def _ints(text: str) -> list[int]:
    return [int(s) for s in text.split(",") if s.strip()]


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="seed (master seed for sweeps)")
    p.add_argument("--grid", help="torus size WxH, comma-separated for sweeps")
    p.add_argument("--L", type=int, help="spectrum half-width")
    p.add_argument("--pa", help="amplification probability (comma list for sweeps)")
    p.add_argument("--mode", choices=["none", "relocation", "telephoning"])
    p.add_argument("--mix", help="mixing level rel or tel (comma list for sweeps)")
    p.add_argument("--influence", help="uniform, linear, quadratic, colinear, coquadratic")
    p.add_argument("--init", choices=list(ex.INIT_MODES))
    p.add_argument("--radius", type=float)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--reps", type=int, help="replicates per sweep cell")
    p.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    p.add_argument("--exact-partition", action="store_true",
                   help="telephoning: exact global-caller count per step")


def _overrides(args) -> dict[str, str]:
    pairs = [("seed", "master_seed"), ("grid", "geometries"), ("L", "L"), ("pa", "p_a"),
             ("mode", "mode"), ("mix", "levels"), ("influence", "influences"), ("init", "init"),
             ("radius", "radius"), ("max_steps", "max_steps"), ("out", "out_dir"),
             ("reps", "replicates"), ("workers", "workers")]
    out = {key: str(getattr(args, flag)) for flag, key in pairs if getattr(args, flag, None) is not None}
    if getattr(args, "exact_partition", False):
        out["exact_partition"] = "true"
    if out.get("mode") == "none" and "levels" not in out:
        out["levels"] = "0"
    return out


def _spec_from_args(args) -> ex.ExperimentSpec:
    values = _overrides(args)
    if getattr(args, "spec", None):
        return ex.load_spec(args.spec, values)
    return ex.spec_from_mapping(values).validate()


def cmd_run(args) -> int:
    spec = _spec_from_args(args)
    spec.replicates = 1
    spec.validate()
    if len(spec.cells()) != 1:
        raise ex.SpecError(["run: takes a single parameter set; use sweep for lists"])
    cell = spec.cells()[0]
    seed = spec.master_seed
    params = ModelParams(L=spec.L, p_a=cell["p_a"], influence=cell["influence"],
                         mixing=cell["mixing"], geometry=cell["geometry"], seed=seed,
                         exact_partition=spec.exact_partition)
    steps = spec.max_steps or ex.default_max_steps(cell["mixing"].kind, cell["p_a"])
    init = ex.make_init(spec.init, params.geometry, params.L, seed, spec.radius)
    res = run(params, init, steps, record_every=args.record_every)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.name}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step"] + [f"f{a}" for a in attitudes(spec.L)] + ["interface_density", "consensus"])
        for r in res.records:
            w.writerow([r.step] + [repr(f) for f in r.frequencies()] +
                       [repr(r.interface_density), int(r.consensus)])
    if res.censored:
        print(f"censored after {res.steps} steps (consensus time > {res.steps}); log: {path}")
    else:
        print(f"consensus at step {res.consensus_time}; log: {path}")
    return 0


def cmd_sweep(args) -> int:
    if args.preset:
        files = ex.run_preset(args.preset, args.scale, args.out or "out",
                              args.seed or 0, args.workers)
    else:
        if not args.spec:
            raise ex.SpecError(["sweep: give a spec file or --preset"])
        files = list(ex.run_spec(_spec_from_args(args)).values())
    for f in files:
        print(f)
    return 0


def cmd_ode(args) -> int:
    out = args.out or "out"
    if args.preset:
        if args.preset != "fig4":
            raise ex.SpecError([f"preset: ode supports fig4, got {args.preset!r}"])
        files = ex.run_ode(out_dir=out, name="fig4", **ex.FIG4_ODE)
        for f in files.values():
            print(f)
        return 0
    p_values = _floats(args.pa) if args.pa else [0.1, 0.01, 0.001]
    if args.steady:
        reports = [find_steady_states(m, p) for m in args.steady.split(",") for p in p_values]
        Path(out).mkdir(parents=True, exist_ok=True)
        path = Path(out) / f"{args.name}_steady_states.csv"
        write_steady_states(path, reports)
        print(path)
        return 0
    states = [tuple(_floats(s)) for s in (args.state or ["0.26,0.25,0.24,0.25"])]
    files = ex.run_ode(p_values, states, eps=args.eps, t_end=args.t_end, out_dir=out, name=args.name)
    for f in files.values():
        print(f)
    return 0


def cmd_snapshot(args) -> int:
    if args.preset:
        if args.preset not in ex.SNAPSHOT_STEPS:
            raise ex.SpecError([f"preset: snapshot supports {sorted(ex.SNAPSHOT_STEPS)}"])
        files = ex.run_preset(args.preset, args.scale, args.out or "out", args.seed or 0)
    else:
        spec = _spec_from_args(args)
        if args.reps is None:
            spec.replicates = 1
        files = ex.snapshot(spec, _ints(args.steps))
    print(f"{len(files)} snapshots")
    return 0


def cmd_analyze(args) -> int:
    print(ex.analyze(args.samples, args.output))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entrench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="single trajectory with a metrics log")
    _model_flags(p)
    p.add_argument("--spec", help="spec file supplying defaults")
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--name", default="run")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="replicated sweep from a spec file or preset")
    p.add_argument("spec", nargs="?", help="key = value spec file")
    _model_flags(p)
    p.add_argument("--preset", choices=list(ex.PRESETS) + list(ex.PRESET_ALIASES))
    p.add_argument("--scale", choices=list(ex.SCALES), default="desk")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ode", help="mean-field trajectories, crossing times, steady states")
    p.add_argument("--pa", help="comma list of amplification probabilities")
    p.add_argument("--state", action="append", help="L2,L1,R1,R2 (repeatable)")
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--t-end", type=float, default=1e6)
    p.add_argument("--steady", help=f"steady states of {','.join(MODELS)}")
    p.add_argument("--out")
    p.add_argument("--name", default="ode")
    p.add_argument("--preset", help="fig4")
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("snapshot", help="grid snapshots at listed steps")
    _model_flags(p)
    p.add_argument("--spec", help="spec file supplying defaults")
    p.add_argument("--steps", default="0,25,50,75,100,125")
    p.add_argument("--preset", choices=sorted(ex.SNAPSHOT_STEPS))
    p.add_argument("--scale", choices=list(ex.SCALES), default="desk")
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("analyze", help="summaries from raw sample CSVs")
    p.add_argument("samples", nargs="+")
    p.add_argument("-o", "--output", default="summary.csv")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ex.SpecError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
