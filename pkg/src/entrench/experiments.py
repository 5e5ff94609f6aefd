"""Replicated parameter sweeps, figure presets and CSV output.

An :class:`ExperimentSpec` is a product of sweep axes (geometry, influence,
amplification, mixing level) for a single mixing family. Each cell runs
``replicates`` independent simulations whose seeds are hashed from
``(master_seed, cell, replicate)``; results are gathered by cell index, so
output bytes do not depend on the worker count or completion order.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import itertools
import logging
import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from entrench.dynamics import Engine, Mixing, MixingMode, ModelParams, run
from entrench.lattice import Configuration, TorusGeometry, droplet_init, uniform_init
from entrench.meanfield import consensus_time_ode
from entrench.metrics import ConsensusSample, classify, histogram, summarize
from entrench.spectrum import InfluenceKind, attitudes

log = logging.getLogger(__name__)

INIT_MODES = ("uniform", "droplet")


class SpecError(ValueError):
    """Invalid experiment specification; ``problems`` lists one message per field."""

    def __init__(self, problems: list[str]):
        super().__init__("invalid experiment spec:\n  " + "\n  ".join(problems))
        self.problems = problems


def derive_seed(master_seed: int, cell: int, replicate: int) -> int:
    digest = hashlib.blake2b(f"{master_seed}:{cell}:{replicate}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def default_max_steps(mode: Mixing, p_a: float) -> int:
    # deadlock-prone cells (no mixing, or very low amplification) get a larger budget
    return 1_000_000 if mode is Mixing.NONE or p_a <= 0.01 else 100_000


@dataclass
class ExperimentSpec:
    name: str = "experiment"
    L: int = 2
    p_a: list[float] = field(default_factory=lambda: [0.01])
    mode: Mixing = Mixing.NONE
    levels: list[float] = field(default_factory=lambda: [0.0])
    influences: list[InfluenceKind] = field(default_factory=lambda: [InfluenceKind.UNIFORM])
    geometries: list[TorusGeometry] = field(default_factory=lambda: [TorusGeometry()])
    replicates: int = 10
    max_steps: int | None = None
    init: str = "uniform"
    radius: float = 25.0
    out_dir: str = "out"
    master_seed: int = 0
    record_every: int = 0
    exact_partition: bool = False
    workers: int | None = None

    def validate(self) -> "ExperimentSpec":
        problems = []
        try:
            self.mode = Mixing(self.mode)
        except ValueError:
            problems.append(f"mode: unknown mixing mode {self.mode!r}")
        if not isinstance(self.L, int) or self.L < 1:
            problems.append(f"L: must be a positive integer, got {self.L!r}")
        if self.replicates < 1:
            problems.append(f"replicates: must be >= 1, got {self.replicates}")
        for axis in ("p_a", "levels", "influences", "geometries"):
            if not getattr(self, axis):
                problems.append(f"{axis}: sweep axis must be nonempty")
        for p in self.p_a:
            if not 0.0 <= p <= 1.0:
                problems.append(f"p_a: {p} outside [0, 1]")
        for lv in self.levels:
            if not 0.0 <= lv <= 1.0:
                problems.append(f"levels: {lv} outside [0, 1]")
        if self.mode == Mixing.NONE and any(lv != 0.0 for lv in self.levels):
            problems.append("levels: the fully spatial mode takes only level 0")
        if self.max_steps is not None and self.max_steps < 1:
            problems.append(f"max_steps: must be positive, got {self.max_steps}")
        if self.init not in INIT_MODES:
            problems.append(f"init: must be one of {INIT_MODES}, got {self.init!r}")
        if self.init == "droplet":
            for g in self.geometries:
                if not 0 < self.radius < min(g.width, g.height) / 2:
                    problems.append(f"radius: {self.radius} does not fit a {g} grid")
        if self.record_every < 0:
            problems.append("record_every: must be >= 0")
        if self.workers is not None and self.workers < 1:
            problems.append("workers: must be >= 1")
        if not 0 <= self.master_seed < 1 << 64:
            problems.append("master_seed: must fit in 64 unsigned bits")
        if problems:
            raise SpecError(problems)
        return self

    def cells(self) -> list[dict]:
        out = []
        axes = itertools.product(self.geometries, self.influences, self.p_a, self.levels)
        for i, (g, kind, p, lv) in enumerate(axes):
            out.append(dict(cell=i, geometry=g, influence=InfluenceKind.parse(kind), p_a=p,
                            mixing=MixingMode(self.mode, lv)))
        return out

    def seeds(self) -> dict[tuple[int, int], int]:
        seeds = {(c, r): derive_seed(self.master_seed, c, r)
                 for c in range(len(self.cells())) for r in range(self.replicates)}
        if len(set(seeds.values())) != len(seeds):
            raise SpecError(["master_seed: derived replicate seeds collide"])
        return seeds


# --------------------------------------------------------------------------
# spec files


_LIST_KEYS = {"p_a", "levels", "influences", "geometries"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _LIST_KEYS:
        items = [s.strip() for s in raw.replace(";", ",").split(",") if s.strip()]
        if key == "influences":
            return [InfluenceKind.parse(s) for s in items]
        if key == "geometries":
            return [TorusGeometry.parse(s) for s in items]
        return [float(s) for s in items]
    if key in {"L", "replicates", "master_seed", "record_every"}:
        return int(raw)
    if key in {"max_steps", "workers"}:
        return None if raw.lower() in {"", "none", "auto"} else int(raw)
    if key == "radius":
        return float(raw)
    if key == "exact_partition":
        return raw.lower() in {"1", "true", "yes", "on"}
    if key == "mode":
        return Mixing(raw.lower())
    return raw


def spec_from_mapping(values: dict[str, str], base: ExperimentSpec | None = None) -> ExperimentSpec:
    spec = replace(base) if base is not None else ExperimentSpec()
    problems = []
    known = set(ExperimentSpec.__dataclass_fields__)
    for key, raw in values.items():
        if key not in known:
            problems.append(f"{key}: unknown field")
            continue
        try:
            setattr(spec, key, _parse_value(key, raw) if isinstance(raw, str) else raw)
        except (ValueError, TypeError) as exc:
            problems.append(f"{key}: {exc}")
    if problems:
        raise SpecError(problems)
    return spec


def load_spec(path: str | os.PathLike, overrides: dict | None = None) -> ExperimentSpec:
    """Read a flat ``key = value`` spec file; ``overrides`` win over file values."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    with open(path) as fh:
        cp.read_string("[spec]\n" + fh.read())
    values = dict(cp["spec"])
    values.update(overrides or {})
    return spec_from_mapping(values).validate()


def dump_spec(spec: ExperimentSpec) -> str:
    lines = [
        f"name = {spec.name}",
        f"L = {spec.L}",
        f"mode = {Mixing(spec.mode).value}",
        "p_a = " + ", ".join(repr(p) for p in spec.p_a),
        "levels = " + ", ".join(repr(v) for v in spec.levels),
        "influences = " + ", ".join(InfluenceKind.parse(k).value for k in spec.influences),
        "geometries = " + ", ".join(str(g) for g in spec.geometries),
        f"replicates = {spec.replicates}",
        f"max_steps = {spec.max_steps if spec.max_steps is not None else 'auto'}",
        f"init = {spec.init}",
        f"radius = {spec.radius!r}",
        f"out_dir = {spec.out_dir}",
        f"master_seed = {spec.master_seed}",
        f"record_every = {spec.record_every}",
        f"exact_partition = {str(spec.exact_partition).lower()}",
        f"workers = {spec.workers if spec.workers is not None else 'auto'}",
    ]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# running


def make_init(init: str, geometry: TorusGeometry, L: int, seed: int,
              radius: float = 25.0) -> Configuration:
    if init == "droplet":
        return droplet_init(geometry, L, radius)
    return uniform_init(geometry, L, seed)


def fingerprint(spec: ExperimentSpec, cell: dict) -> str:
    return (f"{cell['mixing']}|pa={cell['p_a']!r}|{cell['influence'].value}|"
            f"{cell['geometry']}|L={spec.L}|{spec.init}")


@dataclass
class ReplicateResult:
    cell: int
    replicate: int
    sample: ConsensusSample
    series: list[tuple]  # (step, *freqs, interface_density, consensus)


def _replicate(job) -> ReplicateResult:
    (cell, rep, seed, fp, params, init, radius, max_steps, record_every) = job
    cfg = make_init(init, params.geometry, params.L, seed, radius)
    params = replace(params, seed=seed)
    res = run(params, cfg, max_steps, record_every=record_every)
    label = classify(histogram(res.final))
    time = res.consensus_time if not res.censored else max_steps
    sample = ConsensusSample(fp, seed, int(time), res.censored, label)
    series = [(r.step, *r.frequencies(), r.interface_density, int(r.consensus))
              for r in res.records]
    return ReplicateResult(cell, rep, sample, series)


def _pool_init() -> None:
    import numba
    numba.set_num_threads(1)


def _jobs(spec: ExperimentSpec) -> list[tuple]:
    seeds = spec.seeds()
    jobs = []
    for c in spec.cells():
        steps = spec.max_steps or default_max_steps(c["mixing"].kind, c["p_a"])
        params = ModelParams(L=spec.L, p_a=c["p_a"], influence=c["influence"], mixing=c["mixing"],
                             geometry=c["geometry"], exact_partition=spec.exact_partition)
        fp = fingerprint(spec, c)
        for r in range(spec.replicates):
            jobs.append((c["cell"], r, seeds[(c["cell"], r)], fp, params, spec.init, spec.radius,
                         steps, spec.record_every))
    return jobs


def execute(spec: ExperimentSpec) -> list[ReplicateResult]:
    """Run every replicate of every cell; results sorted by ``(cell, replicate)``."""
    spec.validate()
    jobs = _jobs(spec)
    workers = spec.workers or os.cpu_count() or 1
    if workers == 1 or len(jobs) == 1:
        results = [_replicate(j) for j in jobs]
    else:
        # spawn, not fork: forking after OpenMP has started is unsafe
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx,
                                 initializer=_pool_init) as pool:
            results = list(pool.map(_replicate, jobs, chunksize=1))
    return sorted(results, key=lambda r: (r.cell, r.replicate))


def _cell_columns(spec: ExperimentSpec, c: dict) -> list:
    return [spec.name, c["cell"], c["mixing"].kind.value, repr(c["mixing"].level), repr(c["p_a"]),
            c["influence"].value, str(c["geometry"]), spec.L, spec.init]


CELL_HEADER = ["spec", "cell", "mode", "level", "p_a", "influence", "grid", "L", "init"]
SAMPLE_HEADER = CELL_HEADER + ["replicate", "seed", "consensus_time", "censored", "label"]
SUMMARY_HEADER = CELL_HEADER + ["n", "mean", "median", "stderr", "censored"]


def _fmt(x: float) -> str:
    return "nan" if isinstance(x, float) and math.isnan(x) else repr(float(x))


def run_spec(spec: ExperimentSpec) -> dict[str, Path]:
    """Run a sweep and write ``<name>_samples.csv``, ``<name>_summary.csv`` and,
    when ``record_every > 0``, ``<name>_series.csv``."""
    spec.validate()
    results = execute(spec)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = {c["cell"]: c for c in spec.cells()}
    paths = {"samples": out / f"{spec.name}_samples.csv", "summary": out / f"{spec.name}_summary.csv"}

    with open(paths["samples"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SAMPLE_HEADER)
        for r in results:
            s = r.sample
            w.writerow(_cell_columns(spec, cells[r.cell]) +
                       [r.replicate, s.seed, s.time, int(s.censored), s.label])

    with open(paths["summary"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for cell, group in itertools.groupby(results, key=lambda r: r.cell):
            summ = summarize([r.sample for r in group])
            w.writerow(_cell_columns(spec, cells[cell]) +
                       [summ.n, _fmt(summ.mean), _fmt(summ.median), _fmt(summ.stderr),
                        summ.censored])

    if spec.record_every:
        paths["series"] = out / f"{spec.name}_series.csv"
        freq_cols = [f"f{a}" for a in attitudes(spec.L)]
        with open(paths["series"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["cell", "replicate", "step"] + freq_cols + ["interface_density", "consensus"])
            for r in results:
                for row in r.series:
                    w.writerow([r.cell, r.replicate, row[0]] + [_fmt(v) for v in row[1:-1]] + [row[-1]])
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return paths


def read_samples(path: str | os.PathLike) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def analyze(sample_paths: Sequence[str | os.PathLike], out_path: str | os.PathLike) -> Path:
    """Rebuild a summary CSV from one or more raw sample CSVs."""
    rows = [row for p in sample_paths for row in read_samples(p)]
    groups: dict[tuple, list[ConsensusSample]] = {}
    for row in rows:
        key = tuple(row[k] for k in CELL_HEADER)
        fp = "|".join(key)
        groups.setdefault(key, []).append(ConsensusSample(
            fp, int(row["seed"]), int(row["consensus_time"]), row["censored"] == "1", row["label"]))
    out_path = Path(out_path)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for key in sorted(groups, key=lambda k: (k[0], int(k[1]))):
            summ = summarize(groups[key])
            w.writerow(list(key) + [summ.n, _fmt(summ.mean), _fmt(summ.median),
                                    _fmt(summ.stderr), summ.censored])
    return out_path


# --------------------------------------------------------------------------
# mean-field runs


def run_ode(p_values: Sequence[float], states: Sequence[Sequence[float]], eps: float = 1e-4,
            t_end: float = 1e6, out_dir: str | os.PathLike = "out", name: str = "ode",
            samples: int = 2001) -> dict[str, Path]:
    """Trajectories and threshold-crossing times for every ``(p_a, state)`` pair.

    Trajectories are written on a log-spaced time grid up to the crossing
    time (or ``t_end``) in ``<name>_trajectories.csv``; crossing times go to
    ``<name>_consensus.csv``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"trajectories": out / f"{name}_trajectories.csv",
             "consensus": out / f"{name}_consensus.csv"}
    with open(paths["trajectories"], "w", newline="") as ft, \
            open(paths["consensus"], "w", newline="") as fc:
        wt, wc = csv.writer(ft), csv.writer(fc)
        wt.writerow(["p_a", "state", "t", "L2", "L1", "R1", "R2"])
        wc.writerow(["p_a", "state", "L2_0", "L1_0", "R1_0", "R2_0", "eps", "time", "censored",
                     "winner", "peak_inner"])
        for p in p_values:
            for i, s0 in enumerate(states):
                res, traj = consensus_time_ode(s0, p, eps=eps, t_end=t_end)
                t_last = traj.t[-1]
                if t_last > 0:
                    grid = np.concatenate([[0.0], np.geomspace(min(1e-3, t_last), t_last, samples - 1)])
                    ys = traj.at(grid)
                else:
                    grid, ys = traj.t, traj.y
                for j, t in enumerate(grid):
                    wt.writerow([repr(p), i, _fmt(t)] + [_fmt(v) for v in ys[:, j]])
                wc.writerow([repr(p), i] + [repr(float(v)) for v in s0] +
                            [repr(eps), _fmt(res.time), int(res.censored), res.winner or "",
                             _fmt(traj.peak_inner())])
    return paths


@dataclass(frozen=True)
class OdeAbmComparison:
    p_a: float
    replicates: int
    ode_state0: tuple[float, ...]
    ode_time: float
    ode_peak_inner: float
    abm_mean_time: float
    abm_mean_peak_inner: float
    abm_censored: int


def ode_abm_comparison(p_a: float, replicates: int = 20, geometry: TorusGeometry | None = None,
                       master_seed: int = 0, max_steps: int = 100_000,
                       workers: int | None = None) -> OdeAbmComparison:
    """Telephoning at ``tel = 1`` against the mean-field ODE started at the ABM's mean initial state.

    The ODE crossing uses ``eps = 1/N``. Peak inner frequency is ``max(f-1, f1)``
    over time, averaged over replicates for the ABM.
    """
    geometry = geometry or TorusGeometry()
    spec = ExperimentSpec(name=f"fig5_pa{p_a}", L=2, p_a=[p_a], mode=Mixing.TELEPHONING,
                          levels=[1.0], geometries=[geometry], replicates=replicates,
                          max_steps=max_steps, master_seed=master_seed, record_every=1,
                          workers=workers)
    results = execute(spec)
    inits, peaks, times = [], [], []
    censored = 0
    for r in results:
        freqs = np.array([row[1:5] for row in r.series])
        inits.append(freqs[0])
        peaks.append(max(freqs[:, 1].max(), freqs[:, 2].max()))
        if r.sample.censored:
            censored += 1
        else:
            times.append(r.sample.time)
    s0 = np.mean(inits, axis=0)
    s0 = s0 / s0.sum()
    res, traj = consensus_time_ode(s0, p_a, eps=1.0 / geometry.size, t_end=1e7)
    return OdeAbmComparison(p_a, replicates, tuple(float(v) for v in s0), res.time,
                            traj.peak_inner(), float(np.mean(times)) if times else math.nan,
                            float(np.mean(peaks)), censored)


# --------------------------------------------------------------------------
# snapshots


def snapshot(spec: ExperimentSpec, steps: Sequence[int]) -> list[Path]:
    """Write grid snapshots at ``steps`` for every cell and replicate.

    Files are ``<name>_c<cell>_r<rep>_t<step>.txt`` in the lattice snapshot
    format. A requested step past consensus gets the absorbing configuration;
    ``<name>_snapshots.csv`` indexes every file with an ``absorbed`` flag.
    """
    spec.validate()
    steps = list(steps)
    if not steps or any(s < 0 for s in steps) or steps != sorted(steps):
        raise SpecError(["steps: must be a nonempty ascending list of nonnegative integers"])
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    index_rows = []
    for job in _jobs(spec):
        cell, rep, seed, _, params, init, radius = job[:7]
        params = replace(params, seed=seed)
        engine = Engine(params, make_init(init, params.geometry, params.L, seed, radius))
        absorbed_at = 0 if engine.consensus() else None
        for target in steps:
            while engine.step_index < target and absorbed_at is None:
                engine.advance()
                if engine.consensus():
                    absorbed_at = engine.step_index
            path = out / f"{spec.name}_c{cell}_r{rep}_t{target}.txt"
            engine.configuration().save(path, step=engine.step_index)
            written.append(path)
            index_rows.append([path.name, cell, rep, seed, target, engine.step_index,
                               int(absorbed_at is not None and target > absorbed_at)])
    with open(out / f"{spec.name}_snapshots.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["file", "cell", "replicate", "seed", "requested_step", "state_step", "absorbed"])
        w.writerows(index_rows)
    return written


def replay(path: str | os.PathLike, params: ModelParams, steps: int) -> Configuration:
    """Continue a saved snapshot for ``steps`` more generations with ``params.seed``."""
    cfg, step = Configuration.load(path)
    engine = Engine(params, cfg, step)
    for _ in range(steps):
        engine.advance()
    return engine.configuration()


# --------------------------------------------------------------------------
# presets


FIG6_AXIS = [round(0.005 * k, 3) for k in range(1, 31)]
FIG8_LEVELS = [0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1, 0.12, 0.15]
SNAPSHOT_STEPS = {"fig7": [0, 25, 50, 75, 100, 125],
                  "fig11": [0, 50, 100, 250, 500, 750, 1000, 1500]}
PRESETS = ("fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12")
PRESET_ALIASES = {"fig10-droplet": "fig10", "fig7-droplet": "fig7", "fig11-droplet": "fig11"}
SCALES = ("desk", "full")


def preset(name: str, scale: str = "desk", out_dir: str = "out",
           master_seed: int = 0) -> list[ExperimentSpec]:
    """Sweep specs reproducing a figure. ``scale`` is ``"full"`` or ``"desk"``.

    ``fig4`` is mean-field only and returns no sweep specs (see :data:`FIG4_ODE`).
    """
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {SCALES}")
    name = PRESET_ALIASES.get(name, name)
    full = scale == "full"
    base = dict(out_dir=out_dir, master_seed=master_seed)
    g101 = TorusGeometry(101, 101)
    small = g101 if full else TorusGeometry(51, 51)
    modes = (Mixing.RELOCATION, Mixing.TELEPHONING)

    if name == "fig4":
        return []
    if name == "fig5":
        geoms = [g101, TorusGeometry(866, 866)] if full else [g101]
        return [ExperimentSpec(name="fig5", p_a=[0.1, 0.01, 0.001], mode=Mixing.TELEPHONING,
                               levels=[1.0], geometries=geoms, replicates=20 if full else 5,
                               record_every=1, **base)]
    if name == "fig6":
        axis = FIG6_AXIS if full else [0.005, 0.05, 0.15]
        return [ExperimentSpec(name=f"fig6_{m.value}", p_a=axis, mode=m, levels=axis,
                               geometries=[small], replicates=50 if full else 5, **base)
                for m in modes]
    if name in ("fig7", "fig11", "fig10"):
        pas = {"fig7": [0.01], "fig11": [0.01], "fig10": [0.001, 0.01]}[name]
        reps = {"fig7": 1, "fig11": 1, "fig10": 10}[name]
        rec = 1 if name == "fig10" else 0
        specs = [ExperimentSpec(name=f"{name}_{m.value}", p_a=pas, mode=m, levels=[0.02],
                                init="droplet", radius=25.0, geometries=[g101], replicates=reps,
                                record_every=rec, **base) for m in modes]
        specs.append(ExperimentSpec(name=f"{name}_none", p_a=pas, mode=Mixing.NONE, levels=[0.0],
                                    init="droplet", radius=25.0, geometries=[g101],
                                    replicates=reps, record_every=rec, **base))
        if name == "fig11":
            specs.append(ExperimentSpec(name="fig11_voter", p_a=[0.0], mode=Mixing.NONE,
                                        levels=[0.0], init="droplet", radius=25.0,
                                        geometries=[g101], replicates=1, **base))
        return specs
    if name == "fig8":
        return [ExperimentSpec(name=f"fig8_{m.value}", p_a=[0.01, 0.1], mode=m,
                               levels=FIG8_LEVELS, geometries=[g101],
                               replicates=50 if full else 10, **base) for m in modes]
    if name == "fig9":
        sizes = [51, 101, 201, 401, 866] if full else [51, 101, 201]
        return [ExperimentSpec(name="fig9", p_a=[0.001, 0.01, 0.1], mode=Mixing.TELEPHONING,
                               levels=[1.0], geometries=[TorusGeometry(s, s) for s in sizes],
                               replicates=25 if full else 10, **base)]
    if name == "fig12":
        return [ExperimentSpec(name="fig12", p_a=[0.01, 0.1], mode=Mixing.RELOCATION,
                               levels=FIG8_LEVELS, influences=list(InfluenceKind),
                               geometries=[g101], replicates=50 if full else 10, **base)]
    raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")


FIG4_ODE = dict(p_values=[0.1, 0.01, 0.001], states=[(0.26, 0.25, 0.24, 0.25)], eps=1e-4)


def run_preset(name: str, scale: str = "desk", out_dir: str = "out", master_seed: int = 0,
               workers: int | None = None) -> list[Path]:
    written: list[Path] = []
    name = PRESET_ALIASES.get(name, name)
    if name == "fig4":
        return list(run_ode(out_dir=out_dir, name="fig4", **FIG4_ODE).values())
    specs = preset(name, scale, out_dir, master_seed)
    for spec in specs:
        spec.workers = workers
        if name in SNAPSHOT_STEPS:
            written += snapshot(spec, SNAPSHOT_STEPS[name])
        else:
            written += list(run_spec(spec).values())
    if name == "fig5":
        rows = []
        for p in (0.1, 0.01, 0.001):
            c = ode_abm_comparison(p, specs[0].replicates, master_seed=master_seed, workers=workers)
            rows.append(c)
        path = Path(out_dir) / "fig5_ode_abm.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["p_a", "replicates", "ode_time", "ode_peak_inner", "abm_mean_time",
                        "abm_mean_peak_inner", "abm_censored"])
            for c in rows:
                w.writerow([repr(c.p_a), c.replicates, _fmt(c.ode_time), _fmt(c.ode_peak_inner),
                            _fmt(c.abm_mean_time), _fmt(c.abm_mean_peak_inner), c.abm_censored])
        written.append(path)
    return written
