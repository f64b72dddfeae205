"""Experiment driver: generate instances, run algorithms, measure cost ratios."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algorithms import ALGORITHMS, ratio, run
from .core import Instance
from .generators import KINDS, BadParams, generate_instance
from .reductions import ReductionConfig, run_reduction
from .serialize import dumps, jsonable

CSV_COLUMNS = ("trial", "generator", "n", "instance_seed", "digest", "algorithm",
               "online_cost", "opt", "ratio", "phases")


@dataclass(frozen=True)
class ExperimentConfig:
    generator: str = "uniform"
    sizes: tuple = (16,)
    trials: int = 10
    seed: int = 0
    algorithms: tuple = ("mdh",)
    reduction: ReductionConfig = field(default_factory=lambda: ReductionConfig("none"))
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.generator not in KINDS:
            raise BadParams(f"unknown generator {self.generator!r}; choose from {KINDS}")
        if self.trials < 1:
            raise BadParams("trials must be >= 1")
        if not self.sizes or min(self.sizes) < 2:
            raise BadParams("every n must be >= 2")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise BadParams(f"unknown algorithm {a!r}; choose from {ALGORITHMS}")
        if self.format not in ("json", "csv"):
            raise BadParams(f"format must be json or csv, got {self.format!r}")

    def to_dict(self) -> dict:
        return {"generator": self.generator, "sizes": list(self.sizes), "trials": self.trials,
                "seed": self.seed, "algorithms": list(self.algorithms),
                "reduction": self.reduction.to_dict(), "format": self.format}

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        sizes = data.get("sizes", data.get("n", (16,)))
        if isinstance(sizes, int):
            sizes = (sizes,)
        algos = data.get("algorithms", data.get("algorithm", ("mdh",)))
        if isinstance(algos, str):
            algos = (algos,)
        return cls(generator=data.get("generator", "uniform"), sizes=tuple(int(n) for n in sizes),
                   trials=int(data.get("trials", 10)), seed=int(data.get("seed", 0)),
                   algorithms=tuple(algos),
                   reduction=ReductionConfig.from_dict(data.get("reduction", {"mode": "none"})),
                   output=data.get("output"), format=data.get("format", "json"))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(inst.to_json().encode()).hexdigest()[:16]


def trial_seed(seed: int, n: int, trial: int) -> int:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(n), int(trial)))
    return int(ss.generate_state(1)[0])


@dataclass
class Report:
    config: ExperimentConfig
    rows: list
    aggregates: list
    fits: list

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(), "rows": self.rows,
                "aggregates": self.aggregates, "fits": self.fits}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: jsonable(row[k]) for k in CSV_COLUMNS})
        return buf.getvalue()

    def mean_ratio(self, algorithm: str, n: int) -> float:
        for agg in self.aggregates:
            if agg["algorithm"] == algorithm and agg["n"] == n:
                return agg["mean_ratio"]
        raise KeyError((algorithm, n))

    def write(self, path, fmt: str | None = None) -> None:
        fmt = fmt or self.config.format
        Path(path).write_text(self.to_csv() if fmt == "csv" else self.to_json())


def _phase_summary(tr) -> list:
    return [{"index": ph.index, "Z": ph.Z, "steps": len(ph.steps), "w_cost": ph.w_cost,
             "e_cost": ph.e_cost} for ph in tr.phases]


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> list:
    seed = trial_seed(cfg.seed, n, trial)
    inst = generate_instance(cfg.generator, n, seed)
    digest = instance_digest(inst)
    rows = []
    for algo in cfg.algorithms:
        row = {"trial": trial, "generator": cfg.generator, "n": n, "instance_seed": seed,
               "digest": digest, "algorithm": algo}
        if cfg.reduction.mode == "none":
            tr = run(inst, algo, seed)
            row.update(online_cost=float(tr.total_cost), opt=float(tr.opt),
                       ratio=tr.ratio, phases=len(tr.phases),
                       phase_summary=_phase_summary(tr))
        else:
            rr = run_reduction(inst, algo, seed, cfg.reduction)
            online, opt = rr.costs["online"], rr.costs["opt"]
            row.update(online_cost=float(online) / rr.scale, opt=float(opt) / rr.scale,
                       ratio=ratio(online, opt), phases=0, reduction=rr.to_dict())
        rows.append(row)
    return rows


def _slope(xs, ys) -> float | None:
    if len(set(xs)) < 2:
        return None
    return float(np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)[0])


def aggregate(rows: list) -> tuple:
    groups: dict = {}
    for row in rows:
        groups.setdefault((row["algorithm"], row["n"]), []).append(row["ratio"])
    aggregates = []
    for (algo, n), ratios in sorted(groups.items()):
        aggregates.append({"algorithm": algo, "n": n, "trials": len(ratios),
                           "mean_ratio": float(np.mean(ratios)),
                           "max_ratio": float(np.max(ratios))})
    fits = []
    for algo in sorted({a["algorithm"] for a in aggregates}):
        pts = [(np.log2(a["n"]), a["mean_ratio"]) for a in aggregates if a["algorithm"] == algo]
        fits.append({"algorithm": algo, "slope_vs_log2n": _slope(*zip(*pts))})
    return aggregates, fits


def experiment(cfg: ExperimentConfig) -> Report:
    """Every algorithm on every trial; rows sorted by (n, trial, algorithm)."""
    rows = []
    for n in cfg.sizes:
        for trial in range(cfg.trials):
            rows.extend(run_trial(cfg, n, trial))
    rows.sort(key=lambda r: (r["n"], r["trial"], r["algorithm"]))
    aggregates, fits = aggregate(rows)
    report = Report(cfg, rows, aggregates, fits)
    if cfg.output:
        report.write(cfg.output)
    return report
