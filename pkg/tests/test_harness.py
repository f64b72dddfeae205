import csv
import io
import json

import pytest

from linematch.generators import BadParams
from linematch.harness import CSV_COLUMNS, ExperimentConfig, experiment, trial_seed
from linematch.reductions import ReductionConfig


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig("clustered", (8, 16), 3, 7, ("greedy", "mdh"),
                           ReductionConfig("snap"), format="csv")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.load(path) == cfg


@pytest.mark.parametrize("bad", [{"generator": "nope"}, {"trials": 0}, {"sizes": [1]},
                                 {"algorithms": ["x"]}, {"format": "xml"}])
def test_config_rejects(bad):
    with pytest.raises(BadParams):
        ExperimentConfig.from_dict(bad)


def test_experiment_rows_and_aggregates():
    cfg = ExperimentConfig("uniform", (8, 16), 3, 0, ("greedy", "harmonic", "dh", "mdh"))
    rep = experiment(cfg)
    assert len(rep.rows) == 2 * 3 * 4
    keys = [(r["n"], r["trial"], r["algorithm"]) for r in rep.rows]
    assert keys == sorted(keys)
    for r in rep.rows:
        assert r["online_cost"] >= r["opt"] - 1e-9 and r["ratio"] >= 1 - 1e-12
    assert {a["algorithm"] for a in rep.aggregates} == set(cfg.algorithms)
    assert all(f["slope_vs_log2n"] is not None for f in rep.fits)
    assert rep.mean_ratio("greedy", 8) >= 1


def test_trials_share_instances_across_algorithms():
    rep = experiment(ExperimentConfig("geometric", (10,), 2, 5, ("greedy", "mdh")))
    by_trial = {}
    for r in rep.rows:
        by_trial.setdefault(r["trial"], set()).add(r["digest"])
    assert all(len(d) == 1 for d in by_trial.values())
    assert trial_seed(5, 10, 0) != trial_seed(5, 10, 1)


def test_csv_and_json_are_stable(tmp_path):
    cfg = ExperimentConfig("uniform", (6,), 2, 1, ("dh",))
    a, b = experiment(cfg), experiment(cfg)
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
    rows = list(csv.DictReader(io.StringIO(a.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 2
    out = tmp_path / "r.json"
    experiment(ExperimentConfig("uniform", (6,), 2, 1, ("dh",), output=str(out)))
    assert out.read_text() == a.to_json()


def test_reduction_sweep():
    cfg = ExperimentConfig("uniform", (6,), 2, 0, ("mdh",), ReductionConfig("both"))
    rep = experiment(cfg)
    assert all(r["reduction"]["checks"] and all(r["reduction"]["checks"].values())
               for r in rep.rows)
