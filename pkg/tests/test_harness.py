import dataclasses
import json

import pytest

from qfsverify.boolfn import write_function
from qfsverify.harness import (ExperimentConfig, TrialRecord, derive_seed,
                               run_experiment, run_trial, wilson_interval)


def base_config(**overrides):
    doc = {
        "mode": "rectify", "n": 16, "j": 2, "tau": 0.5, "eps": 0.45,
        "delta": 0.1, "noise": {"model": "bitflip", "eta": 0.02},
        "trials": 4, "seed": 101,
    }
    doc.update(overrides)
    return doc


def test_derive_seed_distinct_and_64bit():
    seeds = [derive_seed(12345, i) for i in range(10 ** 4)]
    assert len(set(seeds)) == len(seeds)
    assert all(0 <= s < (1 << 64) for s in seeds)
    assert derive_seed(12345, 7) == derive_seed(12345, 7)
    assert derive_seed(12345, 7) != derive_seed(12346, 7)


def test_wilson_interval_values():
    low, high = wilson_interval(100, 100)
    assert round(low, 3) == 0.963
    assert high == 1.0
    low0, _ = wilson_interval(0, 50)
    assert low0 == pytest.approx(0.0, abs=1e-12)
    mid_low, mid_high = wilson_interval(50, 100)
    assert mid_low < 0.5 < mid_high


def test_config_from_dict_and_validation():
    cfg = ExperimentConfig.from_dict(base_config())
    assert cfg.mode == "rectify" and cfg.eta == 0.02

    with pytest.raises(ValueError, match="trials"):
        ExperimentConfig.from_dict(base_config(trials=0))
    with pytest.raises(ValueError, match="mode"):
        ExperimentConfig.from_dict(base_config(mode="destroy"))
    with pytest.raises(ValueError, match="tau"):
        ExperimentConfig.from_dict(base_config(tau=1.5))
    with pytest.raises(ValueError, match="adversary"):
        ExperimentConfig.from_dict(base_config(mode="verify-sound"))
    missing = base_config()
    del missing["delta"]
    with pytest.raises(ValueError, match="delta"):
        ExperimentConfig.from_dict(missing)
    bad_noise = base_config(noise={"model": "bitflip", "eta": 0.7})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict(bad_noise)


def test_trial_record_comparison_ignores_wall_clock():
    a = TrialRecord(0, 1, True, ms=1.0)
    b = TrialRecord(0, 1, True, ms=99.0)
    assert a == b


def test_single_trial_determinism():
    cfg = ExperimentConfig.from_dict(base_config(trials=1))
    first = run_trial(cfg, 0, None)
    again = run_trial(cfg, 0, None)
    assert first == again
    assert first.seed == derive_seed(101, 0)


def test_parallel_matches_serial():
    cfg_serial = ExperimentConfig.from_dict(base_config(trials=6))
    cfg_serial.threads = 1
    cfg_parallel = ExperimentConfig.from_dict(base_config(trials=6))
    cfg_parallel.threads = 4
    _, serial = run_experiment(cfg_serial)
    _, parallel = run_experiment(cfg_parallel)
    assert serial == parallel


def test_summary_fraction_is_exact_mean():
    cfg = ExperimentConfig.from_dict(base_config(trials=5))
    summary, records = run_experiment(cfg)
    assert summary.fraction == sum(r.success for r in records) / 5
    assert summary.trials == 5 and 0 <= summary.successes <= 5


def test_learn_mode_records():
    cfg = ExperimentConfig.from_dict(base_config(mode="learn", trials=3))
    summary, records = run_experiment(cfg)
    for rec in records:
        assert rec.regret_ok is not None and rec.regret is not None
        assert rec.qfs_samples > 0 and rec.examples > 0
    assert summary.successes == sum(r.regret_ok for r in records)


def test_verify_modes_records():
    cfg = ExperimentConfig.from_dict(base_config(
        mode="verify-complete", trials=3, eps=0.45, delta=0.2,
        noise={"model": "bitflip", "eta": 0.025}))
    _, records = run_experiment(cfg)
    assert all(r.correct is not None for r in records)

    cfg = ExperimentConfig.from_dict(base_config(
        mode="verify-sound", adversary="constant", trials=3, delta=0.2))
    summary, records = run_experiment(cfg)
    assert summary.successes == sum(r.wrong_accept for r in records)


def test_omit_mode_uses_multi_support_targets():
    cfg = ExperimentConfig.from_dict(base_config(
        mode="verify-sound", adversary="omit", trials=3, delta=0.2))
    _, records = run_experiment(cfg)
    assert all(r.wrong_accept is not None for r in records)


def test_fixed_function_file(tmp_path, and2_at16):
    path = tmp_path / "and2.fn"
    write_function(and2_at16, path)
    cfg = ExperimentConfig.from_dict(base_config(trials=2, function=str(path)))
    _, records = run_experiment(cfg)
    assert all(r.success for r in records)
    wrong = ExperimentConfig.from_dict(base_config(n=12, trials=1,
                                                   function=str(path)))
    with pytest.raises(ValueError, match="function"):
        run_experiment(wrong)


def test_records_persistence(tmp_path):
    out = tmp_path / "records.jsonl"
    cfg = ExperimentConfig.from_dict(base_config(trials=3, out=str(out)))
    summary, records = run_experiment(cfg)
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(lines) == 4
    assert [l["type"] for l in lines] == ["trial"] * 3 + ["summary"]
    assert lines[0]["seed"] == records[0].seed
    assert lines[-1]["successes"] == summary.successes
    # append-safe: run again, file grows
    run_experiment(cfg)
    assert len(out.read_text().splitlines()) == 8


def test_rerun_is_bit_identical():
    cfg = ExperimentConfig.from_dict(base_config(trials=4, mode="learn"))
    _, first = run_experiment(cfg)
    _, second = run_experiment(cfg)
    assert first == second
    assert [dataclasses.asdict(r) | {"ms": None} for r in first] == \
           [dataclasses.asdict(r) | {"ms": None} for r in second]
