"""Seeded Monte Carlo experiment runner.

Every trial derives its own 64-bit seed from the master seed with a
SplitMix64 mix, so trial outcomes are independent of execution order and
parallel runs reproduce serial ones record for record.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .boolfn import BooleanFunction, FourierSpectrum, gen_ftau, read_function
from .noise import make_channel
from .oracles import sample_batch
from .protocol import VerifierParams, adversary, honest_prover, protocol_trial
from .rectify import heavy_set, rectify, required_samples
from .spectral import argmax_estimate, regret, sparse_estimate

MODES = ("rectify", "learn", "verify-complete", "verify-sound")
ADVERSARIES = ("uniform", "wrongfunction", "omit", "constant")
_MASK64 = (1 << 64) - 1


def derive_seed(master: int, index: int) -> int:
    """SplitMix64 mix of (master seed, index) -> 64-bit trial seed."""
    z = (master + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054
                    ) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (default 95%)."""
    if trials < 1:
        raise ValueError("trials must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = phat + z2 / (2.0 * trials)
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    return (center - half) / denom, (center + half) / denom


@dataclass
class ExperimentConfig:
    mode: str
    n: int
    j: int
    tau: float
    eps: float
    delta: float
    noise_model: str
    eta: float
    trials: int
    seed: int
    adversary: str | None = None
    function_file: str | None = None
    out: str | None = None
    threads: int = 0

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode: expected one of {MODES}, got {self.mode!r}")
        if self.trials < 1:
            raise ValueError(f"trials: must be >= 1, got {self.trials}")
        if not 1 <= self.j <= self.n:
            raise ValueError(f"j: must satisfy 1 <= j <= n, got {self.j}")
        for name in ("tau", "eps", "delta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name}: must lie in (0, 1), got {v}")
        if self.threads < 0:
            raise ValueError(f"threads: must be >= 0, got {self.threads}")
        make_channel(self.noise_model, self.eta)  # validates model and eta
        if self.mode == "verify-sound":
            if self.adversary not in ADVERSARIES:
                raise ValueError(
                    f"adversary: verify-sound needs one of {ADVERSARIES}, "
                    f"got {self.adversary!r}")

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            doc = json.load(fh)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        try:
            noise = doc["noise"]
            cfg = cls(mode=doc["mode"], n=int(doc["n"]), j=int(doc["j"]),
                      tau=float(doc["tau"]), eps=float(doc["eps"]),
                      delta=float(doc["delta"]), noise_model=noise["model"],
                      eta=float(noise["eta"]), trials=int(doc["trials"]),
                      seed=int(doc["seed"]), adversary=doc.get("adversary"),
                      function_file=doc.get("function"), out=doc.get("out"),
                      threads=int(doc.get("threads", 0)))
        except KeyError as exc:
            raise ValueError(f"{exc.args[0]}: missing required config field") from None
        cfg.validate()
        return cfg


@dataclass
class TrialRecord:
    index: int
    seed: int
    success: bool
    h_in_l: bool | None = None
    regret_ok: bool | None = None
    correct: bool | None = None
    wrong_accept: bool | None = None
    regret: float | None = None
    qfs_samples: int = 0
    examples: int = 0
    ms: float = field(default=0.0, compare=False)


@dataclass
class Summary:
    trials: int
    successes: int
    fraction: float
    wilson_low: float
    wilson_high: float
    mean_ms: float


def _target(cfg: ExperimentConfig, fixed: BooleanFunction | None,
            rng: np.random.Generator, min_support: int = 1
            ) -> tuple[BooleanFunction, FourierSpectrum]:
    if fixed is not None:
        return fixed, fixed.spectrum()
    for _ in range(1000):
        f = gen_ftau(cfg.n, cfg.j, cfg.tau, rng)
        spec = f.spectrum()
        if len(spec.entries) >= min_support:
            return f, spec
    raise RuntimeError(f"no target with support >= {min_support} found")


def run_trial(cfg: ExperimentConfig, index: int,
              fixed: BooleanFunction | None) -> TrialRecord:
    trial_seed = derive_seed(cfg.seed, index)
    gen_rng = np.random.default_rng(derive_seed(trial_seed, 1))
    work_rng = np.random.default_rng(derive_seed(trial_seed, 2))
    prover_rng = np.random.default_rng(derive_seed(trial_seed, 3))
    verifier_seed = derive_seed(trial_seed, 4)
    channel = make_channel(cfg.noise_model, cfg.eta)
    start = time.perf_counter()

    # omit adversaries need a second heavy string to leave behind
    min_support = 2 if cfg.mode == "verify-sound" and cfg.adversary == "omit" else 1
    f, spec = _target(cfg, fixed, gen_rng, min_support)

    if cfg.mode == "rectify":
        theta = cfg.tau * cfg.tau
        k = required_samples(cfg.n, theta, cfg.delta)
        batch = sample_batch(spec, channel, k, prover_rng)
        found = rectify(batch, cfg.n, theta, work_rng)
        ok = heavy_set(spec, theta).issubset(found)
        rec = TrialRecord(index, trial_seed, ok, h_in_l=ok, qfs_samples=k)
    elif cfg.mode == "learn":
        est = sparse_estimate(spec, channel, cfg.eps, cfg.delta, work_rng)
        r = regret(spec, argmax_estimate(est.entries))
        ok = r <= cfg.eps
        rec = TrialRecord(index, trial_seed, ok, regret_ok=ok, regret=r,
                          qfs_samples=est.qfs_samples, examples=est.examples_used)
    else:
        params = VerifierParams(n=cfg.n, tau=cfg.tau, eps=cfg.eps, delta=cfg.delta)
        if cfg.mode == "verify-complete":
            prover = honest_prover(spec, channel, prover_rng)
        elif cfg.adversary == "wrongfunction":
            wrong = gen_ftau(cfg.n, cfg.j, cfg.tau, prover_rng)
            prover = adversary("wrongfunction", prover_rng,
                               spectrum=wrong.spectrum(), channel=channel)
        elif cfg.adversary == "omit":
            p0 = spec.coeffs * spec.coeffs
            avoid = int(spec.support[int(np.argmax(p0))])
            prover = adversary("omit", prover_rng, spectrum=spec, channel=channel,
                               avoid=avoid)
        else:
            prover = adversary(cfg.adversary, prover_rng, n=cfg.n)
        trial = protocol_trial(params, f, prover, verifier_seed, spec)
        ok = trial.correct if cfg.mode == "verify-complete" else trial.wrong_accept
        used = trial.transcript.kprime2_used + trial.transcript.kprime3_used
        rec = TrialRecord(index, trial_seed, ok, correct=trial.correct,
                          wrong_accept=trial.wrong_accept,
                          regret=None if math.isnan(trial.regret) else trial.regret,
                          qfs_samples=params.k, examples=used)
    rec.ms = (time.perf_counter() - start) * 1000.0
    return rec


def run_experiment(cfg: ExperimentConfig) -> tuple[Summary, list[TrialRecord]]:
    """Run all trials (parallelizable), persist records, return the summary.

    For verify-sound configs the reported fraction counts wrong accepts;
    every other mode counts its success criterion.
    """
    cfg.validate()
    fixed = read_function(cfg.function_file) if cfg.function_file else None
    if fixed is not None and fixed.n != cfg.n:
        raise ValueError(f"function: file width {fixed.n} != config n {cfg.n}")
    workers = cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)
    if workers == 1:
        records = [run_trial(cfg, i, fixed) for i in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda i: run_trial(cfg, i, fixed),
                                    range(cfg.trials)))
    successes = sum(r.success for r in records)
    low, high = wilson_interval(successes, cfg.trials)
    summary = Summary(trials=cfg.trials, successes=successes,
                      fraction=successes / cfg.trials, wilson_low=low,
                      wilson_high=high,
                      mean_ms=sum(r.ms for r in records) / cfg.trials)
    if cfg.out:
        write_results(cfg.out, records, summary)
    return summary, records


def write_results(path, records: list[TrialRecord], summary: Summary) -> None:
    """Append one JSON line per trial plus a tagged summary line."""
    with open(path, "a") as fh:
        for rec in records:
            fh.write(json.dumps({"type": "trial", **asdict(rec)}) + "\n")
        fh.write(json.dumps({"type": "summary", **asdict(summary)}) + "\n")
