"""Deterministic oracle suites behind the ``selftest`` subcommand.

Everything here is exact or seeded: transform-vs-brute-force agreement,
the mismatch-polynomial identities, the analytic noise oracles, the
closed-form sample counts, and a hand-traced rectification run.
"""
from __future__ import annotations

import numpy as np

from .boolfn import BooleanFunction, coeff_bruteforce, gen_ftau
from .noise import analytic_noisy_dist, eta_eff, p0_eff
from .rectify import p_d_poly, rectify, required_samples
from .spectral import examples_needed


def check_spectrum_oracle() -> tuple[bool, str]:
    rng = np.random.default_rng(20240 + 1)
    worst = 0.0
    for trial in range(20):
        n = int(rng.integers(1, 9))
        if trial % 2 == 0:
            f = BooleanFunction.dense(n, rng.integers(0, 2, size=1 << n,
                                                      dtype=np.uint8))
        else:
            j = int(rng.integers(1, n + 1))
            f = gen_ftau(n, j, 2.0 ** (1 - j), rng)
        spec = f.spectrum()
        parseval = abs(sum(c * c for c in spec.entries.values()) - 1.0)
        if parseval > 1e-9:
            return False, f"Parseval off by {parseval}"
        for s in range(1 << n):
            worst = max(worst, abs(spec.coeff(s) - coeff_bruteforce(f, s)))
    return worst <= 1e-10, f"max |transform - direct sum| = {worst:.3g}"


def check_pd_identities() -> tuple[bool, str]:
    etas = [0.01 + 0.04 * i for i in range(13)]
    for eta in etas:
        for d in range(1, 26):
            if p_d_poly(eta, d) > eta + 1e-15:
                return False, f"P_{d}({eta}) > eta"
            if abs(p_d_poly(eta, 2 * d) - p_d_poly(eta, 2 * d - 1)) > 1e-12:
                return False, f"P_{2 * d}({eta}) != P_{2 * d - 1}({eta})"
    return True, "P_d <= eta and P_2d = P_2d-1 for d in 1..25"


def check_noise_oracles() -> tuple[bool, str]:
    if eta_eff(0.0) != 0.0 or eta_eff(1.0) != 0.5 or abs(eta_eff(0.1) - 0.095) > 1e-15:
        return False, "eta_eff closed form"
    mixed = p0_eff({0b1: 1.0}, 0.2)
    if abs(mixed[0b1] - 0.8) > 1e-15 or abs(mixed[0] - 0.2) > 1e-15:
        return False, "p0_eff mixture"
    dist = analytic_noisy_dist({0b00: 1.0}, 0.1, 2)
    expected = np.array([0.81, 0.09, 0.09, 0.01])
    if np.max(np.abs(dist - expected)) > 1e-12:
        return False, "analytic convolution hand case"
    if abs(float(dist.sum()) - 1.0) > 1e-9:
        return False, "analytic convolution mass"
    return True, "eta_eff, p0_eff and convolution hand cases"


def check_sample_formulas() -> tuple[bool, str]:
    got = (required_samples(16, 0.25, 0.1), required_samples(2, 0.9, 0.9),
           examples_needed(32, 0.1, 0.1))
    want = (18459, 369, 1293)
    return got == want, f"required_samples/examples_needed = {got}"


def check_rectify_trace() -> tuple[bool, str]:
    samples = [0b00] * 5 + [0b11] * 4 + [0b01]
    found = rectify(samples, 2, 0.6, np.random.default_rng(0))
    return found == [0b00, 0b11, 0b01], f"hand trace -> {[format(s, '02b') for s in found]}"


SUITES = [
    ("spectrum-oracle", check_spectrum_oracle),
    ("pd-identities", check_pd_identities),
    ("noise-oracles", check_noise_oracles),
    ("sample-formulas", check_sample_formulas),
    ("rectify-trace", check_rectify_trace),
]


def run(emit=print) -> int:
    """Run every suite; emit one line each; return 0 iff all pass."""
    failures = 0
    for name, fn in SUITES:
        ok, detail = fn()
        emit(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += not ok
    return 0 if failures == 0 else 1
