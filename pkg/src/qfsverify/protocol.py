"""One-round interactive proof for verified agnostic parity learning.

The verifier asks an untrusted prover for noisy circuit samples,
rectifies them into a candidate list L, validates L against fresh random
examples (sum of squared estimated coefficients must reach 1 - tau^2/2),
and finally outputs the argmax coefficient estimated on further fresh
examples. Messages serialize to plain text lines so a prover can live in
another process.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import check_value, check_width, format_bits, parse_bits
from .boolfn import BooleanFunction, FourierSpectrum
from .noise import NoiseChannel
from .oracles import draw_examples, sample_batch
from .rectify import rectify, required_samples
from .spectral import argmax_estimate, estimate_coeffs, examples_needed, regret

BAD_BATCH = "BadBatch"
VALIDATION_FAILED = "ValidationFailed"

ADVERSARY_KINDS = ("uniform", "wrongfunction", "omit", "constant")


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class VerifierParams:
    """Protocol parameters plus every derived quantity the verifier uses."""

    n: int
    tau: float
    eps: float
    delta: float

    def __post_init__(self) -> None:
        check_width(self.n)
        for name in ("tau", "eps", "delta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")

    @property
    def theta(self) -> float:
        return self.tau * self.tau

    @property
    def cap(self) -> int:
        return math.floor(2.0 / self.theta)

    @property
    def k(self) -> int:
        """Noisy circuit samples requested in step 1."""
        return required_samples(self.n, self.theta, self.delta / 3.0)

    @property
    def step2_accuracy(self) -> float:
        return self.tau ** 3 / 8.0

    @property
    def step2_threshold(self) -> float:
        return 1.0 - self.theta / 2.0

    @property
    def kprime2(self) -> int:
        return examples_needed(self.cap, self.step2_accuracy, self.delta / 3.0)

    @property
    def kprime3(self) -> int:
        return examples_needed(self.cap, self.eps, self.delta / 3.0)


@dataclass(frozen=True)
class SampleRequest:
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"request count must be positive, got {self.count}")


@dataclass(eq=False)
class SampleBatch:
    n: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.uint64)

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SampleBatch) and self.n == other.n
                and np.array_equal(self.samples, other.samples))


Message = SampleRequest | SampleBatch


@dataclass(frozen=True)
class Accepted:
    s0: int


@dataclass(frozen=True)
class Rejected:
    reason: str


Outcome = Accepted | Rejected


@dataclass(eq=False)
class Transcript:
    params: VerifierParams
    seed: int
    messages: list
    outcome: Outcome
    kprime1: int = 0
    kprime2_used: int = 0
    kprime3_used: int = 0


def serialize(msg: Message) -> str:
    """Wire form: "REQ <count>" or "BATCH <count>" plus one bit-string per line."""
    if isinstance(msg, SampleRequest):
        return f"REQ {msg.count}"
    if isinstance(msg, SampleBatch):
        lines = [f"BATCH {len(msg.samples)}"]
        lines.extend(format_bits(int(s), msg.n) for s in msg.samples)
        return "\n".join(lines)
    raise ValueError(f"not a message: {msg!r}")


def deserialize(text: str) -> Message:
    lines = text.splitlines()
    msg, consumed = _parse_message(lines, 0)
    if consumed != len(lines):
        raise ParseError(consumed + 1, "trailing content after message")
    return msg


def _parse_message(lines: list[str], start: int) -> tuple[Message, int]:
    if start >= len(lines):
        raise ParseError(start + 1, "expected a message header")
    head = lines[start].split()
    if len(head) != 2 or head[0] not in ("REQ", "BATCH"):
        raise ParseError(start + 1, f"malformed header {lines[start]!r}")
    try:
        count = int(head[1])
    except ValueError:
        raise ParseError(start + 1, f"bad count {head[1]!r}") from None
    if count < 1:
        raise ParseError(start + 1, f"count must be positive, got {count}")
    if head[0] == "REQ":
        return SampleRequest(count), start + 1
    if len(lines) - start - 1 < count:
        raise ParseError(len(lines) + 1, f"batch needs {count} sample lines")
    values = []
    n = None
    for i in range(count):
        lineno = start + 1 + i
        try:
            v, w = parse_bits(lines[lineno])
        except ValueError as exc:
            raise ParseError(lineno + 1, str(exc)) from None
        if n is None:
            n = w
        elif w != n:
            raise ParseError(lineno + 1, f"width {w} != {n}")
        values.append(v)
    return SampleBatch(n, np.array(values, dtype=np.uint64)), start + 1 + count


def honest_prover(spec: FourierSpectrum, channel: NoiseChannel,
                  rng: np.random.Generator):
    """Responder backed by the noisy sampling circuit for the true function."""
    def respond(req: SampleRequest) -> SampleBatch:
        return SampleBatch(spec.n, sample_batch(spec, channel, req.count, rng))
    return respond


def adversary(kind: str, rng: np.random.Generator, *, n: int | None = None,
              spectrum: FourierSpectrum | None = None,
              channel: NoiseChannel | None = None, avoid: int | None = None):
    """Dishonest responders for soundness trials.

    uniform: i.i.d. uniform strings (needs n). wrongfunction: honest
    sampler for a different spectrum (needs spectrum + channel). omit:
    honest sampler that never emits the designated heavy string before
    noise (needs spectrum + channel + avoid). constant: all zeros
    (needs n).
    """
    kind = kind.lower()
    if kind == "uniform":
        if n is None:
            raise ValueError("uniform adversary needs n")
        width = check_width(n)

        def respond(req: SampleRequest) -> SampleBatch:
            return SampleBatch(width, rng.integers(0, 1 << width, size=req.count,
                                                   dtype=np.uint64))
        return respond
    if kind == "wrongfunction":
        if spectrum is None or channel is None:
            raise ValueError("wrongfunction adversary needs spectrum and channel")
        return honest_prover(spectrum, channel, rng)
    if kind == "omit":
        if spectrum is None or channel is None or avoid is None:
            raise ValueError("omit adversary needs spectrum, channel and avoid")
        return _omit_prover(spectrum, channel, avoid, rng)
    if kind == "constant":
        if n is None:
            raise ValueError("constant adversary needs n")
        width = check_width(n)

        def respond(req: SampleRequest) -> SampleBatch:
            return SampleBatch(width, np.zeros(req.count, dtype=np.uint64))
        return respond
    raise ValueError(f"unknown adversary kind {kind!r}; expected one of {ADVERSARY_KINDS}")


def _omit_prover(spec: FourierSpectrum, channel: NoiseChannel, avoid: int,
                 rng: np.random.Generator):
    """Honest sampling conditioned on the noise-free draw differing from
    ``avoid``; equivalent to resampling whenever it comes up."""
    check_value(avoid, spec.n)
    keep = spec.support != np.uint64(avoid)
    if not np.any(keep):
        raise ValueError("cannot omit the only support string")
    probs = (spec.coeffs * spec.coeffs)[keep]
    support = spec.support[keep]
    cum = np.cumsum(probs / probs.sum())

    def respond(req: SampleRequest) -> SampleBatch:
        idx = np.minimum(np.searchsorted(cum, rng.random(req.count), side="right"),
                         len(support) - 1)
        s = support[idx] ^ channel.flip_masks(spec.n, req.count, rng)
        return SampleBatch(spec.n, s)
    return respond


def verifier_run(params: VerifierParams, f: BooleanFunction, prover,
                 seed: int) -> tuple[Outcome, Transcript]:
    """Execute the three verifier steps against a prover responder.

    The verifier's own randomness (rectification tie-breaks and random
    example draws) is derived from ``seed``, so a transcript replays
    bit-exactly against its recorded batch. The target function is used
    through the random example oracle only.
    """
    rng = np.random.default_rng(seed)
    req = SampleRequest(params.k)
    messages: list = [req]
    reply = prover(req)
    if isinstance(reply, SampleBatch):
        messages.append(reply)
    bad = (not isinstance(reply, SampleBatch) or reply.n != params.n
           or len(reply) != req.count
           or (len(reply) > 0 and int(reply.samples.max()) >> params.n))
    if bad:
        outcome: Outcome = Rejected(BAD_BATCH)
        return outcome, Transcript(params, seed, messages, outcome)
    candidates = rectify(reply.samples, params.n, params.theta, rng)
    ex2 = draw_examples(f, params.kprime2, rng)
    est2 = estimate_coeffs(candidates, ex2)
    validation_sum = sum(v * v for v in est2.values())
    if validation_sum < params.step2_threshold:
        outcome = Rejected(VALIDATION_FAILED)
        return outcome, Transcript(params, seed, messages, outcome,
                                   kprime2_used=params.kprime2)
    ex3 = draw_examples(f, params.kprime3, rng)
    est3 = estimate_coeffs(candidates, ex3)
    outcome = Accepted(argmax_estimate(est3))
    return outcome, Transcript(params, seed, messages, outcome,
                               kprime2_used=params.kprime2,
                               kprime3_used=params.kprime3)


def replay_transcript(transcript: Transcript, f: BooleanFunction) -> Outcome:
    """Re-run the verifier on the recorded batch and seed."""
    batch = next((m for m in transcript.messages if isinstance(m, SampleBatch)), None)

    def respond(req: SampleRequest):
        return batch
    outcome, _ = verifier_run(transcript.params, f, respond, transcript.seed)
    return outcome


@dataclass(frozen=True)
class ProtocolTrial:
    """Outcome bookkeeping for completeness and soundness runs."""

    outcome: Outcome
    correct: bool
    wrong_accept: bool
    regret: float
    transcript: Transcript


def protocol_trial(params: VerifierParams, f: BooleanFunction, prover, seed: int,
                   spec: FourierSpectrum | None = None) -> ProtocolTrial:
    """One verify run scored against the ground-truth spectrum.

    correct means accepted with regret <= eps; wrong_accept means
    accepted with regret > eps. A rejection is neither.
    """
    if spec is None:
        spec = f.spectrum()
    outcome, transcript = verifier_run(params, f, prover, seed)
    if isinstance(outcome, Accepted):
        r = regret(spec, outcome.s0)
        good = r <= params.eps
        return ProtocolTrial(outcome, good, not good, r, transcript)
    return ProtocolTrial(outcome, False, False, math.nan, transcript)


def write_transcript(t: Transcript, path) -> None:
    with open(path, "w") as fh:
        fh.write(
            f"PARAMS n={t.params.n} tau={t.params.tau!r} eps={t.params.eps!r} "
            f"delta={t.params.delta!r} seed={t.seed} kprime1={t.kprime1} "
            f"kprime2={t.kprime2_used} kprime3={t.kprime3_used}\n")
        for msg in t.messages:
            fh.write(serialize(msg) + "\n")
        if isinstance(t.outcome, Accepted):
            fh.write(f"OUTCOME ACCEPT {format_bits(t.outcome.s0, t.params.n)}\n")
        else:
            fh.write(f"OUTCOME REJECT {t.outcome.reason}\n")


def read_transcript(path) -> Transcript:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("PARAMS "):
        raise ParseError(1, "missing PARAMS header")
    fields = {}
    for token in lines[0].split()[1:]:
        key, _, value = token.partition("=")
        fields[key] = value
    try:
        params = VerifierParams(n=int(fields["n"]), tau=float(fields["tau"]),
                                eps=float(fields["eps"]), delta=float(fields["delta"]))
        seed = int(fields["seed"])
        counts = (int(fields["kprime1"]), int(fields["kprime2"]), int(fields["kprime3"]))
    except (KeyError, ValueError) as exc:
        raise ParseError(1, f"bad PARAMS header: {exc}") from None
    messages: list = []
    pos = 1
    while pos < len(lines) and not lines[pos].startswith("OUTCOME"):
        msg, pos = _parse_message(lines, pos)
        messages.append(msg)
    if pos >= len(lines):
        raise ParseError(len(lines) + 1, "missing OUTCOME line")
    parts = lines[pos].split()
    if len(parts) == 3 and parts[1] == "ACCEPT":
        s0, w = parse_bits(parts[2])
        if w != params.n:
            raise ParseError(pos + 1, f"outcome width {w} != {params.n}")
        outcome: Outcome = Accepted(s0)
    elif len(parts) == 3 and parts[1] == "REJECT" and parts[2] in (BAD_BATCH,
                                                                   VALIDATION_FAILED):
        outcome = Rejected(parts[2])
    else:
        raise ParseError(pos + 1, f"malformed OUTCOME line {lines[pos]!r}")
    return Transcript(params, seed, messages, outcome, kprime1=counts[0],
                      kprime2_used=counts[1], kprime3_used=counts[2])
