"""Boolean functions on {0,1}^n and their Fourier spectra.

A function is stored either as a dense truth table (width <= 24) or as a
junta embedding: a small dense table on j relevant coordinates placed
inside a wider input. Spectra are computed exactly; for +/-1-valued
functions every coefficient is a dyadic rational that float64 represents
with zero rounding error.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .bits import CapacityError, check_value, check_width, format_bits, parity, parse_bits

DENSE_WIDTH_CAP = 24
BRUTEFORCE_WIDTH_CAP = 16
PARSEVAL_TOL = 1e-9
GEN_FTAU_MAX_REJECTS = 1000


class GenerationError(RuntimeError):
    """Rejection sampling gave up; the requested (j, tau) pair is infeasible."""


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """A boolean function, dense or junta-embedded.

    ``coords`` is None for a dense table; otherwise it is the strictly
    increasing tuple of relevant coordinates (1-indexed from the left)
    and ``table`` is the inner truth table on those coordinates. Table
    index i encodes the relevant bits packed leftmost-first.
    """

    n: int
    table: np.ndarray
    coords: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        check_width(self.n)
        w = self.width
        if w > DENSE_WIDTH_CAP:
            raise CapacityError(f"table width {w} exceeds the dense cap {DENSE_WIDTH_CAP}")
        table = np.ascontiguousarray(self.table, dtype=np.uint8)
        if table.shape != (1 << w,):
            raise ValueError(f"table must have {1 << w} entries, got {table.shape}")
        if table.size and table.max() > 1:
            raise ValueError("table entries must be 0 or 1")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        if self.coords is not None:
            coords = tuple(int(c) for c in self.coords)
            if any(c < 1 or c > self.n for c in coords):
                raise ValueError(f"coordinates out of range 1..{self.n}: {coords}")
            if any(a >= b for a, b in zip(coords, coords[1:])) or not coords:
                raise ValueError("coordinates must be strictly increasing and nonempty")
            object.__setattr__(self, "coords", coords)

    @property
    def width(self) -> int:
        return self.n if self.coords is None else len(self.coords)

    @classmethod
    def dense(cls, n: int, table) -> "BooleanFunction":
        return cls(n=n, table=np.asarray(table))

    @classmethod
    def junta(cls, n: int, coords, table) -> "BooleanFunction":
        return cls(n=n, table=np.asarray(table), coords=tuple(coords))

    def _compress(self, xs: np.ndarray) -> np.ndarray:
        """Gather the relevant coordinates of packed inputs into table indices."""
        if self.coords is None:
            return xs
        j = len(self.coords)
        idx = np.zeros(xs.shape, dtype=np.uint64)
        for i, c in enumerate(self.coords):
            bit = (xs >> np.uint64(self.n - c)) & np.uint64(1)
            idx |= bit << np.uint64(j - 1 - i)
        return idx

    def eval(self, x: int) -> int:
        check_value(x, self.n)
        return int(self.eval_many(np.array([x], dtype=np.uint64))[0])

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        return self.table[self._compress(xs)]

    def spectrum(self) -> "FourierSpectrum":
        """Exact sparse Fourier spectrum of g = 1 - 2f via a fast transform."""
        g = 1 - 2 * self.table.astype(np.int64)
        w = fwht(g)
        scale = float(1 << self.width)
        entries: dict[int, float] = {}
        for inner_s in np.nonzero(w)[0]:
            coeff = float(w[inner_s]) / scale
            entries[self._lift(int(inner_s))] = coeff
        return FourierSpectrum(self.n, entries)

    def _lift(self, inner_s: int) -> int:
        """Map an inner-table support index onto the full n coordinates."""
        if self.coords is None:
            return inner_s
        j = len(self.coords)
        s = 0
        for i, c in enumerate(self.coords):
            if (inner_s >> (j - 1 - i)) & 1:
                s |= 1 << (self.n - c)
        return s

    def to_record(self) -> dict:
        rec = {
            "n": self.n,
            "kind": "dense" if self.coords is None else "junta",
            "table": "".join("1" if b else "0" for b in self.table),
        }
        if self.coords is not None:
            rec["coords"] = list(self.coords)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "BooleanFunction":
        table = np.frombuffer(rec["table"].encode(), dtype=np.uint8) - ord("0")
        if rec["kind"] == "dense":
            return cls.dense(rec["n"], table)
        if rec["kind"] == "junta":
            return cls.junta(rec["n"], rec["coords"], table)
        raise ValueError(f"unknown function kind {rec['kind']!r}")


def write_function(f: BooleanFunction, path) -> None:
    with open(path, "w") as fh:
        json.dump(f.to_record(), fh)
        fh.write("\n")


def read_function(path) -> BooleanFunction:
    with open(path) as fh:
        return BooleanFunction.from_record(json.load(fh))


def fwht(values: np.ndarray) -> np.ndarray:
    """In-order Walsh-Hadamard transform, exact over int64."""
    v = np.array(values, dtype=np.int64)
    m = v.size
    if m & (m - 1):
        raise ValueError("transform length must be a power of two")
    h = 1
    while h < m:
        v = v.reshape(-1, 2 * h)
        left = v[:, :h].copy()
        right = v[:, h:].copy()
        v[:, :h] = left + right
        v[:, h:] = left - right
        v = v.reshape(m)
        h *= 2
    return v


@dataclass(eq=False)
class FourierSpectrum:
    """Sparse map s -> g-hat(s); only nonzero coefficients are stored.

    The squared coefficients form the sampling distribution p0, so the
    constructor enforces the Parseval identity within 1e-9.
    """

    n: int
    entries: dict[int, float]
    _support: np.ndarray = field(init=False, repr=False)
    _coeffs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        check_width(self.n)
        if not self.entries:
            raise ValueError("a spectrum cannot be empty (Parseval forbids it)")
        self.entries = {int(s): float(c) for s, c in self.entries.items()}
        keys = sorted(self.entries)
        check_value(keys[0], self.n)
        check_value(keys[-1], self.n)
        support = np.array(keys, dtype=np.uint64)
        coeffs = np.array([self.entries[int(s)] for s in support], dtype=np.float64)
        if np.any(coeffs == 0.0):
            raise ValueError("stored coefficients must be nonzero")
        total = float(np.sum(coeffs * coeffs))
        if abs(total - 1.0) > PARSEVAL_TOL:
            raise ValueError(f"Parseval violation: sum of squares = {total!r}")
        self._support = support
        self._coeffs = coeffs

    @property
    def support(self) -> np.ndarray:
        """Support strings in increasing (lexicographic) order."""
        return self._support

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients aligned with ``support``."""
        return self._coeffs

    def coeff(self, s: int) -> float:
        check_value(s, self.n)
        return self.entries.get(int(s), 0.0)

    def p0(self, s: int) -> float:
        c = self.coeff(s)
        return c * c

    def loss(self, s: int) -> float:
        """Exact disagreement rate of the parity hypothesis s: (1 - g-hat(s)) / 2."""
        return (1.0 - self.coeff(s)) / 2.0

    def min_nonzero(self) -> float:
        return float(np.min(np.abs(self._coeffs)))

    def max_coeff(self) -> float:
        """max over all 2^n strings of g-hat(s), zeros off support included."""
        m = float(np.max(self._coeffs))
        if len(self.entries) < (1 << self.n):
            m = max(m, 0.0)
        return m

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Recover f(x) = (1 - g(x)) / 2 by summing the sparse expansion."""
        xs = np.asarray(xs, dtype=np.uint64)
        g = np.zeros(xs.shape, dtype=np.float64)
        for s, c in zip(self._support, self._coeffs):
            g += c * (1.0 - 2.0 * parity(xs & s))
        return (g < 0.0).astype(np.uint8)

    def to_records(self) -> list[dict]:
        return [{"s": format_bits(int(s), self.n), "coeff": float(c)}
                for s, c in zip(self._support, self._coeffs)]


def write_spectrum(spec: FourierSpectrum, path) -> None:
    with open(path, "w") as fh:
        for rec in spec.to_records():
            fh.write(json.dumps(rec) + "\n")


def read_spectrum(path) -> FourierSpectrum:
    entries: dict[int, float] = {}
    n = None
    with open(path) as fh:
        for line in fh:
            rec = json.loads(line)
            v, w = parse_bits(rec["s"])
            if n is None:
                n = w
            elif w != n:
                raise ValueError("inconsistent widths in spectrum file")
            entries[v] = float(rec["coeff"])
    if n is None:
        raise ValueError("empty spectrum file")
    return FourierSpectrum(n, entries)


def coeff_bruteforce(f: BooleanFunction, s: int) -> float:
    """Direct-summation Fourier coefficient; the oracle the transform is tested against."""
    if f.n > BRUTEFORCE_WIDTH_CAP:
        raise CapacityError(f"brute force needs n <= {BRUTEFORCE_WIDTH_CAP}, got {f.n}")
    check_value(s, f.n)
    xs = np.arange(1 << f.n, dtype=np.uint64)
    g = 1 - 2 * f.eval_many(xs).astype(np.int64)
    chi = 1 - 2 * parity(xs & np.uint64(s)).astype(np.int64)
    return float(np.sum(g * chi)) / float(1 << f.n)


def gen_ftau(n: int, j: int, tau: float, rng: np.random.Generator) -> BooleanFunction:
    """Random junta whose nonzero coefficients all have magnitude >= tau.

    Relevant coordinates are drawn uniformly without replacement; inner
    tables are rejection-sampled until the tau condition holds, giving up
    after 1000 consecutive rejections.
    """
    check_width(n)
    if not 1 <= j <= DENSE_WIDTH_CAP or j > n:
        raise ValueError(f"junta size must satisfy 1 <= j <= min(n, {DENSE_WIDTH_CAP})")
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    coords = tuple(sorted(int(c) + 1 for c in rng.choice(n, size=j, replace=False)))
    scale = float(1 << j)
    for _ in range(GEN_FTAU_MAX_REJECTS):
        table = rng.integers(0, 2, size=1 << j, dtype=np.uint8)
        w = fwht(1 - 2 * table.astype(np.int64))
        nonzero = w[w != 0]
        if np.min(np.abs(nonzero)) / scale >= tau:
            return BooleanFunction.junta(n, coords, table)
    raise GenerationError(
        f"no inner table with min coefficient >= {tau} found in "
        f"{GEN_FTAU_MAX_REJECTS} attempts (j={j})")
