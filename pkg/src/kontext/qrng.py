"""Simulated QRNG: prepare a ray, measure a context, record Born-rule outcomes.

Sampling contract (stable across runs and platforms):

* the bit generator is NumPy's ``PCG64`` seeded with ``SeedSequence(seed)``;
  batch ``i`` of a split run uses ``SeedSequence(seed, spawn_key=(i,))``;
* each draw consumes one raw 64-bit word ``w`` and forms the uniform
  ``u = (w >> 11) * 2**-53`` in ``[0, 1)``;
* the outcome is the first basis index ``i`` with ``u < P_0 + ... + P_i``,
  where ``P`` are the Born probabilities normalized to sum to one.

Bit 1 means the target basis element clicked.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import config
from .ray_space import ContextBasis, Ray, born_probability, inner_product

DEFAULT_BOUNDS: tuple[float, float] = (math.sqrt(5 / 14), 3 / math.sqrt(14))


class ConfigError(ValueError):
    pass


def certify_angle(c: Ray, b: Ray, bounds: tuple[float, float] = DEFAULT_BOUNDS,
                  tol: float | None = None) -> tuple[bool, float]:
    """Whether ``|<c|b>|`` lies in the closed interval ``bounds``.

    The comparison allows ``tol`` of slack at both ends so that rays built to
    sit exactly on a bound are not rejected by rounding.
    """
    lo, hi = bounds
    overlap = abs(inner_product(c, b))
    tol = config.resolve(tol)
    return (lo - tol <= overlap <= hi + tol), overlap


@dataclass(frozen=True)
class QrngConfig:
    preparation: Ray
    measurement: ContextBasis
    target_index: int = 0
    seed: int = 0
    n: int = 1
    bounds: tuple[float, float] = DEFAULT_BOUNDS

    def __post_init__(self) -> None:
        if not isinstance(self.measurement, ContextBasis):
            raise ConfigError("measurement must be a ContextBasis")
        if self.preparation.dim != self.measurement.dim:
            raise ConfigError(
                f"preparation has dimension {self.preparation.dim}, basis {self.measurement.dim}"
            )
        if not 0 <= self.target_index < self.measurement.dim:
            raise ConfigError(f"target_index {self.target_index} out of range")
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        lo, hi = self.bounds
        if not 0.0 <= lo <= hi <= 1.0:
            raise ConfigError(f"bounds must satisfy 0 <= lower <= upper <= 1, got {self.bounds!r}")
        object.__setattr__(self, "bounds", (float(lo), float(hi)))

    @property
    def target(self) -> Ray:
        return self.measurement[self.target_index]


@dataclass(frozen=True)
class SampleRun:
    outcomes: np.ndarray = field(repr=False)
    target_index: int
    tallies: tuple[int, ...]
    certified: bool
    overlap: float
    seed: int

    @property
    def n(self) -> int:
        return int(self.outcomes.size)

    @property
    def bits(self) -> np.ndarray:
        return (self.outcomes == self.target_index).astype(np.uint8)

    @property
    def frequency(self) -> float:
        return self.tallies[self.target_index] / self.n

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "frequency": self.frequency,
            "n": self.n,
            "overlap": self.overlap,
            "seed": self.seed,
            "tallies": list(self.tallies),
            "target_index": self.target_index,
        }


def uniforms(seed_seq: np.random.SeedSequence, n: int) -> np.ndarray:
    raw = np.random.PCG64(seed_seq).random_raw(n)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def draw_outcomes(probabilities, u: np.ndarray) -> np.ndarray:
    p = np.clip(np.asarray(probabilities, dtype=np.float64), 0.0, 1.0)
    cum = np.cumsum(p / p.sum())
    cum[-1] = 1.0
    return np.searchsorted(cum, u, side="right").astype(np.int64)


def _run(cfg: QrngConfig, outcomes: np.ndarray) -> SampleRun:
    certified, overlap = certify_angle(cfg.preparation, cfg.target, cfg.bounds)
    tallies = np.bincount(outcomes, minlength=cfg.measurement.dim)
    return SampleRun(outcomes, cfg.target_index, tuple(int(t) for t in tallies),
                     certified, overlap, cfg.seed)


def sample(cfg: QrngConfig) -> SampleRun:
    """Draw ``cfg.n`` measurement outcomes of ``cfg.measurement`` on ``cfg.preparation``."""
    probs = [born_probability(cfg.preparation, r) for r in cfg.measurement]
    u = uniforms(np.random.SeedSequence(cfg.seed), cfg.n)
    return _run(cfg, draw_outcomes(probs, u))


def batch_seed(seed: int, batch_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(batch_index,))


def sample_batches(cfg: QrngConfig, n_batches: int, workers: int = 1) -> SampleRun:
    """Like :func:`sample`, but drawn as ``n_batches`` independently seeded chunks.

    Chunk ``i`` uses :func:`batch_seed` ``(seed, i)`` and the chunks are
    concatenated in index order, so the result does not depend on ``workers``.
    """
    if n_batches < 1:
        raise ConfigError("n_batches must be positive")
    probs = [born_probability(cfg.preparation, r) for r in cfg.measurement]
    sizes = [cfg.n // n_batches + (1 if i < cfg.n % n_batches else 0) for i in range(n_batches)]

    def chunk(i: int) -> np.ndarray:
        return draw_outcomes(probs, uniforms(batch_seed(cfg.seed, i), sizes[i]))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(chunk, range(n_batches)))
    else:
        parts = [chunk(i) for i in range(n_batches)]
    return _run(cfg, np.concatenate(parts))


def debias(bits) -> np.ndarray:
    """Von Neumann extractor: pairs 01 -> 0, 10 -> 1, 00 and 11 dropped."""
    b = np.asarray(bits, dtype=np.uint8).ravel()
    b = b[: b.size - b.size % 2]
    first, second = b[0::2], b[1::2]
    keep = first != second
    return first[keep].copy()


def pack_bits(bits) -> bytes:
    """Bits packed eight to a byte, most significant bit first, zero padded."""
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="big").tobytes()


def write_bits(path, bits) -> None:
    with open(path, "wb") as fh:
        fh.write(pack_bits(bits))
