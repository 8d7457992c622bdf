import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kontext.qrng import (
    DEFAULT_BOUNDS,
    ConfigError,
    QrngConfig,
    certify_angle,
    debias,
    pack_bits,
    sample,
    sample_batches,
    write_bits,
)
from kontext.ray_space import ContextBasis, Ray, complete_context, ray

C = ray(math.sqrt(2), 1, 0)
B = ray(math.sqrt(2), -1, 0)
BUG_BASIS = complete_context([B])


def ray_with_overlap(c: Ray, overlap: float) -> Ray:
    perp = complete_context([c])[1]
    s = math.sqrt(1 - overlap**2)
    return ray(tuple(overlap * x + s * y for x, y in zip(c, perp)))


def test_bounds_values():
    lo, hi = DEFAULT_BOUNDS
    assert lo == pytest.approx(0.597614, abs=1e-6)
    assert hi == pytest.approx(0.801784, abs=1e-6)


def test_certify_examples():
    ok, overlap = certify_angle(C, B)
    assert not ok and overlap == pytest.approx(1 / 3)
    assert certify_angle(C, ray_with_overlap(C, math.sqrt(5 / 14)))[0]
    assert certify_angle(C, ray_with_overlap(C, 3 / math.sqrt(14)))[0]
    assert certify_angle(C, ray_with_overlap(C, 0.7))[0]
    assert not certify_angle(C, C)[0]


@given(st.floats(0, 1), st.floats(0, 0.3), st.floats(0, 0.3))
def test_certify_monotone(overlap, widen_lo, widen_hi):
    b = ray_with_overlap(C, overlap)
    narrow = (0.5, 0.7)
    wide = (max(0.0, 0.5 - widen_lo), min(1.0, 0.7 + widen_hi))
    if certify_angle(C, b, narrow)[0]:
        assert certify_angle(C, b, wide)[0]


def test_config_validation():
    with pytest.raises(ConfigError):
        QrngConfig(C, BUG_BASIS, target_index=3, n=10)
    with pytest.raises(ConfigError):
        QrngConfig(C, BUG_BASIS, n=0)
    with pytest.raises(ConfigError):
        QrngConfig(C, BUG_BASIS, n=10, bounds=(0.8, 0.2))
    with pytest.raises(ConfigError):
        QrngConfig(ray(1, 0), BUG_BASIS, n=10)
    with pytest.raises(ConfigError):
        QrngConfig(C, BUG_BASIS, n=10, seed=-1)


def test_sample_certain_and_impossible():
    basis = complete_context([C])
    for seed in range(5):
        run = sample(QrngConfig(C, basis, 0, seed, 1000))
        assert run.frequency == 1.0 and run.bits.all()
        run = sample(QrngConfig(C, basis, 2, seed, 1000))
        assert run.frequency == 0.0


def test_sample_bug_pair():
    n = 100_000
    run = sample(QrngConfig(C, BUG_BASIS, 0, 1, n))
    assert abs(run.frequency - 1 / 9) <= 4 * math.sqrt((1 / 9) * (8 / 9) / n)
    assert sum(run.tallies) == n
    assert run.frequency == run.tallies[0] / n
    assert run.certified is False
    assert run.overlap == pytest.approx(1 / 3)


def test_sample_reproducible():
    cfg = QrngConfig(C, BUG_BASIS, 0, 12345, 5000)
    a, b = sample(cfg), sample(cfg)
    assert np.array_equal(a.outcomes, b.outcomes) and a.to_dict() == b.to_dict()
    assert not np.array_equal(a.outcomes, sample(QrngConfig(C, BUG_BASIS, 0, 12346, 5000)).outcomes)


def test_sampling_contract_frozen():
    # first PCG64 words for SeedSequence(0) mapped through the documented
    # 53-bit uniform and the cumulative Born table
    cfg = QrngConfig(C, BUG_BASIS, 0, 0, 8)
    raw = np.random.PCG64(np.random.SeedSequence(0)).random_raw(8)
    u = (raw >> np.uint64(11)) * 2.0**-53
    probs = np.array(BUG_BASIS.probabilities(C))
    expected = np.searchsorted(np.cumsum(probs / probs.sum()), u, side="right")
    assert np.array_equal(sample(cfg).outcomes, expected)


def test_batches_independent_of_workers():
    cfg = QrngConfig(C, BUG_BASIS, 0, 9, 10_001)
    one = sample_batches(cfg, 4, workers=1)
    many = sample_batches(cfg, 4, workers=4)
    assert np.array_equal(one.outcomes, many.outcomes)
    assert one.n == 10_001


def test_dary_tallies():
    basis = complete_context([B])
    run = sample(QrngConfig(C, basis, 1, 3, 50_000))
    probs = basis.probabilities(C)
    for t, p in zip(run.tallies, probs):
        assert abs(t / run.n - p) <= 4 * math.sqrt(max(p * (1 - p), 1e-12) / run.n) + 1e-12


def test_debias_examples():
    assert debias([0, 1, 1, 0]).tolist() == [0, 1]
    assert debias([0, 0, 0, 0]).tolist() == []
    assert debias([0, 1] * 6).tolist() == [0] * 6
    assert debias([1, 0, 1]).tolist() == [1]


@given(st.lists(st.integers(0, 1), max_size=200))
def test_debias_length(bits):
    assert len(debias(bits)) <= len(bits) // 2


def test_debias_removes_bias():
    rng = np.random.default_rng(0)
    biased = (rng.random(400_000) < 1 / 9).astype(np.uint8)
    out = debias(biased)
    assert abs(out.mean() - 0.5) <= 4 * math.sqrt(1 / (4 * out.size))


def test_pack_bits_msb_first(tmp_path):
    assert pack_bits([1, 0, 0, 0, 0, 0, 0, 1, 1]) == bytes([0b10000001, 0b10000000])
    path = tmp_path / "bits.bin"
    write_bits(path, [0, 1])
    assert path.read_bytes() == bytes([0b01000000])


def test_sample_run_json():
    run = sample(QrngConfig(C, BUG_BASIS, 0, 2, 100))
    doc = run.to_dict()
    assert set(doc) == {"certified", "frequency", "n", "overlap", "seed", "tallies", "target_index"}
    assert doc["n"] == 100 and doc["seed"] == 2


def test_context_basis_required():
    with pytest.raises(ConfigError):
        QrngConfig(C, (B,), n=3)
    assert isinstance(BUG_BASIS, ContextBasis)


@pytest.mark.parametrize("p", [1 / 9, 1 / 2])
def test_frequency_convergence(p):
    n = 100_000
    b = ray_with_overlap(C, math.sqrt(p))
    basis = complete_context([b])
    band = 4 * math.sqrt(p * (1 - p) / n)
    hits = sum(abs(sample(QrngConfig(C, basis, 0, seed, n)).frequency - p) <= band
               for seed in range(100))
    assert hits >= 99
