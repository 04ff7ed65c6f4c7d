from __future__ import annotations

import logging
from fractions import Fraction

from pdspectrum.bands import build_tables
from pdspectrum.cache import ENV_VAR, LevelCache, default_cache_dir
from pdspectrum.traces import ModelParams


def test_round_trip_is_bitwise(tmp_path):
    params = ModelParams(Fraction(2))
    tables = build_tables(8, params)
    cache = LevelCache(tmp_path)
    for t in tables:
        cache.store(params, t)
    back = cache.load(params, 8)
    assert back is not None and back.dumps() == tables[8].dumps()
    for x, y in zip(tables[8].bands, back.bands):
        for u, v in ((x.a, y.a), (x.z, y.z), (x.b, y.b)):
            assert u.lo == v.lo and u.hi == v.hi
            assert u.lo.precision == v.lo.precision
    again = build_tables(8, params, cache=cache)
    assert cache.hits >= 9
    assert [t.dumps() for t in again] == [t.dumps() for t in tables]


def test_changed_lambda_misses(tmp_path):
    cache = LevelCache(tmp_path)
    p2 = ModelParams(Fraction(2))
    cache.store(p2, build_tables(2, p2)[2])
    assert cache.load(ModelParams(Fraction(5, 2)), 2) is None


def test_precision_is_part_of_the_key(tmp_path):
    cache = LevelCache(tmp_path)
    low = ModelParams(Fraction(1), precision_bits=96)
    high = ModelParams(Fraction(1), precision_bits=160)
    cache.store(low, build_tables(3, low)[3])
    assert cache.load(high, 3) is None
    build_tables(3, high, cache=cache)
    assert cache.path(low, 3).exists() and cache.path(high, 3).exists()
    assert cache.path(low, 3) != cache.path(high, 3)
    assert max(b.bits for b in cache.load(high, 3).bands) >= 160


def test_corrupt_file_is_recomputed(tmp_path, caplog):
    params = ModelParams(Fraction(1, 2))
    cache = LevelCache(tmp_path)
    fresh = build_tables(4, params, cache=cache)
    cache.path(params, 4).write_text("{not json")
    with caplog.at_level(logging.WARNING):
        again = build_tables(4, params, cache=cache)
    assert "corrupt" in caplog.text
    assert again[4].dumps() == fresh[4].dumps()
    # the damaged file was replaced
    assert cache.load(params, 4) is not None


def test_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "elsewhere"))
    assert default_cache_dir() == tmp_path / "elsewhere"
    assert LevelCache().root == tmp_path / "elsewhere"
