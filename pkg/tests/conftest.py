from __future__ import annotations

from fractions import Fraction

import pytest

from pdspectrum.bands import build_tables
from pdspectrum.cache import LevelCache
from pdspectrum.covering import build_coverings
from pdspectrum.traces import ModelParams

LAMBDAS = ("0.2", "0.5", "1", "2", "4")
TABLE_LEVEL = 13


@pytest.fixture(scope="session")
def table_cache(tmp_path_factory):
    return LevelCache(tmp_path_factory.mktemp("levels"))


@pytest.fixture(scope="session")
def tables_for(table_cache):
    """Level tables ``0..n`` per coupling; built once per session and grown on demand."""
    memo: dict = {}

    def get(lam: str, n: int = TABLE_LEVEL):
        have = memo.get(lam)
        if have is None or len(have) <= n:
            have = build_tables(max(n, len(have or ()) - 1), ModelParams(Fraction(lam)), cache=table_cache)
            memo[lam] = have
        return have[: n + 1]

    return get


@pytest.fixture(scope="session")
def coverings_for(tables_for):
    memo: dict = {}

    def get(lam: str, n: int):
        have = memo.get(lam)
        if have is None or len(have) <= n:
            have = build_coverings(n, tables_for(lam, n + 1))
            memo[lam] = have
        return have[: n + 1]

    return get


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """``record(n, ok, detail)`` prints one verdict line per criterion and keeps it for the summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def record(n: int, ok: bool, detail: str) -> bool:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
