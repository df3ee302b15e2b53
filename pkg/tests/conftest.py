import time
from pathlib import Path

import pytest

from zetacosmo.riemann_siegel import DEFAULT_CONFIG
from zetacosmo.zero_engine import (
    config_hash,
    find_zeros,
    ingest_zero_table,
    read_zero_table,
    write_zero_table,
)

DATA = Path(__file__).parent / "data"
REFERENCE_ZEROS = DATA / "zeros_first100.txt"
TABLE_HEIGHT = 10000.0

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def reference_table():
    """First 100 ordinates, 15 significant digits, from an independent source."""
    return ingest_zero_table(REFERENCE_ZEROS)


@pytest.fixture(scope="session")
def table_1e4(request):
    """All zeros up to t = 10^4, computed once and kept in the pytest cache."""
    cache_dir = Path(request.config.cache.mkdir("zetacosmo"))
    path = cache_dir / f"zeros_{config_hash(DEFAULT_CONFIG)}_{int(TABLE_HEIGHT)}.txt"
    if path.exists():
        try:
            table = read_zero_table(path, DEFAULT_CONFIG)
            if table.source == "computed" and table.h_max >= TABLE_HEIGHT:
                return table
        except Exception:
            pass
    start = time.perf_counter()
    table = find_zeros(0.0, TABLE_HEIGHT, DEFAULT_CONFIG)
    write_zero_table(table, path)
    print(f"\ncomputed {len(table)} zeros up to {TABLE_HEIGHT:g} in {time.perf_counter() - start:.1f} s")
    return table


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
