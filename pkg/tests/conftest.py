from pathlib import Path

import pytest

from strata_engine.engine.combinatorics.partitions import NumberPartition

FAMILIES_DIR = Path(__file__).resolve().parent.parent / "strata_engine" / "config" / "families"


def P(text: str) -> NumberPartition:
    """Shorthand for partitions written as '2,1,1,1'."""
    return NumberPartition.parse(text)


@pytest.fixture
def isolated_env(tmp_path, monkeypatch):
    """Run in tmp_path with the result cache and settings redirected there."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("STRATA_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.delenv("STRATA_SETTINGS", raising=False)
    return tmp_path
