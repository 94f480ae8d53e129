"""Acceptance suite: one pass/fail line per criterion.

Run with `pytest -v tests/test_acceptance.py` (or `blowdown check` for the
same results from the command line). Each criterion prints its quantitative
one-liner so the observed margins are visible in the test log.
"""

import pytest

from blowdown.acceptance import CRITERIA, run_all

_NAMES = [fn.__name__.removeprefix("criterion_") for fn in CRITERIA]


@pytest.fixture(scope="module")
def results():
    return run_all()


@pytest.mark.parametrize("index", range(len(CRITERIA)), ids=_NAMES)
def test_criterion(results, index):
    result = results[index]
    print(result.line)
    assert result.passed, result.line


def test_all_criteria_reported(results):
    assert [r.number for r in results] == list(range(1, len(CRITERIA) + 1))
