import functools

import pytest

from qrecursive import catalog
from qrecursive.builder import build
from qrecursive.core import SequenceOracle


@functools.lru_cache(maxsize=None)
def corrected(name):
    entry = catalog.get_entry(name)
    d = entry.definition()
    return build(d, special=entry.special, oracle=SequenceOracle(d, validate=False))


@functools.lru_cache(maxsize=None)
def analysis(name):
    return catalog.analysis_inputs(name)


@pytest.fixture(scope="session")
def stern_values():
    return [catalog.stern_oracle(n) for n in range(2 ** 15 + 2)]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
