import sys

import pytest

from replitool.dataio import NAMED_PAIRS, load_fixture


@pytest.fixture(scope="session")
def rpcb():
    return load_fixture("rpcb")


@pytest.fixture(scope="session")
def rpp():
    return load_fixture("rpp_eprp")


@pytest.fixture(scope="session")
def named(rpcb, rpp):
    by_id = {p.id: p for p in list(rpcb) + list(rpp)}
    return {name: by_id[pid] for name, pid in NAMED_PAIRS.items()}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
