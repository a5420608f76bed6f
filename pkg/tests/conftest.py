import pytest

from helpers import ACCEPTANCE, chain_trap_dag, six_taxa_network


@pytest.fixture
def six_taxa():
    return six_taxa_network()


@pytest.fixture
def chain_trap():
    return chain_trap_dag()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {status}  {title}  {detail}")
