import pytest

from gmedim.kernels import available_backends
from gmedim.tensor import SystemShape


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


@pytest.fixture
def s33():
    return SystemShape(3, 3)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
