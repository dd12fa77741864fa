import pytest

from epikit import IntegratorConfig, ModelParams, integrate

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion, then assert."""

    def record(label: str, passed: bool, detail: str = "") -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] {label}" + (f"  ({detail})" if detail else "")
        print(line)
        request.config.stash[_LINES].append(line)
        assert passed, line

    return record


@pytest.fixture(scope="session")
def sir_runs():
    """Default-config SIR trajectories (h=1e-3, i0=1e-6) keyed by r0."""
    return {r0: integrate(ModelParams(r0)) for r0 in (2.0, 3.0, 6.0)}


@pytest.fixture(scope="session")
def fine_runs():
    """h=1e-4 SIR trajectories keyed by r0."""
    cfg = IntegratorConfig(step_size=1e-4)
    return {r0: integrate(ModelParams(r0), config=cfg) for r0 in (2.0, 3.0)}
