import pytest

from conelw import ProblemInstance, ThresholdSet, Settings, BoundaryTerm, parse

RAMP_F = "0.4 + 2.6*ramp(y, 1, 2)"


def make_instance(p="0", f=("1",), lam=2.0, terms=()):
    bts = [BoundaryTerm(tau, parse(Phi), parse(phi), parse(psi))
           for tau, Phi, phi, psi in terms]
    return ProblemInstance(parse(p), [parse(s) for s in f], bts, float(lam))


@pytest.fixture
def ramp_instance():
    return make_instance(f=(RAMP_F,))


@pytest.fixture
def ramp_thresholds():
    return ThresholdSet(1.0, 2.0, 8.0, 2.0)


@pytest.fixture
def settings():
    return Settings()


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail=""):
    ACCEPTANCE_LINES.append(
        f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}"
        + (f" :: {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
