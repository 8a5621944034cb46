import pytest

from regencodes.gf import build_field

# criterion number -> (passed, detail); filled in by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(passed), detail)
    print(f"CRITERION {criterion}: {'PASS' if passed else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[c]
        terminalreporter.write_line(f"CRITERION {c}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def f16():
    return build_field(16)


@pytest.fixture(scope="session")
def f8():
    return build_field(8)


@pytest.fixture
def rng():
    return __import__("numpy").random.default_rng(1234)
