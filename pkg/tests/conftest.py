import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


class Criterion:
    """Records the outcome of one acceptance criterion for the end-of-run report."""

    def __init__(self, number: int):
        self.number = number
        self.details: list[str] = []

    def note(self, text: str) -> None:
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        detail = "; ".join(self.details)
        if exc_type is not None:
            detail = f"{detail}; {exc_type.__name__}: {exc}".lstrip("; ")
        ACCEPTANCE[self.number] = (exc_type is None, detail)
        print(f"criterion {self.number}: {'PASS' if exc_type is None else 'FAIL'} {detail}")
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
