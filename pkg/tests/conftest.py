import pytest

_RESULTS = {}


class CriterionLog:
    """Collects one verdict per numbered acceptance criterion."""

    def record(self, number, title, passed, detail=""):
        verdict = "PASS" if passed else "FAIL"
        line = f"[criterion {number:>2}] {verdict}  {title}" + (f"  ({detail})" if detail else "")
        _RESULTS[number] = line
        print(line)
        return passed

    def skip(self, number, title, reason):
        line = f"[criterion {number:>2}] SKIP  {title}  ({reason})"
        _RESULTS[number] = line
        print(line)
        pytest.skip(reason)


@pytest.fixture(scope="session")
def criteria():
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        terminalreporter.write_line(_RESULTS[number])
