import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def report_criterion(request, capsys):
    """Print one ``criterion N: PASS|FAIL`` line now and again in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def report(n, ok, detail, seconds):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}"
        lines.append((n, line))
        with capsys.disabled():
            print("\n" + line)
        return line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
