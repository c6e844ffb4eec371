"""Shared pytest hooks: the acceptance suite records one line per criterion
and this prints them as a summary section at the end of the run."""

_criterion_lines = []


def record_criterion(number, ok, detail):
    _criterion_lines.append((number, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_criterion_lines):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {detail}")
