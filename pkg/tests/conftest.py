import fixtures


def pytest_terminal_summary(terminalreporter):
    if not fixtures.ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(fixtures.ACCEPTANCE):
        terminalreporter.write_line(line)
