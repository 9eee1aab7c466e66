from hypothesis import settings

# kernel compilation or cache loading makes the first example slow
settings.register_profile("apsq", deadline=None)
settings.load_profile("apsq")

CRITERIA: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[number])
