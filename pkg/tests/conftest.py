"""Print the acceptance verdicts at the end of every pytest session."""

import test_acceptance


def pytest_terminal_summary(terminalreporter):
    if not test_acceptance.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(test_acceptance.VERDICTS):
        terminalreporter.write_line(test_acceptance.VERDICTS[k])
