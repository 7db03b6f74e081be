"""Shared pytest config: the acceptance criterion reporter.

Acceptance tests register one line per criterion; the terminal summary
prints them all, pass or fail, at the end of the run.
"""

CRITERION_RESULTS = []


def record_criterion(name, passed, detail=""):
    CRITERION_RESULTS.append((name, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in CRITERION_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
