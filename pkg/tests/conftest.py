"""Collects the one-line verdicts of the acceptance suite and prints them at the end."""
import pytest

VERDICTS: list[tuple[int, str, str, float]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    crit = item.get_closest_marker("criterion")
    if crit is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        VERDICTS.append((crit.args[0], crit.args[1], "PASS" if rep.passed else "FAIL",
                         rep.duration))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, verdict, secs in sorted(VERDICTS, key=lambda v: v[0]):
        terminalreporter.write_line(f"{verdict} criterion {n:2d} ({secs:6.1f} s): {title}")
