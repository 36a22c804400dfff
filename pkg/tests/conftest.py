import io
from datetime import date, datetime, timedelta, timezone

import pytest

from bugsna.events import parse_events

_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _RESULTS.append((marker.args[0], marker.args[1], item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, name, status in sorted(_RESULTS, key=lambda r: (r[0], r[2])):
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} ({name})")


def ts(day, seconds=0):
    """UTC timestamp ``day`` days after 2010-01-01."""
    return datetime(2010, 1, 1, tzinfo=timezone.utc) + timedelta(days=day, seconds=seconds)


def jsonl(*records):
    lines = []
    for kind, bug, author, when in records:
        stamp = when.strftime("%Y-%m-%dT%H:%M:%SZ") if isinstance(when, datetime) else when
        lines.append(f'{{"kind":"{kind}","bug":"{bug}","author":"{author}","ts":"{stamp}"}}')
    return ("\n".join(lines) + "\n").encode()


def make_log(*records):
    return parse_events(io.BytesIO(jsonl(*records)))


@pytest.fixture
def day0():
    return date(2010, 1, 1)
