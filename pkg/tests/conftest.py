"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_criteria: dict = {}
_nodes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            num, title = m.args
            _nodes[item.nodeid] = num
            entry = _criteria.setdefault(num, {"title": title, "failed": False, "ran": 0, "seconds": 0.0})


def pytest_runtest_logreport(report):
    num = _nodes.get(report.nodeid)
    if num is None:
        return
    entry = _criteria[num]
    if report.failed:
        entry["failed"] = True
    if report.when == "call":
        entry["ran"] += 1
        entry["seconds"] += report.duration
        if report.skipped:
            entry["failed"] = True


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        ok = e["ran"] > 0 and not e["failed"]
        terminalreporter.write_line(
            f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {e['title']}  ({e['seconds']:.2f} s)")
