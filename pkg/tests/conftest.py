import pytest

_OUTCOMES: dict[int, list[tuple[str, str]]] = {}
_TITLES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            number, title = mark.args
            _TITLES[number] = title
            item.user_properties.append(("criterion", number))


def pytest_runtest_logreport(report):
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _OUTCOMES.setdefault(number, []).append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _TITLES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_TITLES):
        results = _OUTCOMES.get(number, [])
        ok = bool(results) and all(outcome == "passed" for _, outcome in results)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {_TITLES[number]}")
