import pytest

_RESULTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")


@pytest.fixture
def record(request):
    """Attach a one-line detail string to the running acceptance test."""
    def _record(detail: str) -> None:
        request.node.acceptance_detail = detail
    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    entry = _RESULTS.setdefault(number, {"title": title, "ok": True, "detail": ""})
    entry["ok"] = entry["ok"] and rep.passed
    entry["detail"] = getattr(item, "acceptance_detail", "") or entry["detail"]
    if rep.failed and not entry["detail"]:
        entry["detail"] = str(rep.longrepr).strip().splitlines()[-1][:120]


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        e = _RESULTS[number]
        status = "PASS" if e["ok"] else "FAIL"
        line = f"criterion {number} [{status}] {e['title']}"
        if e["detail"]:
            line += f" -- {e['detail']}"
        terminalreporter.write_line(line)
