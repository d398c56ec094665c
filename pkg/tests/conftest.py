import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, text)`` then assert as usual."""
    entry = {"nodeid": request.node.nodeid, "id": None, "text": ""}

    def record(number, text):
        entry["id"], entry["text"] = number, text

    _ACCEPTANCE.append(entry)
    yield record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        for e in _ACCEPTANCE:
            if e["nodeid"] == item.nodeid:
                e["passed"] = rep.passed


def pytest_terminal_summary(terminalreporter):
    done = [e for e in _ACCEPTANCE if e["id"] is not None and "passed" in e]
    if not done:
        return
    terminalreporter.section("acceptance criteria")
    for e in sorted(done, key=lambda e: e["id"]):
        status = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {e['id']:>2}: {e['text']}")
