import os
import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=15, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# -- acceptance criteria report

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, limit, title): acceptance criterion with a runtime limit in seconds")


def _entry(item):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return None
    number, limit, title = mark.args
    return _criteria.setdefault(number, {"limit": limit, "title": title, "elapsed": 0.0, "failed": [], "known": []})


@pytest.fixture(autouse=True)
def criterion_limit(request):
    """Fails a criterion test that runs past its limit."""
    entry = _entry(request.node)
    start = time.perf_counter()
    yield
    if entry is not None:
        elapsed = time.perf_counter() - start
        assert elapsed < entry["limit"], f"took {elapsed:.1f} s, limit {entry['limit']} s"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    entry = _entry(item)
    if entry is None:
        return
    if rep.when == "call":
        entry["elapsed"] += rep.duration
    if hasattr(rep, "wasxfail"):
        entry["known"].append(item.name)
    elif rep.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        ok = not e["failed"] and not e["known"] and e["elapsed"] < e["limit"]
        note = ""
        if e["failed"]:
            note = "  failed: " + ", ".join(e["failed"])
        elif e["known"]:
            note = "  known failure (xfail): " + ", ".join(e["known"])
        terminalreporter.write_line(f"criterion {number:>2}  {'PASS' if ok else 'FAIL'}  "
                                    f"{e['elapsed']:6.1f} s (limit {e['limit']} s)  {e['title']}{note}")
