from __future__ import annotations

from collections import defaultdict

import pytest

from lrmlab.codes import build_five_one_three, build_gross, build_steane, build_toric

_CRITERIA: dict[int, dict] = defaultdict(lambda: {"title": "", "outcomes": []})


@pytest.fixture(scope="session")
def gross():
    return build_gross()


@pytest.fixture(scope="session")
def toric2():
    return build_toric(2, 2)


@pytest.fixture(scope="session")
def toric3():
    return build_toric(3, 2)


@pytest.fixture(scope="session")
def five():
    return build_five_one_three()


@pytest.fixture(scope="session")
def steane():
    return build_steane()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA[number]
    entry["title"] = title
    if rep.when == "call" or (rep.when == "setup" and (rep.failed or rep.skipped)):
        reason = ""
        if rep.skipped and isinstance(rep.longrepr, tuple):
            reason = rep.longrepr[2]
        entry["outcomes"].append((item.name, rep.outcome, reason))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = entry["outcomes"]
        failed = [name for name, o, _ in outcomes if o == "failed"]
        skipped = [(name, why) for name, o, why in outcomes if o == "skipped"]
        status = "FAIL" if failed else ("PARTIAL" if skipped else "PASS")
        line = f"criterion {number:2d} {status}: {entry['title']}"
        if failed:
            line += f" (failed: {', '.join(failed)})"
        if skipped:
            line += " (skipped: " + "; ".join(f"{n}: {w}" for n, w in skipped) + ")"
        tr.write_line(line)
