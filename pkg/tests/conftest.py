"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion.

Tests in ``test_acceptance.py`` carry ``@pytest.mark.criterion("<id>", "<text>")``.
A criterion passes when every test tagged with it passes.  An expected
failure (``xfail``) counts as FAIL: it marks a requirement measured and not met.
"""

import pytest

_RESULTS: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, text): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, text = marker.args
    entry = _RESULTS.setdefault(cid, {"text": text, "outcomes": []})
    if report.when == "call":
        if hasattr(report, "wasxfail"):
            entry["outcomes"].append(("xfail", item.name))
        else:
            entry["outcomes"].append((report.outcome, item.name))
    elif report.failed or report.skipped:
        entry["outcomes"].append((report.outcome, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS, key=_sort_key):
        entry = _RESULTS[cid]
        outcomes = entry["outcomes"]
        ok = bool(outcomes) and all(o == "passed" for o, _ in outcomes)
        line = f"{'PASS' if ok else 'FAIL'}  {cid:<5} {entry['text']}"
        bad = [name for o, name in outcomes if o != "passed"]
        if bad:
            line += f"  [not met: {', '.join(bad)}]"
        terminalreporter.write_line(line)


def _sort_key(cid):
    head = cid.rstrip("abcdefghijklmnopqrstuvwxyz")
    return (cid[0], int(head[1:]) if head[1:].isdigit() else 0, cid)
