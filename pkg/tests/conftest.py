"""Print one pass/fail line per acceptance criterion after the run."""

import re

ACCEPTANCE = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    rows = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            m = ACCEPTANCE.search(getattr(rep, "nodeid", ""))
            if not m:
                continue
            num = int(m.group(1))
            names, ok = rows.get(num, (set(), True))
            names.add(m.group(2))
            rows[num] = (names, ok and status == "passed")
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, (names, ok) in sorted(rows.items()):
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {', '.join(sorted(names))}")
