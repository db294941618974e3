from collections import OrderedDict

_outcomes: "OrderedDict[str, list[tuple[str, str]]]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test exercises")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = dict(report.user_properties).get("criterion")
    if label is not None:
        _outcomes.setdefault(label, []).append((report.nodeid.split("::")[-1], report.outcome))


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("criterion", str(marker.args[0])))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_outcomes, key=lambda s: (int("".join(c for c in s if c.isdigit()) or 0), s)):
        results = _outcomes[label]
        failed = [name for name, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {label}: {status} ({len(results) - len(failed)}/{len(results)} checks)"
        if failed:
            line += " failing: " + ", ".join(failed)
        terminalreporter.write_line(line)
