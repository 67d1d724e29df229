import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

CRITERIA = {
    1: "structural invariants",
    2: "enumeration oracle",
    3: "MCMC correctness",
    4: "metric axioms",
    5: "GH oracle",
    6: "dimension fixture",
    7: "scaling stability",
    8: "GFF normalization",
    9: "LQG mass",
    10: "reproducibility",
}

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


def pytest_runtest_logreport(report):
    k = report.user_properties and dict(report.user_properties).get("criterion")
    if not k:
        return
    ok, notes = _outcomes.get(k, (True, []))
    if report.failed or (report.when == "call" and report.skipped):
        ok = False
    if report.when == "call":
        notes = notes + [f"{n}={v}" for n, v in report.user_properties if n != "criterion"]
    _outcomes[k] = (ok, notes)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        if k not in _outcomes:
            continue
        ok, notes = _outcomes[k]
        line = f"criterion {k:2d} {CRITERIA[k]:<22} {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line)
        for n in notes:
            terminalreporter.write_line(f"    {n}")
