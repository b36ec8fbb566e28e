import pytest

ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")
    parser.addoption("--runextended", action="store_true", default=False,
                     help="run hours-scale acceptance checks")


def pytest_collection_modifyitems(config, items):
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    skip_ext = pytest.mark.skip(reason="needs --runextended")
    for item in items:
        if "extended" in item.keywords and not config.getoption("--runextended"):
            item.add_marker(skip_ext)
        elif "slow" in item.keywords and not (config.getoption("--runslow") or config.getoption("--runextended")):
            item.add_marker(skip_slow)


@pytest.fixture
def acceptance():
    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_runtest_logreport(report):
    if report.skipped and "test_acceptance" in report.nodeid and report.when == "setup":
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else "skipped"
        ACCEPTANCE_LINES.append(f"SKIP  {report.nodeid.split('::')[-1]}  ({reason})")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
