import warnings

import pytest

from bhwqed.core import RegimeWarning

_AC_RESULTS = {}
_AC_TITLES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    ac_id, title = mark.args
    _AC_TITLES[ac_id] = title
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        prev = _AC_RESULTS.get(ac_id, True)
        _AC_RESULTS[ac_id] = prev and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ac_id in sorted(_AC_RESULTS, key=lambda s: int(s[2:])):
        verdict = "PASS" if _AC_RESULTS[ac_id] else "FAIL"
        terminalreporter.write_line(f"{ac_id:>5} {verdict}  {_AC_TITLES[ac_id]}")


@pytest.fixture(autouse=True)
def _quiet_regime():
    # the reference parameter sets sit below the omega_c >> J comfort zone
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        yield
