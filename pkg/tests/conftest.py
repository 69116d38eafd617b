import numpy as np
import pytest

from gonodyn import HemophiliaParams, random_params

CRITERIA = {
    1: "W0 interior fixed points have residual <= 1e-12",
    2: "closed-form fixed points II/III/IV have residual <= 1e-12",
    3: "J(t) t = 2 W(t) within 1e-12 relative",
    4: "0 and 2 in the spectrum at nonzero fixed points",
    5: "closed-form lambda3,4 match the eigensolver; classical (2,0,2,0) spectrum",
    6: "form II class along the c1 sweep follows the sign of b4 c1 - a2 (a1 - b2)",
    7: "states with sum <= 3.9 reach the origin within 60 steps",
    8: "reproduction max > 1 blows up within 60 steps; general criterion agrees",
    9: "every non-Unknown prediction agrees with simulation",
    10: "axis closed forms equal direct iteration",
    11: "set mappings W(O), W(N), W(N0), W(N1), W(Q_a), W(I)",
    12: "analytic Jacobian matches central differences",
}

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when not in ("setup", "call"):
        return
    n = marker.args[0]
    if report.when == "call" or report.failed:
        previous = _results.get(n, True)
        _results[n] = previous and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        if n not in _results:
            continue
        status = "PASS" if _results[n] else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {CRITERIA[n]}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def classical():
    from gonodyn import preset
    return preset("classical")


@pytest.fixture
def w0():
    from gonodyn import preset
    return preset("w0")


def draw_params(rng, n, **fixed) -> list[HemophiliaParams]:
    return [random_params(rng, **fixed) for _ in range(n)]
