import pytest
from hypothesis import settings

from sylowgl import kernels

settings.register_profile("sylowgl", derandomize=True, deadline=None, max_examples=200)
settings.load_profile("sylowgl")

CRITERIA = {
    1: "group orders against closed forms",
    2: "top kernels elementary abelian; theta an isomorphism",
    3: "kernels non-abelian from n = 3; K_2 abelian",
    4: "kernels powerful; p-th roots of the top kernel",
    5: "Omega-extendability witnesses",
    6: "d(K_n), d(L_n), Omega_1, graded-model dimensions",
    7: "Jordan type and E2 tables independent of n",
    8: "centric-radical classification and out-orders",
    9: "subgroup class counts 20 / 97 / 282",
    10: "randomized property suites",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion n")
    config._acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        n = mark.args[0]
        prev = item.config._acceptance.get(n, True)
        item.config._acceptance[n] = prev and rep.passed


def pytest_terminal_summary(terminalreporter, config):
    res = config._acceptance
    if not res:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(res):
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if res[n] else 'FAIL'}  {CRITERIA.get(n, '')}")


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    before = kernels.BACKEND
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(before)
