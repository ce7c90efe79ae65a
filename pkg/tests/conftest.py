import sys

import pytest
from hypothesis import HealthCheck, settings

from solgeom import kernel

settings.register_profile(
    "solgeom", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("solgeom")


@pytest.fixture(params=kernel.available_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    previous = kernel.use_backend(request.param)
    yield request.param
    kernel.use_backend(previous)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, *_ in mod.CRITERIA:
        if cid in mod.RESULTS:
            terminalreporter.write_line(mod.RESULTS[cid])
