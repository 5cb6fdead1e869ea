import pytest
from hypothesis import HealthCheck, settings

from fatlocus import linalg
from fatlocus.loci import fat_span

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=linalg.available_backends())
def each_backend(request):
    """Run a test once per available elimination kernel."""
    before = linalg.backend()
    linalg.use_backend(request.param)
    fat_span.cache_clear()
    yield request.param
    linalg.use_backend(before)
    fat_span.cache_clear()


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
