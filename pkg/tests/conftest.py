import pytest
from hypothesis import HealthCheck, settings

from conslab.flux import make_flux_pair

settings.register_profile("lab", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


@pytest.fixture(scope="session")
def burgers():
    return make_flux_pair("burgers", (-1.0, 1.0))


@pytest.fixture(scope="session")
def wide_burgers():
    return make_flux_pair("burgers", (-2.0, 2.0))


@pytest.fixture(scope="session")
def ph_linear():
    """Efficiency Phi(u) = 1 + u, no attrition."""
    return make_flux_pair("ph", (0.0, 1.0), phi_coeffs=[1.0, 1.0], mu=0.0)


# ---- acceptance summary -------------------------------------------------------

ACCEPTANCE = {}


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    A criterion whose test raises before reaching its verdict is recorded as
    a failure, so every criterion appears in the summary exactly once.
    """
    key = {}

    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        key["n"] = number
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE[number] = line
        print(line)
        return passed

    yield record
    number = getattr(request.node.function, "criterion", None)
    if number is not None and number not in ACCEPTANCE:
        ACCEPTANCE[number] = f"criterion {number:2d} FAIL  {request.node.name} raised before its verdict"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
