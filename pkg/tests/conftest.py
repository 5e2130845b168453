import pytest

from pmicsim import SlitAperture, WellConfig, slit_coefficients, symmetric_grid


@pytest.fixture(scope="session")
def well():
    return WellConfig(L=1.0, hbar_over_m=1.0, t_measure=0.0)


@pytest.fixture(scope="session")
def slit():
    return SlitAperture(0.245, 0.01)


@pytest.fixture(scope="session")
def coeffs50k(well, slit):
    return slit_coefficients(well, slit, 50000)


@pytest.fixture(scope="session")
def coeffs5k(well, slit):
    return slit_coefficients(well, slit, 5000)


@pytest.fixture(scope="session")
def grid4096():
    return symmetric_grid(1.0, 4096)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion; printed now and in the run summary."""

    def record(number, name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2} {name}: {detail}"
        print(line)
        _ACCEPTANCE.append((number, line))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
