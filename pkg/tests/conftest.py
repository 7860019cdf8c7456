import pytest

from bsvkernels import CrystalSpec, GapSpec, PumpSpec

# BBO ordinary index at 709.4 nm; the pump index is set equal so that
# delta_k carries the collinear mismatch.
N_BBO = 1.66451
# Standard air at 354.7 nm and 709.4 nm.
N_AIR_PUMP = 1.00028574
N_AIR_SIGNAL = 1.00027572


@pytest.fixture
def bbo_spec():
    return CrystalSpec(length=2e-3, delta_k=4530.0, pump_wavelength=354.7e-9,
                       n_pump=N_BBO, n_signal=N_BBO)


@pytest.fixture
def pump170():
    return PumpSpec.from_fwhm(170e-6)


@pytest.fixture
def air_gap():
    return GapSpec(distance=10.66e-3, n_pump_air=N_AIR_PUMP, n_signal_air=N_AIR_SIGNAL)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
