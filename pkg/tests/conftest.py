import pytest

from scwqkd import kernels
from scwqkd.params import DeviceLosses, LossBudget, SystemParams

BACKENDS = ["numpy", "numba"]


@pytest.fixture
def params():
    return SystemParams()


@pytest.fixture
def device():
    return DeviceLosses()


@pytest.fixture
def unit_losses():
    return LossBudget(1.0, 1.0, 1.0)


@pytest.fixture
def ideal_params():
    # lossless filter, no darks, no backscatter
    return SystemParams(tau=0.0, r=1.0, varrho=0.0, gamma_det=0.0, beta_rs=0.0)


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every kernel call in the package through one backend."""
    impl = kernels.load_backend(request.param)
    for name in ("bessel_table", "modulated_energies", "apply_dead_time", "tally"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    monkeypatch.setattr(kernels, "BACKEND", request.param)
    return request.param


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
