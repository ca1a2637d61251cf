import pytest

from equiframe import _accel


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    if request.param == "numba":
        if not _accel.HAVE_NUMBA:
            pytest.skip("numba not installed")
        monkeypatch.delenv("EQUIFRAME_DISABLE_JIT", raising=False)
    else:
        monkeypatch.setenv("EQUIFRAME_DISABLE_JIT", "1")
    assert _accel.backend_name() == request.param
    return request.param


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance  # noqa: PLC0415

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
