import pytest

from kontext import _core, _kernels_py

BACKENDS = ["python"] + (["cython"] if _core.search_compiled is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available search kernel."""
    if request.param == "python":
        monkeypatch.setattr(_core, "search", _kernels_py.search)
        monkeypatch.setattr(_core, "count", _kernels_py.count)
    else:
        monkeypatch.setattr(_core, "search", _core.search_compiled)
        monkeypatch.setattr(_core, "count", _core.count_compiled)
    return request.param


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
