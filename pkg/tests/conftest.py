
import pytest


@pytest.fixture
def fixture_override(tmp_path, monkeypatch):
    """Point the fixture directory at an empty temporary directory."""
    monkeypatch.setenv("TRACTORLAB_FIXTURES", str(tmp_path))
    return tmp_path


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
