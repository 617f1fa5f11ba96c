import pytest

from rbsp import ChannelParams, DecoyProtocol, HeraldingDetector, HSPSSource, WCPSource

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def channel():
    return ChannelParams()


@pytest.fixture
def protocol():
    return DecoyProtocol()


@pytest.fixture
def detector():
    return HeraldingDetector(stages=2, efficiency=0.85, dark_rate=1e-8)


@pytest.fixture
def wcp():
    return WCPSource(0.625)


@pytest.fixture
def hsps(detector):
    return HSPSSource(0.605, detector)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
