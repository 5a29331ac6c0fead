import math
import re
import sys
import warnings

import pytest

sys.path.insert(0, __import__("os").path.dirname(__file__))

from rydpolaron.params import ModelParams, PhysicalParams  # noqa: E402

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    def order(line):
        num, tag = re.match(r"criterion\s+(\d+)(\w*)", line).groups()
        return int(num), tag

    for line in sorted(ACCEPTANCE_LINES, key=order):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def reference_point():
    """Sweet-spot 87Rb array: alpha 0.1, a = 4 um, omega_ph = 2 pi x 3 kHz."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return PhysicalParams.sweet_spot(0.1, 4e-6, 2 * math.pi * 3e3)


@pytest.fixture(scope="session")
def reference_model(reference_point):
    return ModelParams.from_physical(reference_point, 10, 8)
