import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

REPO = Path(__file__).resolve().parents[1]

# one line per acceptance criterion, printed at the end of the run
_acceptance = {}
_notes = {}


def masks(max_side=12, min_side=1):
    return st.integers(min_side, max_side).flatmap(
        lambda h: st.integers(min_side, max_side).flatmap(
            lambda w: hnp.arrays(np.bool_, (h, w))))


def mask_pairs(max_side=12, min_side=1):
    return st.tuples(st.integers(min_side, max_side), st.integers(min_side, max_side)).flatmap(
        lambda s: st.tuples(hnp.arrays(np.bool_, s), hnp.arrays(np.bool_, s)))


def random_mask(rng, h, w, density=None):
    if density is None:
        density = rng.uniform(0.1, 0.9)
    return rng.random((h, w)) < density


@pytest.fixture
def note(request):
    """Attach a short remark to this test's line in the acceptance summary."""
    name = request.node.name.split("[")[0]

    def add(text):
        _notes.setdefault(name, []).append(text)

    return add


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        # a parametrized criterion passes only if every case passes
        if _acceptance.get(name, "passed") == "passed":
            _acceptance[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda n: int(n.split("_")[2])):
        outcome = _acceptance[name]
        mark = "PASS" if outcome == "passed" else "FAIL"
        extra = "; ".join(_notes.get(name, []))
        terminalreporter.write_line(f"{mark}  {name}" + (f"  ({extra})" if extra else ""))
