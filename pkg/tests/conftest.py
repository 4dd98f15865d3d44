import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from colortrap.lut_engine import build_luts
from colortrap.raster_io import RasterPage

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def luts():
    return build_luts()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def flat_pair_page(w=24, h=20, left=(0, 255, 255, 0), right=(0, 0, 0, 255), split=None):
    """Two flat fills meeting at a vertical edge."""
    data = np.zeros((h, w, 4), dtype=np.uint8)
    s = w // 2 if split is None else split
    data[:, :s] = left
    data[:, s:] = right
    return RasterPage(data)


# --- acceptance summary: one PASS/FAIL line per criterion --------------------

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    entry = _CRITERIA.setdefault(mark.args[0], {"ok": True, "detail": []})
    entry["ok"] &= rep.passed
    entry["detail"] += [v for k, v in rep.user_properties if k == "detail" and v not in entry["detail"]]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        detail = "; ".join(e["detail"])
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if e['ok'] else 'FAIL'}" + (f"  ({detail})" if detail else ""))
