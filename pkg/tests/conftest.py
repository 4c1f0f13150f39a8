import pytest

from dalikit.pdf_lite import make_fixture_pdf
from dalikit.tiff_codec import make_fixture_tiff

FIXED_DATETIME = "2010:11:04 10:00:00"

_acceptance: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when not in ("setup", "call"):
        return
    number, title = marker.args
    row = _acceptance.setdefault(number, {"title": title, "ok": True, "ran": False})
    if call.when == "call":
        row["ran"] = True
    if call.excinfo is not None:
        row["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        row = _acceptance[number]
        status = "PASS" if row["ok"] and row["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status}  {row['title']}")


@pytest.fixture
def bilevel_tiff() -> bytes:
    return make_fixture_tiff(8, 8, "bilevel")


@pytest.fixture
def rgb_tiff() -> bytes:
    return make_fixture_tiff(8, 8, "rgb", "dalikit", FIXED_DATETIME)


@pytest.fixture
def small_pdf() -> bytes:
    return make_fixture_pdf("100,000 Euros", "chimera-forge")
