import json
import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from valsem.resolution import build_model, centers_from_json  # noqa: E402

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def example_doc() -> dict:
    return json.loads(resources.files("valsem").joinpath("data", "paper_example.json").read_text())


@pytest.fixture(scope="session")
def example_model():
    return build_model(centers_from_json(example_doc()["centers"]))


@pytest.fixture(scope="session")
def example_marked():
    return tuple(example_doc()["marked"])


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("acceptance")
    if mark is None or call.when != "call":
        return
    n, title = mark.args
    _ACCEPTANCE[n] = (title, "PASS" if call.excinfo is None else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[n]
        terminalreporter.write_line(f"[{status}] {n:2d}. {title}")
