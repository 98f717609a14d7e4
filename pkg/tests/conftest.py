import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid, outcome in sorted(_acceptance_outcomes.items()):
        name = nodeid.split("::")[-1]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def appendix_b():
    from triaffect.model import load_bundled_dataset

    return load_bundled_dataset("appendix_b")


@pytest.fixture(scope="session")
def figure1():
    from triaffect.model import load_bundled_dataset

    return load_bundled_dataset("figure1_series")


@pytest.fixture(scope="session")
def table6():
    from triaffect.model import load_bundled_dataset

    return load_bundled_dataset("table6_counts")


@pytest.fixture(scope="session")
def bundled_table(appendix_b):
    from triaffect.pipeline import table_from_records

    return table_from_records(appendix_b, {"segments": "bundled:appendix_b"})


@pytest.fixture(scope="session")
def table2_records():
    from triaffect.model import CorpusEmotion, SegmentAnnotation

    doc = json.loads((DATA / "table2_fixture.json").read_text(encoding="utf-8"))
    return [
        (CorpusEmotion(entry["gt"]), SegmentAnnotation.from_dict(entry["annotation"]))
        for entry in doc
    ]
