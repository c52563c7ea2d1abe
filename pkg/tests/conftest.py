import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stratan.frontend import parse  # noqa: E402
from stratan.linear import parse_constraint  # noqa: E402
from stratan.polyhedra import Polyhedron  # noqa: E402

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


def poly(*cs, dims=("i", "j")):
    return Polyhedron.from_constraints([parse_constraint(c) for c in cs], dims)


def load(name: str):
    path = PROGRAMS / name
    return parse(path.read_text(), name=path.stem)


@pytest.fixture
def listing1():
    return load("listing1.whl")


@pytest.fixture
def listing2():
    return load("listing2.whl")


@pytest.fixture
def listing3():
    return load("listing3.whl")


@pytest.fixture
def restriction_program():
    return load("restriction.whl")


def corpus_names():
    bundled = ["listing1.whl", "listing2.whl", "listing3.whl", "restriction.whl"]
    return bundled + sorted("corpus/" + p.name for p in (PROGRAMS / "corpus").glob("*.whl"))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
