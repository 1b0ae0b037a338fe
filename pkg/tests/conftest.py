from __future__ import annotations

import csv
from pathlib import Path

import pytest

from divkit import Token, build_tree, read_corpus

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def fixture_a():
    return read_corpus(DATA / "fixture_a.txt")


@pytest.fixture(scope="session")
def fixture_b():
    return read_corpus(DATA / "fixture_b.txt")


@pytest.fixture(scope="session")
def causative():
    return read_corpus(DATA / "causative.txt")


@pytest.fixture(scope="session")
def manifest_a() -> dict[str, dict[str, int]]:
    with open(DATA / "fixture_a.manifest.tsv", encoding="utf-8") as fh:
        return {
            row["id"]: {k: int(v) for k, v in row.items() if k != "id"}
            for row in csv.DictReader(fh, delimiter="\t")
        }


# h=1 i=2 j=3 k=4 l=5 m=6 n=7 o=8 p=9
REF_TREE_NAMES = "hijklmnop"
REF_TREE_HEADS = {"h": None, "i": "h", "j": "h", "k": "h", "l": "j", "m": "j", "n": "j", "o": "l", "p": "l"}


@pytest.fixture
def ref_tree():
    idx = {name: k + 1 for k, name in enumerate(REF_TREE_NAMES)}
    tokens = [Token(idx[n], n, "X") for n in REF_TREE_NAMES]
    heads = {idx[c]: (0 if h is None else idx[h]) for c, h in REF_TREE_HEADS.items()}
    return build_tree(tokens, heads), idx


_ACCEPTANCE: list[str] = []


class Criterion:
    def __init__(self) -> None:
        self.number = 0
        self.title = ""
        self.detail = ""

    def __call__(self, number: int, title: str) -> "Criterion":
        self.number, self.title = number, title
        return self


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    c = Criterion()
    yield c
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    line = f"criterion {c.number} {status}: {c.title}" + (f" ({c.detail})" if c.detail else "")
    _ACCEPTANCE.append(line)
    print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
