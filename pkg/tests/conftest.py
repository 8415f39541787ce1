import sys
from pathlib import Path

import pytest

from causal_rntn.treebank import parse_bracketed

DATA = Path(__file__).parent / "data"
BRAT = DATA / "brat"

# Reference left and right binarizations of the REQ 1 example sentence.
REQ1_LEFT = ("(1 (13 (14 (11 (6 If) (4 (4 (10 (9 A) (8 (23 is) (23 true))) (23 and)) "
             "(10 (9 B) (8 (23 is) (23 false))))) (3 ,)) (12 (6 then) (10 (9 C) "
             "(8 (23 shall) (23 occur))))) (3 .))")
REQ1_RIGHT = ("(1 (13 (14 (11 (6 If) (4 (10 (9 A) (8 (23 is) (23 true))) (4 (23 and) "
              "(10 (9 B) (8 (23 is) (23 false)))))) (3 ,)) (12 (6 then) (10 (9 C) "
              "(8 (23 shall) (23 occur))))) (3 .))")


@pytest.fixture(scope="session")
def reference_strings():
    return [line.rstrip("\n") for line in (DATA / "reference_trees.txt").read_text().splitlines()]


@pytest.fixture(scope="session")
def reference_trees(reference_strings):
    return [parse_bracketed(s) for s in reference_strings]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
