from pathlib import Path

import pytest

from shrinker.discovery import find_unsat_impli
from shrinker.facts import infer_types, parse_bk, parse_types
from shrinker.recall import compute_recalls
from shrinker.totality import find_total_facts

DATA = Path(__file__).parent / 'data'

RECALL_BK = 'p(1,2). p(2,1). p(3,1).\nq(p1,a,b). q(p2,b,c). q(p3,a,b). q(p4,b,c).\n'


@pytest.fixture(scope='session')
def walk_types():
    fb = parse_bk((DATA / 'walkthrough.pl').read_text())
    return infer_types(fb, parse_types((DATA / 'walkthrough_types.pl').read_text()))


@pytest.fixture(scope='session')
def walk(walk_types):
    return parse_bk((DATA / 'walkthrough.pl').read_text()).with_types(walk_types)


@pytest.fixture(scope='session')
def walk_props(walk, walk_types):
    props = find_unsat_impli(walk, max_batches=10 ** 6)
    return props | compute_recalls(walk) | find_total_facts(walk, walk_types)


@pytest.fixture(scope='session')
def recall_bk():
    return parse_bk(RECALL_BK)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section('acceptance criteria')
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
