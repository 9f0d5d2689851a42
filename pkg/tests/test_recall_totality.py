from collections import defaultdict
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from shrinker.audit import random_fact_base
from shrinker.errors import EmptyDomainError
from shrinker.facts import FactBase, TypeAssignment, infer_types, parse_bk, parse_types
from shrinker.recall import RecallFact, compute_recalls
from shrinker.totality import TotalFact, check_total, find_total_facts


def bound(recalls, pred, inputs):
    return next(f.bound for f in recalls if f.pred == pred and f.inputs == inputs)


def test_recall_table(recall_bk):
    r = compute_recalls(recall_bk)
    p, q = ('p', 2), ('q', 3)
    assert bound(r, p, ()) == 3
    assert bound(r, p, (0,)) == 1
    assert bound(r, q, (0,)) == 1
    assert bound(r, q, (1, 2)) == 2
    # derived: constant 1 has two first arguments in p
    assert bound(r, p, (1,)) == 2
    assert len([f for f in r if f.pred == q]) == 7


def test_recall_names():
    p, q = ('p', 2), ('q', 3)
    assert RecallFact(p, (0,), (1,), 1).fact_name == 'recall_p_a_b_1'
    assert RecallFact(p, (1,), (0,), 1).fact_name == 'recall_p_b_a_1'
    assert RecallFact(q, (1, 2), (0,), 2).fact_name == 'recall_q_bc_a_2'
    assert RecallFact(p, (), (0, 1), 3).fact_name == 'recall_p__ab_3'
    assert RecallFact(q, (1, 2), (0,), 2).mode == 'q(-,+,+)'


def test_walkthrough_succ(walk):
    r = compute_recalls(walk)
    assert (bound(r, ('succ', 2), ()), bound(r, ('succ', 2), (0,)), bound(r, ('succ', 2), (1,))) == (3, 1, 1)


def test_single_fact_all_one():
    assert {f.bound for f in compute_recalls(parse_bk('r(a,b,c).'))} == {1}


def test_arity_guard():
    with pytest.raises(ValueError):
        compute_recalls(parse_bk('w(a,a,a,a,a,a,a,a,a).'))


def _naive_bound(rows, s):
    keys = {tuple(r[i] for i in s) for r in rows}
    return max(len({tuple(r[i] for i in range(len(r)) if i not in s) for r in rows
                    if tuple(r[i] for i in s) == k}) for k in keys)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_recall_properties(seed):
    fb = random_fact_base(seed)
    recalls = compute_recalls(fb)
    by = {(f.pred, f.inputs): f.bound for f in recalls}
    for pred in fb.predicates:
        rows = fb.facts(pred)
        for (p, s), b in by.items():
            if p != pred:
                continue
            assert b == _naive_bound(rows, s)
            for t, b2 in by.items():
                if t[0] == pred and set(s) <= set(t[1]):
                    assert b >= b2
    # adding a fact never lowers a bound
    pred = fb.predicates[0]
    extra = FactBase({**{p: fb.facts(p) for p in fb.predicates},
                      pred: list(fb.facts(pred)) + [('zz',) * pred[1]]})
    for f in compute_recalls(extra):
        assert f.bound >= by[(f.pred, f.inputs)]


LEN = ('len', 2)


def test_len_total(walk, walk_types):
    assert check_total(LEN, (0,), walk, walk_types) == (True, None)
    assert TotalFact(LEN, (0,), (1,)) in find_total_facts(walk, walk_types)


def test_succ_partial(walk, walk_types):
    # num domain is 1..5; 4 and 5 both lack a successor, 4 comes first
    assert check_total(('succ', 2), (0,), walk, walk_types) == (False, ('4',))


def test_walkthrough_totals(walk, walk_types):
    names = sorted(f.fact_name for f in find_total_facts(walk, walk_types))
    assert names == ['total_head_a', 'total_len_a', 'total_len_b']


def test_add_table_names():
    # addition over 0..3 without overflow: each single argument is total, no pair is
    dom = range(4)
    fb = parse_bk(' '.join(f'add({a},{b},{a + b}).' for a, b in product(dom, dom) if a + b < 4))
    names = sorted(f.fact_name for f in find_total_facts(fb, infer_types(fb)))
    assert names == ['total_add_ab', 'total_add_ac', 'total_add_bc']


def test_length_name():
    fb = parse_bk('length(l1,1). length(l2,2). length(l3,2). num(3).')
    types = infer_types(fb, parse_types('type(length,1,list). type(length,2,int). type(num,1,int).'))
    assert [f.fact_name for f in find_total_facts(fb, types)] == ['total_length_b']


def test_fully_partial():
    fb = parse_bk('r(a,b). r(b,a).')
    # one shared type {a,b}; r(a,_) and r(b,_) exist so S={1} is total here
    assert find_total_facts(fb, infer_types(fb))
    fb = parse_bk('r(a,x). s(b,y).  r2(c,z).')
    types = TypeAssignment({(('r', 2), 0): 't', (('r', 2), 1): 'u', (('s', 2), 0): 't',
                            (('s', 2), 1): 'u', (('r2', 2), 0): 't', (('r2', 2), 1): 'u'},
                           {'t': frozenset('abc'), 'u': frozenset('xyz')})
    assert find_total_facts(fb, types) == set()


def test_empty_domain_error():
    fb = parse_bk('r(a,b).')
    types = TypeAssignment({(('r', 2), 0): 't', (('r', 2), 1): 'u'},
                           {'t': frozenset(), 'u': frozenset('b')})
    with pytest.raises(EmptyDomainError):
        check_total(('r', 2), (0,), fb, types)
    with pytest.raises(ValueError):
        check_total(('r', 2), (0, 1), fb, types)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_totality_properties(seed):
    fb = random_fact_base(seed, pool=4)
    types = infer_types(fb)
    recalls = {(f.pred, f.inputs): f for f in compute_recalls(fb)}
    for f in find_total_facts(fb, types):
        doms = [types.position_domain(f.pred, i) for i in f.total_positions]
        seen = {tuple(r[i] for i in f.total_positions) for r in fb.facts(f.pred)}
        assert all(c in seen for c in product(*doms))
        # every nonempty subset of a total set is total
        for k in range(1, len(f.total_positions)):
            for sub in combinations(f.total_positions, k):
                assert check_total(f.pred, sub, fb, types)[0]
        # consistent with recall: each key of the product has at least one answer
        assert len(fb.index(f.pred, f.total_positions)) == len(list(product(*doms)))
        assert recalls[(f.pred, f.total_positions)].bound >= 1
