from itertools import permutations

import pytest

from shrinker.audit import (Pruner, Rule, constraint_prunes, enumerate_rules, oracle_implication_reducible,
                            oracle_recall_reducible, oracle_singleton_reducible, oracle_unsat,
                            pigeonholed, random_fact_base, rule, soundness_audit)
from shrinker.discovery import IMPLIES, UNSAT, Property
from shrinker.errors import EnumerationLimitError
from shrinker.facts import FactBase, infer_types, parse_bk
from shrinker.recall import RecallFact
from shrinker.totality import TotalFact

R = {
    1: rule(('len', 'AB')),
    2: rule(('tail', 'AA')),
    3: rule(('tail', 'AB'), ('tail', 'BA')),
    4: rule(('head', 'AB'), ('head', 'AC')),
    5: rule(('tail', 'AB'), ('tail', 'BC'), ('tail', 'AC')),
    6: rule(('tail', 'AA'), ('head', 'AB'), ('odd', 'B')),
    7: rule(('head', 'AB'), ('odd', 'B'), ('even', 'B')),
    8: rule(('head', 'AB'), ('int', 'B'), ('odd', 'B')),
    9: rule(('head', 'AB'), ('succ', 'BC'), ('succ', 'CD'), ('lt', 'BD')),
}


def _key(r):
    nv = len(r.vars)
    return min(tuple(sorted((p, tuple(perm[v] for v in vs)) for p, vs in r.body))
               for perm in permutations(range(nv)))


@pytest.mark.parametrize('n', sorted(R))
def test_enumeration_contains_walkthrough_rules(walk, n):
    r = R[n]
    preds = {p for p, _ in r.body}
    sub = FactBase({p: walk.facts(p) for p in preds})
    repeated = n in (2, 6)
    keys = {_key(x) for x in enumerate_rules(sub, len(r), 4, repeated_vars=repeated)}
    assert _key(r) in keys


def test_enumeration_minimal_and_disconnected():
    fb = parse_bk('p(a).')
    assert [str(r) for r in enumerate_rules(fb, 1, 3)] == ['h <- p(A)']
    fb = parse_bk('p(a). q(b).')
    got = {str(r) for r in enumerate_rules(fb, 2, 2)}
    assert {'h <- p(A), q(A)', 'h <- p(A), q(B)'} <= got


def test_enumeration_no_renaming_duplicates(walk):
    seen = set()
    for r in enumerate_rules(walk, 2, 3):
        k = _key(r)
        assert k not in seen
        seen.add(k)


def test_enumeration_ceiling(walk):
    with pytest.raises(EnumerationLimitError):
        next(enumerate_rules(walk, 4, 4, ceiling=1000))
    with pytest.raises(ValueError):
        next(enumerate_rules(walk, 0, 4))


def test_oracle_unsat(walk):
    assert oracle_unsat(rule(('tail', 'AA')), walk)
    assert not oracle_unsat(rule(('head', 'AB')), walk)
    assert oracle_unsat(rule(('odd', 'A'), ('even', 'A')), walk)


def test_oracle_implication(walk):
    assert oracle_implication_reducible(rule(('len', 'AB'), ('int', 'B'), ('odd', 'B')), walk)
    # head's second argument is a character, so this body has no answers at all
    assert oracle_unsat(R[8], walk) and not oracle_implication_reducible(R[8], walk)
    assert not oracle_implication_reducible(rule(('len', 'AB'), ('len', 'AC')), walk)
    assert not oracle_implication_reducible(rule(('odd', 'A')), walk)


def test_oracle_recall(walk):
    assert oracle_recall_reducible(rule(('succ', 'AB'), ('succ', 'AC')), walk)
    cycle = parse_bk('edge(a,b). edge(b,c). edge(c,a).')
    chain = rule(('edge', 'AB'), ('edge', 'BC'), ('edge', 'CD'), ('edge', 'DE'))
    assert oracle_recall_reducible(chain, cycle) and pigeonholed(chain, cycle)
    assert not oracle_recall_reducible(rule(('succ', 'AB')), walk)
    p3 = parse_bk('p(a,b,c). p(b,a,c). p(c,b,a).')
    r = rule(('p', 'ABC'), ('p', 'ADE'))
    assert oracle_recall_reducible(r, p3) and pigeonholed(r, p3)


def test_oracle_singleton(walk, walk_types):
    assert oracle_singleton_reducible(rule(('len', 'AB'), head='A'), walk, walk_types)
    assert not oracle_singleton_reducible(rule(('len', 'AB'), ('odd', 'B'), head='A'), walk, walk_types)
    assert not oracle_singleton_reducible(rule(('succ', 'AB'), head='A'), walk, walk_types)


def test_constraint_prunes_examples(walk):
    t = ('tail', 2)
    assert constraint_prunes(R[3], {Property(UNSAT, 'ab_ba', (t, t))})
    s, lt = ('succ', 2), ('lt', 2)
    assert constraint_prunes(R[9], {Property(IMPLIES, 'ab_bc_ac', (s, s, lt))})
    assert not any(constraint_prunes(r, set()) for r in R.values())


def test_recall_and_total_matching():
    s = ('succ', 2)
    p = Pruner({RecallFact(s, (0,), (1,), 1)})
    assert p.prunes(rule(('succ', 'BC'), ('succ', 'BD')))
    assert not p.prunes(rule(('succ', 'AB'), ('succ', 'CB')))
    assert not Pruner({RecallFact(s, (0,), (1,), 5)}, recall_cap=3).prunes(
        rule(('succ', 'AB'), ('succ', 'AC')))
    q = Pruner({TotalFact(('len', 2), (0,), (1,))})
    assert q.prunes(rule(('len', 'AB')))
    assert not q.prunes(rule(('len', 'AB'), ('odd', 'B')))
    assert not q.prunes(rule(('len', 'AB'), head='B'))


def test_empty_property_audit(walk):
    rep = soundness_audit(walk, set(), 2, 3)
    assert rep.pruned == 0 and rep.shrinkage == 0 and rep.ok


def test_walkthrough_audit(walk, walk_props, walk_types):
    rep = soundness_audit(walk, walk_props, 3, 4, types=walk_types, repeated_vars=True)
    assert rep.ok and rep.pruned <= rep.total_rules
    pruner = Pruner(walk_props)
    assert all(pruner.prunes(r) for r in R.values())


@pytest.mark.parametrize('seed', range(3))
def test_random_audit(seed):
    from shrinker.discovery import find_unsat_impli
    from shrinker.recall import compute_recalls
    from shrinker.totality import find_total_facts
    fb = random_fact_base(seed, max_arity=2)
    types = infer_types(fb)
    props = find_unsat_impli(fb, max_vars=4, max_batches=10 ** 6)
    props |= compute_recalls(fb) | find_total_facts(fb, types)
    assert soundness_audit(fb, props, 3, 3, types=types).ok


def test_unsat_specialisation_closure(walk, walk_props):
    unsat_only = {p for p in walk_props if p.kind == UNSAT}
    pruner = Pruner(unsat_only)
    for r in enumerate_rules(walk, 2, 3):
        if pruner.prunes(r):
            assert oracle_unsat(r, walk)


def test_random_fact_base_bounds():
    for seed in range(30):
        fb = random_fact_base(seed)
        assert len(fb.predicates) <= 5 and len(fb) <= 50
        assert all(a <= 3 for _, a in fb.predicates) and len(fb.constants()) <= 8
    assert random_fact_base(7) == random_fact_base(7)
