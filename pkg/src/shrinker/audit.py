"""Brute-force soundness audit of the emitted constraints.

Every rule the constraints would prune is re-checked against the pointlessness
definitions with a plain nested search over the constant pool, sharing no
code with the discovery join. Rules have the fixed head ``h`` with a chosen
variable tuple (empty by default), so rule equivalence means equal sets of
head answers.
"""

import random
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import comb

from .discovery import IMPLIES, UNSAT
from .emit import DEFAULT_RECALL_CAP, recall_emittable
from .errors import EnumerationLimitError
from .facts import FactBase, infer_types

DEFAULT_CEILING = 10 ** 7


@dataclass(frozen=True)
class Rule:
    """``h(head) <- body``; body literals are (pred, var-id tuple) pairs."""
    body: tuple
    head: tuple = ()

    @property
    def vars(self):
        return sorted({v for _, vs in self.body for v in vs} | set(self.head))

    def __len__(self):
        return len(self.body)

    def __str__(self):
        def lit(pred, vs):
            return f'{pred[0]}({",".join(_var_name(v) for v in vs)})'
        head = 'h' + (f'({",".join(_var_name(v) for v in self.head)})' if self.head else '')
        return f'{head} <- ' + ', '.join(lit(p, vs) for p, vs in self.body)


def _var_name(v):
    return chr(ord('A') + v) if v < 26 else f'V{v}'


def rule(*literals, head=()):
    """Build a Rule from ('name', 'AB')-style literals; arity is the string length."""
    body = []
    for name, vs in literals:
        body.append(((name, len(vs)), tuple(ord(c) - ord('A') for c in vs)))
    return Rule(tuple(body), tuple(ord(c) - ord('A') for c in head))


# enumeration

def _literal_table(preds, max_vars, repeated_vars):
    lits = []
    for pred in preds:
        for vs in product(range(max_vars), repeat=pred[1]):
            if repeated_vars or len(set(vs)) == len(vs):
                lits.append((pred, vs))
    lits.sort()
    return lits


def estimate_rules(fb, max_body, max_vars, repeated_vars=False):
    n = len(_literal_table(fb.predicates, max_vars, repeated_vars))
    return sum(comb(n, k) for k in range(1, max_body + 1))


def enumerate_rules(fb, max_body, max_vars, repeated_vars=False, ceiling=DEFAULT_CEILING):
    """Stream every nonempty body up to renaming, smallest first.

    A body is kept when it is the least member of its renaming orbit, so no
    dedup set is needed and the order is fixed by the predicate order.
    Connectivity is not required.
    """
    if max_body < 1 or max_vars < 1:
        raise ValueError('max_body and max_vars must be >= 1')
    lits = _literal_table(fb.predicates, max_vars, repeated_vars)
    estimate = sum(comb(len(lits), k) for k in range(1, max_body + 1))
    if estimate > ceiling:
        raise EnumerationLimitError(
            f'about {estimate} candidate bodies exceeds the ceiling of {ceiling}')
    pos = {lit: i for i, lit in enumerate(lits)}
    maps = []
    for perm in permutations(range(max_vars)):
        if perm == tuple(range(max_vars)):
            continue
        maps.append([pos[(p, tuple(perm[v] for v in vs))] for p, vs in lits])
    for k in range(1, max_body + 1):
        for combo in combinations(range(len(lits)), k):
            used = {v for i in combo for v in lits[i][1]}
            if max(used) + 1 != len(used):
                continue
            if any(tuple(sorted(m[i] for i in combo)) < combo for m in maps):
                continue
            yield Rule(tuple(lits[i] for i in combo))


# brute-force evaluation

def answers(body, fb, variables=None, extra=None):
    """All assignments (tuples over ``variables``) satisfying ``body``.

    Plain backtracking over the constant pool; each literal is checked as soon
    as its last variable is bound. ``extra`` is an optional predicate on the
    complete assignment dict.
    """
    if variables is None:
        variables = sorted({v for _, vs in body for v in vs})
    variables = list(variables)
    pool = sorted(fb.constants())
    order = {v: i for i, v in enumerate(variables)}
    ready = [[] for _ in variables]
    ground = []
    for pred, vs in body:
        facts = fb.factset(pred) if pred in fb else frozenset()
        if vs:
            ready[max(order[v] for v in vs)].append((facts, vs))
        else:
            ground.append((facts, vs))
    if any(() not in facts for facts, _ in ground):
        return set()
    out = set()
    env = {}

    def rec(i):
        if i == len(variables):
            if extra is None or extra(env):
                out.add(tuple(env[v] for v in variables))
            return
        v = variables[i]
        for c in pool:
            env[v] = c
            if all(tuple(env[x] for x in vs) in facts for facts, vs in ready[i]):
                rec(i + 1)
        env.pop(v, None)

    rec(0)
    return out


def _project(rows, variables, keep):
    idx = [variables.index(v) for v in keep]
    return {tuple(r[i] for i in idx) for r in rows}


def _head_answers(body, head, fb, extra=None):
    variables = sorted({v for _, vs in body for v in vs} | set(head))
    return _project(answers(body, fb, variables, extra), variables, head)


# oracles

def oracle_unsat(r, fb):
    return not answers(r.body, fb)


def oracle_implication_reducible(r, fb):
    """Some captured literal can go without changing any body answer."""
    if len(r.body) < 2:
        return False
    full_vars = sorted({v for _, vs in r.body for v in vs})
    full = answers(r.body, fb, full_vars)
    if not full:
        return False
    for i, (_, vs) in enumerate(r.body):
        rest = r.body[:i] + r.body[i + 1:]
        if not set(vs) <= {v for _, ws in rest for v in ws}:
            continue
        if answers(rest, fb, full_vars) == full:
            return True
    return False


def _mgu(a, b):
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for x, y in zip(a, b):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
    return lambda v: find(v)


def _substitute(r, theta):
    body = tuple(sorted({(p, tuple(theta(v) for v in vs)) for p, vs in r.body}))
    return Rule(body, tuple(theta(v) for v in r.head))


def recall_reductions(r):
    """Yield rθ for each pair of same-predicate body literals, θ their mgu."""
    for (i, (p, a)), (j, (q, b)) in combinations(enumerate(r.body), 2):
        if p == q:
            yield _substitute(r, _mgu(a, b))


def oracle_recall_reducible(r, fb):
    """θ-subsumption form: some rθ with fewer literals has the same head answers.

    Unsatisfiable bodies are reported False; they belong to the unsat check.
    """
    base = _head_answers(r.body, r.head, fb)
    if not base and oracle_unsat(r, fb):
        return False
    for reduced in recall_reductions(r):
        if len(reduced.body) < len(r.body) and _head_answers(reduced.body, reduced.head, fb) == base:
            return True
    return False


def pigeonholed(r, fb):
    """Alldiff form: forcing the same-predicate argument tuples apart changes the answers."""
    groups = {}
    for pred, vs in r.body:
        groups.setdefault(pred, set()).add(vs)
    base = _head_answers(r.body, r.head, fb)
    for tuples in groups.values():
        if len(tuples) < 2:
            continue
        pairs = list(combinations(sorted(tuples), 2))

        def alldiff(env, pairs=pairs):
            return all(any(env[x] != env[y] for x, y in zip(s, t)) for s, t in pairs)

        if _head_answers(r.body, r.head, fb, alldiff) != base:
            return True
    return False


def _occurrences(r):
    counts = {}
    for _, vs in r.body:
        for v in vs:
            counts[v] = counts.get(v, 0) + 1
    for v in r.head:
        counts[v] = counts.get(v, 0) + 1
    return counts


def _total_brute(pred, positions, fb, types):
    rows = fb.factset(pred)
    if not positions:
        return bool(rows)
    seen = {tuple(row[i] for i in positions) for row in rows}
    domains = [types.position_domain(pred, i) for i in positions]
    return all(combo in seen for combo in product(*domains))


def oracle_singleton_reducible(r, fb, types):
    """Some literal is total in S and its other variables occur once in the rule."""
    counts = _occurrences(r)
    for pred, vs in r.body:
        if pred not in fb:
            continue
        for k in range(len(set(vs))):
            for s in combinations(sorted(set(vs)), k):
                rest = set(vs) - set(s)
                if any(counts[v] != 1 for v in rest):
                    continue
                positions = tuple(i for i, v in enumerate(vs) if v in s)
                if _total_brute(pred, positions, fb, types):
                    return True
    return False


# constraint matching

def _embeds(pattern, body):
    """Injective literal map from ``pattern`` into ``body`` with a consistent var map."""
    used = [False] * len(body)

    def rec(i, env):
        if i == len(pattern):
            return True
        pred, pvs = pattern[i]
        for j, (q, vs) in enumerate(body):
            if used[j] or q != pred:
                continue
            new = dict(env)
            if all(new.setdefault(a, b) == b for a, b in zip(pvs, vs)):
                used[j] = True
                if rec(i + 1, new):
                    return True
                used[j] = False
        return False

    return rec(0, {})


class Pruner:
    """The emitted constraint set, compiled for matching against rule bodies."""

    def __init__(self, props, recall_cap=DEFAULT_RECALL_CAP, allow_repeated_vars=False):
        self.patterns = {}
        self.recalls = {}
        self.totals = {}
        for p in props:
            if p.kind in (UNSAT, IMPLIES):
                if allow_repeated_vars or not p.has_gated_literal:
                    key = tuple(sorted(p.preds))
                    self.patterns.setdefault(key, []).append((p.kind, p.literals))
            elif p.kind == 'recall':
                if recall_emittable(p, recall_cap):
                    self.recalls.setdefault(p.pred, []).append(p)
            elif p.kind == 'total':
                self.totals.setdefault(p.pred, []).append(p)

    def kinds(self, r):
        """The property kinds whose constraints fire on ``r``."""
        out = set()
        preds = {p for p, _ in r.body}
        for k in range(1, len(r.body) + 1):
            for sub in combinations(r.body, k):
                for kind, lits in self.patterns.get(tuple(sorted(p for p, _ in sub)), ()):
                    if kind not in out and _embeds(lits, sub):
                        out.add(kind)
        for pred in preds & self.recalls.keys():
            lits = [vs for p, vs in r.body if p == pred]
            for f in self.recalls[pred]:
                groups = {}
                for vs in lits:
                    key = tuple(vs[i] for i in f.inputs)
                    groups.setdefault(key, set()).add(tuple(vs[i] for i in f.outputs))
                if any(len(g) > f.bound for g in groups.values()):
                    out.add('recall')
                    break
        if preds & self.totals.keys():
            # singleton as the ASP rule counts it: the number of body literals
            # (plus the head) mentioning the variable
            count = {}
            for _, vs in r.body:
                for v in set(vs):
                    count[v] = count.get(v, 0) + 1
            for v in r.head:
                count[v] = count.get(v, 0) + 1
            for pred, vs in r.body:
                for f in self.totals.get(pred, ()):
                    if all(count[vs[i]] == 1 for i in f.removable):
                        out.add('total')
        return out

    def prunes(self, r):
        return bool(self.kinds(r))


def constraint_prunes(r, props, recall_cap=DEFAULT_RECALL_CAP, allow_repeated_vars=False):
    return Pruner(props, recall_cap, allow_repeated_vars).prunes(r)


# audit

@dataclass
class AuditReport:
    total_rules: int = 0
    pruned: int = 0
    false_prunes: list = field(default_factory=list)
    per_kind: dict = field(default_factory=lambda: {UNSAT: 0, IMPLIES: 0, 'recall': 0, 'total': 0})
    stages: list = field(default_factory=list)

    @property
    def shrinkage(self):
        return self.pruned / self.total_rules if self.total_rules else 0.0

    @property
    def ok(self):
        return not self.false_prunes

    def to_dict(self):
        return {
            'total_rules': self.total_rules,
            'pruned': self.pruned,
            'shrinkage': round(self.shrinkage, 6),
            'per_kind': dict(self.per_kind),
            'stages': self.stages,
            'false_prunes': [str(r) for r in self.false_prunes],
        }

    def summary(self):
        kinds = ', '.join(f'{k} {n}' for k, n in self.per_kind.items())
        return (f'audit: {self.pruned}/{self.total_rules} rules pruned '
                f'({self.shrinkage:.1%}; {kinds}); false prunes: {len(self.false_prunes)}')


STAGE_ORDER = (UNSAT, IMPLIES, 'recall', 'total')


def pointless(r, fb, types, hint=()):
    """True when any of the four oracles holds. ``hint`` kinds are tried first."""
    oracles = {
        UNSAT: lambda: oracle_unsat(r, fb),
        IMPLIES: lambda: oracle_implication_reducible(r, fb),
        'recall': lambda: oracle_recall_reducible(r, fb),
        'total': lambda: oracle_singleton_reducible(r, fb, types),
    }
    order = sorted(STAGE_ORDER, key=lambda k: (k not in hint, k != 'total', STAGE_ORDER.index(k)))
    return any(oracles[k]() for k in order)


def soundness_audit(fb, props, max_body, max_vars, types=None, repeated_vars=False,
                    recall_cap=DEFAULT_RECALL_CAP, allow_repeated_vars=False,
                    ceiling=DEFAULT_CEILING):
    """Enumerate the rule space and re-check every pruned rule with the oracles.

    ``stages`` records the cumulative pruned fraction after adding each
    property kind in turn (unsat, implies, recall, total).
    """
    if types is None:
        types = fb.types or infer_types(fb)
    pruner = Pruner(props, recall_cap, allow_repeated_vars)
    report = AuditReport()
    first_stage = {k: 0 for k in STAGE_ORDER}
    for r in enumerate_rules(fb, max_body, max_vars, repeated_vars, ceiling):
        report.total_rules += 1
        kinds = pruner.kinds(r)
        if not kinds:
            continue
        report.pruned += 1
        for k in kinds:
            report.per_kind[k] += 1
        first_stage[min(kinds, key=STAGE_ORDER.index)] += 1
        if not pointless(r, fb, types, kinds):
            report.false_prunes.append(r)
    running = 0
    for k in STAGE_ORDER:
        running += first_stage[k]
        report.stages.append({
            'kind': k,
            'marginal': first_stage[k],
            'cumulative_fraction': round(running / report.total_rules, 6) if report.total_rules else 0.0,
        })
    return report


def random_fact_base(seed, max_preds=5, max_arity=3, max_facts=50, pool=8):
    """A small seeded fact base over constants c0..c{pool-1}."""
    rng = random.Random(seed)
    consts = [f'c{i}' for i in range(rng.randint(2, pool))]
    n_preds = rng.randint(1, max_preds)
    budget = max_facts
    facts = {}
    for k in range(n_preds):
        arity = rng.randint(1, max_arity)
        share = max(1, budget // (n_preds - k))
        n = rng.randint(1, max(1, min(share, budget)))
        rows = {tuple(rng.choice(consts) for _ in range(arity)) for _ in range(n)}
        budget -= len(rows)
        facts[(f'p{k}', arity)] = rows
        if budget <= 0:
            break
    return FactBase(facts)
