"""Unsatisfiable and implication-reducible template instances.

Each check is a conjunctive query over the fact base under the closed-world
assumption: satisfiability is an existential join, implication is the absence
of a premise solution that falsifies the implied literal.
"""

import logging
import time
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .errors import UnknownPredicateError
from .templates import (LETTERS, SLOT_NAMES, Template, best_order, build_templates,
                        has_repeated_var, is_reflexive_style, select_templates, instances,
                        shape_name)

log = logging.getLogger(__name__)

UNSAT = 'unsat'
IMPLIES = 'implies'


def parse_shape(shape):
    return tuple(tuple(LETTERS.index(ch) for ch in part) for part in shape.split('_'))


@dataclass(frozen=True, order=True)
class Property:
    """An unsatisfiable or implication-reducible instance, in canonical form.

    ``preds`` lists one (name, arity) per literal of ``shape``; for implications
    the implied literal comes last.
    """
    kind: str
    shape: str
    preds: tuple

    @property
    def template(self):
        return Template(parse_shape(self.shape))

    @property
    def literals(self):
        return tuple(zip(self.preds, parse_shape(self.shape)))

    @property
    def implied_index(self):
        return len(self.preds) - 1 if self.kind == IMPLIES else None

    @property
    def fact_name(self):
        return f'{self.kind}_{self.shape}'

    @property
    def fact(self):
        return f'{self.fact_name}({",".join(p[0] for p in self.preds)}).'

    @property
    def has_gated_literal(self):
        """Repeated variables other than the all-same P(A,A) form."""
        return any(has_repeated_var(vs) and not is_reflexive_style(vs)
                   for vs in parse_shape(self.shape))

    def __str__(self):
        return self.fact[:-1]


def unsat_property(literals):
    """Canonical Unsat property for a list of (pred, vars) literals."""
    return _unsat_property(tuple(literals))


@lru_cache(maxsize=1 << 16)
def _unsat_property(literals):
    preds = [p for p, _ in literals]
    order, renamed = best_order([vs for _, vs in literals], labels=preds)
    return Property(UNSAT, shape_name(renamed), tuple(preds[i] for i in order))


def implies_property(literals, implied_index):
    lits = [l for i, l in enumerate(literals) if i != implied_index] + [literals[implied_index]]
    preds = [p for p, _ in lits]
    order, renamed = best_order([vs for _, vs in lits], labels=preds, fix_last=True)
    return Property(IMPLIES, shape_name(renamed), tuple(preds[i] for i in order))


def solutions(literals, fb, binding=None):
    """Yield every assignment of variables satisfying all literals.

    Index-driven nested join; the next literal is always the one with the
    fewest candidate tuples under the current binding.
    """
    for pred, _ in literals:
        if pred not in fb:
            raise UnknownPredicateError(f'unknown predicate {pred[0]}/{pred[1]}')
    binding = dict(binding or {})

    def candidates(lit):
        pred, vs = lit
        key_pos = tuple(i for i, v in enumerate(vs) if v in binding)
        key = tuple(binding[vs[i]] for i in key_pos)
        return key_pos, fb.index(pred, key_pos).get(key, ())

    def rec(remaining):
        if not remaining:
            yield dict(binding)
            return
        best = None
        for j, lit in enumerate(remaining):
            key_pos, cands = candidates(lit)
            if not cands:
                return
            if best is None or len(cands) < len(best[2]):
                best = (j, key_pos, cands)
        j, key_pos, cands = best
        vs = remaining[j][1]
        rest = remaining[:j] + remaining[j + 1:]
        free = [i for i in range(len(vs)) if i not in key_pos]
        for vals in cands:
            new = {}
            for i, c in zip(free, vals):
                v = vs[i]
                if new.setdefault(v, c) != c:
                    break
            else:
                binding.update(new)
                yield from rec(rest)
                for v in new:
                    del binding[v]

    yield from rec(list(literals))


def check_satisfiable(instance, fb):
    """Return (satisfiable, witness). The witness maps variable ids to constants."""
    lits = instance.literals if hasattr(instance, 'literals') else instance
    for sol in solutions(lits, fb):
        return True, sol
    return False, None


def captured(literals, index):
    others = {v for i, (_, vs) in enumerate(literals) if i != index for v in vs}
    return set(literals[index][1]) <= others


def check_implication(instance, implied_index, fb):
    """Return (implied, counterexample).

    Implied means the premise (every other literal) has at least one solution
    and every solution makes the implied literal a fact. When the premise is
    unsatisfiable the result is (False, None): vacuous implications are
    left to the Unsat family.
    """
    lits = instance.literals if hasattr(instance, 'literals') else tuple(instance)
    if not captured(lits, implied_index):
        raise ValueError('implied literal is not captured by the rest of the instance')
    pred, vs = lits[implied_index]
    premise = [l for i, l in enumerate(lits) if i != implied_index]
    facts = fb.factset(pred)
    any_solution = False
    for sol in solutions(premise, fb):
        any_solution = True
        if tuple(sol[v] for v in vs) not in facts:
            return False, sol
    return any_solution, None


def _usable_preds(fb):
    by_arity = defaultdict(list)
    for pred in fb.predicates:
        if not fb.facts(pred):
            log.warning('predicate %s/%d has no facts and is ignored', *pred)
            continue
        by_arity[pred[1]].append(pred)
    return dict(by_arity)


def _has_unsat_subset(literals, known_unsat):
    n = len(literals)
    for k in range(1, n):
        for sub in combinations(literals, k):
            if unsat_property(sub) in known_unsat:
                return True
    return False


def find_pointless_rules(fb, batch, known_unsat=None):
    """Check every instance of every template in ``batch``.

    ``known_unsat`` carries Unsat properties from earlier batches; an instance
    with a strictly smaller unsatisfiable sub-instance is skipped, since it is
    unsatisfiable by monotonicity. It is updated in place.
    """
    if known_unsat is None:
        known_unsat = set()
    preds_by_arity = _usable_preds(fb)
    found = set()
    seen = set()
    for template in batch:
        for inst in instances(template, preds_by_arity):
            if inst.has_duplicate_literals():
                continue
            lits = inst.literals
            key = unsat_property(lits)
            if key in seen:
                continue
            seen.add(key)
            if len(lits) > 1 and _has_unsat_subset(lits, known_unsat):
                continue
            sat, _ = check_satisfiable(lits, fb)
            if not sat:
                found.add(key)
                known_unsat.add(key)
                continue
            for i in range(len(lits)):
                if len(lits) > 1 and captured(lits, i):
                    implied, _ = check_implication(lits, i, fb)
                    if implied:
                        found.add(implies_property(lits, i))
    return found


def find_unsat_impli(fb, max_literals=3, max_vars=6, batch_size=1000, timeout=10.0,
                     max_batches=None):
    """Run the select/check loop until the queue empties or the budget runs out.

    With ``max_batches`` set the budget is a batch count and the result is
    deterministic; otherwise ``timeout`` seconds of wall-clock time, checked
    before each batch starts.
    """
    queue = build_templates(fb.signatures, max_literals, max_vars)
    known_unsat = set()
    found = set()
    start = time.monotonic()
    batches = 0
    while True:
        if max_batches is not None:
            if batches >= max_batches:
                break
        elif time.monotonic() - start >= timeout:
            break
        batch = select_templates(queue, batch_size)
        if not batch:
            break
        found |= find_pointless_rules(fb, batch, known_unsat)
        batches += 1
    log.info('checked %d batches, %d templates left, %d properties',
             batches, len(queue), len(found))
    return found
