"""Second-order rule templates: enumeration, canonical form, and the test queue.

A template is a list of literals, each a tuple of first-order variable ids
(ints). Every literal has its own predicate slot, so slot renaming is just
literal reordering; instances may still put the same predicate in two slots.
"""

from collections import deque
from dataclasses import dataclass
from itertools import permutations, product

LETTERS = 'abcdefghijklmnopqrstuvwxyz'
SLOT_NAMES = 'PQRSTUVWXYZ'


def _rename(seq):
    mapping = {}
    return tuple(tuple(mapping.setdefault(v, len(mapping)) for v in vs) for vs in seq)


def _rank(renamed):
    return tuple(tuple(reversed(vs)) for vs in renamed)


def best_order(literals, labels=None, fix_last=False):
    """Pick the canonical literal order.

    Literals are reordered (all but the last when ``fix_last``) and renamed by
    first appearance; the winner maximises the sequence of reversed variable
    tuples, then minimises ``labels`` in that order. Returns (order, renamed).
    The reversed-tuple rank is what turns the transitive triangle into
    ab_bc_ac rather than ab_ac_bc.
    """
    n = len(literals)
    movable = range(n - 1) if fix_last else range(n)
    best = None
    for perm in permutations(movable):
        if fix_last:
            perm = perm + (n - 1,)
        renamed = _rename(literals[i] for i in perm)
        rank = _rank(renamed)
        lab = tuple(labels[i] for i in perm) if labels is not None else ()
        if best is None or rank > best[0] or (rank == best[0] and lab < best[1]):
            best = (rank, lab, perm, renamed)
    return best[2], best[3]


def shape_name(renamed):
    return '_'.join(''.join(LETTERS[v] for v in vs) for vs in renamed)


def connected(literals):
    if len(literals) <= 1:
        return True
    seen_vars = set(literals[0])
    todo = set(range(1, len(literals)))
    grew = True
    while todo and grew:
        grew = False
        for i in list(todo):
            if seen_vars.intersection(literals[i]):
                seen_vars.update(literals[i])
                todo.discard(i)
                grew = True
    return not todo


def has_repeated_var(vs):
    return len(set(vs)) < len(vs)


def is_reflexive_style(vs):
    """True for literals like P(A,A) where every argument is the same variable."""
    return len(vs) > 1 and len(set(vs)) == 1


@dataclass(frozen=True)
class Template:
    literals: tuple  # tuple of var-id tuples

    @property
    def num_vars(self):
        return len({v for vs in self.literals for v in vs})

    @property
    def arities(self):
        return tuple(len(vs) for vs in self.literals)

    @property
    def canonical_key(self):
        return (len(self.literals), self.literals)

    @property
    def name(self):
        return shape_name(self.literals)

    def __len__(self):
        return len(self.literals)

    def __str__(self):
        parts = []
        for slot, vs in zip(SLOT_NAMES, self.literals):
            parts.append(f'{slot}({",".join(LETTERS[v].upper() for v in vs)})')
        return '{' + ', '.join(parts) + '}'


def canonicalize(template):
    lits = template.literals if isinstance(template, Template) else tuple(template)
    _, renamed = best_order(lits)
    return Template(renamed)


@dataclass(frozen=True)
class TemplateInstance:
    template: Template
    assignment: tuple  # one predicate (name, arity) per literal slot

    def __post_init__(self):
        for pred, vs in zip(self.assignment, self.template.literals):
            if pred[1] != len(vs):
                raise ValueError(f'{pred[0]}/{pred[1]} cannot fill a slot of arity {len(vs)}')

    @property
    def literals(self):
        return tuple(zip(self.assignment, self.template.literals))

    def has_duplicate_literals(self):
        lits = self.literals
        return len(set(lits)) < len(lits)


def _extensions(template_lits, arities, max_vars):
    """All literals that share a variable with the template, new vars numbered next."""
    used = {v for vs in template_lits for v in vs}
    n = len(used)
    for a in arities:
        # each position takes an existing var or a fresh one, fresh ones in order
        def rec(pos, acc, fresh):
            if pos == a:
                if any(v < n for v in acc):
                    yield tuple(acc)
                return
            for v in range(n + fresh + (1 if n + fresh < max_vars else 0)):
                yield from rec(pos + 1, acc + [v], fresh + (1 if v == n + fresh else 0))
        yield from rec(0, [], 0)


def _singletons(arities, max_vars):
    for a in arities:
        def rec(pos, acc, fresh):
            if pos == a:
                yield tuple(acc)
                return
            for v in range(fresh + (1 if fresh < max_vars else 0)):
                yield from rec(pos + 1, acc + [v], fresh + (1 if v == fresh else 0))
        yield from rec(0, [], 0)


def enumerate_templates(arities, max_literals, max_vars):
    """Every connected canonical template, smallest first."""
    arities = sorted(set(arities))
    if not arities or max_literals < 1 or max_vars < 1:
        return []
    level = {canonicalize((vs,)) for vs in _singletons(arities, max_vars)}
    out = sorted(level, key=lambda t: t.canonical_key)
    for _ in range(1, max_literals):
        nxt = set()
        for t in level:
            for lit in _extensions(t.literals, arities, max_vars):
                nxt.add(canonicalize(t.literals + (lit,)))
        level = nxt
        out.extend(sorted(level, key=lambda t: t.canonical_key))
    return out


class TemplateQueue:
    def __init__(self, templates=()):
        self.pending = deque(sorted(templates, key=lambda t: t.canonical_key))
        self.tested = set()

    def __len__(self):
        return len(self.pending)

    def __iter__(self):
        return iter(self.pending)


def build_templates(signatures, max_literals, max_vars):
    """Queue of templates whose literal arities all occur in ``signatures``.

    ``signatures`` may be PredicateSignature objects, (name, arity) pairs, or
    plain arities.
    """
    arities = set()
    for s in signatures:
        if isinstance(s, int):
            arities.add(s)
        elif isinstance(s, tuple):
            arities.add(s[1])
        else:
            arities.add(s.arity)
    return TemplateQueue(enumerate_templates(arities, max_literals, max_vars))


def select_templates(queue, batch_size):
    if batch_size < 1:
        raise ValueError('batch_size must be >= 1')
    batch = []
    while queue.pending and len(batch) < batch_size:
        t = queue.pending.popleft()
        queue.tested.add(t.canonical_key)
        batch.append(t)
    return batch


def instances(template, preds_by_arity):
    """Arity-consistent predicate assignments, lexicographic over (slot, name)."""
    choices = [preds_by_arity.get(len(vs), ()) for vs in template.literals]
    for combo in product(*choices):
        yield TemplateInstance(template, combo)
