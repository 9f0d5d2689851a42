"""Total argument subsets: every well-typed instantiation extends to a fact."""

from dataclasses import dataclass
from itertools import combinations, product
from math import prod

from .errors import EmptyDomainError
from .templates import LETTERS


@dataclass(frozen=True, order=True)
class TotalFact:
    pred: tuple
    total_positions: tuple
    removable: tuple

    kind = 'total'

    @property
    def fact_name(self):
        return f'total_{self.pred[0]}_{"".join(LETTERS[i] for i in self.removable)}'

    def __str__(self):
        return self.fact_name


def check_total(pred, positions, fb, types):
    """Return (total, missing) for ``pred`` over the 0-based ``positions``.

    Total means the projection of the facts onto ``positions`` is the full
    product of the positions' type domains; otherwise ``missing`` is the
    first absent tuple in domain order.
    """
    positions = tuple(sorted(positions))
    name, arity = pred
    if not positions or len(positions) >= arity:
        raise ValueError('positions must be a nonempty proper subset of the arguments')
    domains = [sorted(types.position_domain(pred, i)) for i in positions]
    for i, dom in zip(positions, domains):
        if not dom:
            raise EmptyDomainError(f'{name} argument {i + 1} has an empty type domain')
    keys = fb.index(pred, positions)
    if len(keys) == prod(len(d) for d in domains):
        return True, None
    for combo in product(*domains):
        if combo not in keys:
            return False, combo
    return True, None


def find_total_facts(fb, types):
    """A TotalFact for every maximal total subset with something left to remove."""
    out = set()
    for pred in fb.predicates:
        arity = pred[1]
        if arity < 2 or not fb.facts(pred):
            continue
        total = []
        for k in range(arity - 1, 0, -1):
            for s in combinations(range(arity), k):
                if any(set(s) < set(t) for t in total):
                    continue
                ok, _ = check_total(pred, s, fb, types)
                if ok:
                    total.append(s)
        for s in total:
            removable = tuple(i for i in range(arity) if i not in s)
            out.add(TotalFact(pred, s, removable))
    return out
