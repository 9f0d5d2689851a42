"""Maximum answer substitutions for every predicate and input-position subset."""

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations

from .templates import LETTERS

MAX_ARITY = 8


@dataclass(frozen=True, order=True)
class RecallFact:
    pred: tuple  # (name, arity)
    inputs: tuple  # ascending 0-based positions
    outputs: tuple
    bound: int

    kind = 'recall'

    @property
    def fact_name(self):
        ins = ''.join(LETTERS[i] for i in self.inputs)
        outs = ''.join(LETTERS[i] for i in self.outputs)
        return f'recall_{self.pred[0]}_{ins}_{outs}_{self.bound}'

    @property
    def mode(self):
        """Recall notation, e.g. q(-,+,+)."""
        marks = ','.join('+' if i in self.inputs else '-' for i in range(self.pred[1]))
        return f'{self.pred[0]}({marks})'

    def __str__(self):
        return self.fact_name


def _subsets(arity):
    positions = range(arity)
    for k in range(arity):
        for s in combinations(positions, k):
            yield s


def compute_recalls(fb):
    """One RecallFact per predicate and proper input subset (the empty set included).

    A single pass over the facts groups output projections by input
    projection for every subset at once.
    """
    out = set()
    for pred in fb.predicates:
        name, arity = pred
        if arity > MAX_ARITY:
            raise ValueError(f'{name}/{arity}: recall over more than {MAX_ARITY} arguments is refused')
        rows = fb.facts(pred)
        if not rows:
            continue
        subsets = list(_subsets(arity))
        counts = {s: defaultdict(set) for s in subsets}
        for row in rows:
            for s in subsets:
                key = tuple(row[i] for i in s)
                counts[s][key].add(tuple(row[i] for i in range(arity) if i not in s))
        for s in subsets:
            bound = max(len(v) for v in counts[s].values())
            outputs = tuple(i for i in range(arity) if i not in s)
            out.add(RecallFact(pred, s, outputs, bound))
    return out
