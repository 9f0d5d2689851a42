"""Background knowledge: parsing ground facts, indexing them, and typing argument positions.

Positions are 0-based everywhere in the Python API. The types file is the one
place where indices are written 1-based, as users write them.
"""

import logging
import re
import threading
from collections import defaultdict
from dataclasses import dataclass, field

from .errors import BKSyntaxError, TypeConflictError, UnknownPredicateError

log = logging.getLogger(__name__)

PRED_RE = re.compile(r'[a-z][A-Za-z0-9_]*\Z')

_TOKEN_RE = re.compile(r'''
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct>[(),.])
''', re.VERBOSE)


def _tokens(text):
    """Yield (kind, value, line, column); whitespace and comments are dropped."""
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise BKSyntaxError(f'unexpected character {text[pos]!r}', line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ('ws', 'comment'):
            yield kind, value, line, col
        newlines = value.count('\n')
        if newlines:
            line += newlines
            line_start = m.start() + value.rindex('\n') + 1
        pos = m.end()
    yield 'eof', '', line, pos - line_start + 1


class _Stream:
    def __init__(self, text):
        self._it = _tokens(text)
        self.tok = next(self._it)

    def advance(self):
        tok = self.tok
        self.tok = next(self._it)
        return tok

    def expect(self, kind, value=None):
        k, v, line, col = self.tok
        if k != kind or (value is not None and v != value):
            want = repr(value) if value is not None else kind
            got = repr(v) if v else 'end of input'
            raise BKSyntaxError(f'expected {want}, got {got}', line, col)
        return self.advance()


def _parse_atoms(text):
    """Yield (name, args, line, col) for every `name(arg, ...).` in text."""
    s = _Stream(text)
    while s.tok[0] != 'eof':
        kind, name, line, col = s.tok
        if kind == 'var':
            raise BKSyntaxError(f'predicate symbol must be lowercase, got {name!r}', line, col)
        s.expect('ident')
        if s.tok[0] == 'punct' and s.tok[1] == '.':
            raise BKSyntaxError(f'zero-arity fact {name!r} is not supported', line, col)
        s.expect('punct', '(')
        args = []
        while True:
            k, v, aline, acol = s.tok
            if k == 'var':
                raise BKSyntaxError(f'variable {v!r} in a ground fact', aline, acol)
            if k not in ('ident', 'int'):
                got = repr(v) if v else 'end of input'
                raise BKSyntaxError(f'expected a constant, got {got}', aline, acol)
            args.append(v)
            s.advance()
            if s.tok[0] == 'punct' and s.tok[1] == ',':
                s.advance()
                continue
            break
        s.expect('punct', ')')
        s.expect('punct', '.')
        yield name, tuple(args), line, col


@dataclass(frozen=True, order=True)
class PredicateSignature:
    name: str
    arity: int
    position_types: tuple = ()

    @property
    def key(self):
        return (self.name, self.arity)


@dataclass(frozen=True)
class TypeAssignment:
    type_of_position: dict  # (pred, position) -> type id
    domain: dict  # type id -> frozenset of constants

    def position_domain(self, pred, position):
        return self.domain[self.type_of_position[(pred, position)]]

    def types_of(self, pred):
        name, arity = pred
        return tuple(self.type_of_position[(pred, i)] for i in range(arity))


class FactBase:
    """Immutable store of ground facts keyed by (name, arity).

    Projections onto argument subsets are built lazily and cached; the cache is
    guarded by a lock so concurrent first access builds each index once.
    """

    def __init__(self, facts, types=None):
        ordered = {}
        for pred, rows in facts.items():
            seen = dict.fromkeys(tuple(r) for r in rows)
            for r in seen:
                if len(r) != pred[1]:
                    raise ValueError(f'fact {pred[0]}{r} does not match arity {pred[1]}')
            ordered[pred] = tuple(seen)
        self._facts = ordered
        self._sets = {p: frozenset(rows) for p, rows in ordered.items()}
        self._types = types
        self._indexes = {}
        self._lock = threading.Lock()

    @property
    def predicates(self):
        return sorted(self._facts)

    @property
    def signatures(self):
        sigs = set()
        for pred in self._facts:
            ptypes = self._types.types_of(pred) if self._types else ()
            sigs.add(PredicateSignature(pred[0], pred[1], ptypes))
        return frozenset(sigs)

    @property
    def types(self):
        return self._types

    def with_types(self, types):
        return FactBase(self._facts, types)

    def facts(self, pred):
        if pred not in self._facts:
            raise UnknownPredicateError(f'unknown predicate {pred[0]}/{pred[1]}')
        return self._facts[pred]

    def factset(self, pred):
        if pred not in self._sets:
            raise UnknownPredicateError(f'unknown predicate {pred[0]}/{pred[1]}')
        return self._sets[pred]

    def holds(self, pred, args):
        return tuple(args) in self._sets.get(pred, ())

    def constants(self):
        out = set()
        for rows in self._facts.values():
            for r in rows:
                out.update(r)
        return out

    def __len__(self):
        return sum(len(rows) for rows in self._facts.values())

    def __contains__(self, pred):
        return pred in self._facts

    def __eq__(self, other):
        if not isinstance(other, FactBase):
            return NotImplemented
        return self._sets == other._sets

    def __hash__(self):
        return hash(frozenset(self._sets.items()))

    def __repr__(self):
        preds = ', '.join(f'{n}/{a}' for n, a in self.predicates)
        return f'FactBase({preds}; {len(self)} facts)'

    def index(self, pred, key_positions):
        key_positions = tuple(sorted(key_positions))
        cache_key = (pred, key_positions)
        idx = self._indexes.get(cache_key)
        if idx is not None:
            return idx
        with self._lock:
            idx = self._indexes.get(cache_key)
            if idx is None:
                idx = self._build_index(pred, key_positions)
                self._indexes[cache_key] = idx
        return idx

    def _build_index(self, pred, key_positions):
        rows = self.facts(pred)
        arity = pred[1]
        for p in key_positions:
            if not 0 <= p < arity:
                raise ValueError(f'position {p} out of range for {pred[0]}/{arity}')
        value_positions = [i for i in range(arity) if i not in key_positions]
        groups = defaultdict(set)
        for r in rows:
            groups[tuple(r[i] for i in key_positions)].add(tuple(r[i] for i in value_positions))
        return {k: frozenset(v) for k, v in groups.items()}


def build_index(fb, pred, key_positions):
    return fb.index(pred, key_positions)


def parse_bk(text):
    facts = defaultdict(list)
    for name, args, _, _ in _parse_atoms(text):
        facts[(name, len(args))].append(args)
    return FactBase(facts)


def serialize_bk(fb):
    lines = []
    for pred in fb.predicates:
        for row in fb.facts(pred):
            lines.append(f'{pred[0]}({",".join(row)}).')
    return '\n'.join(lines) + ('\n' if lines else '')


@dataclass(frozen=True)
class TypeDecl:
    pred: str
    index: int  # 1-based, as written
    type_name: str


def parse_types(text):
    decls = []
    for name, args, line, col in _parse_atoms(text):
        if name != 'type' or len(args) != 3:
            raise BKSyntaxError('expected type(pred, index, typename).', line, col)
        pred, index, type_name = args
        if not index.isdigit():
            raise BKSyntaxError(f'type index must be an integer, got {index!r}', line, col)
        if int(index) < 1:
            raise BKSyntaxError('type index must be >= 1', line, col)
        if not PRED_RE.match(pred):
            raise BKSyntaxError(f'bad predicate symbol {pred!r}', line, col)
        decls.append(TypeDecl(pred, int(index), type_name))
    return decls


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _resolve_decls(fb, decls):
    """Map each declaration onto a (pred, 0-based position) of fb."""
    by_name = defaultdict(list)
    for pred in fb.predicates:
        by_name[pred[0]].append(pred)
    declared = {}
    for d in decls:
        preds = by_name.get(d.pred)
        if not preds:
            raise UnknownPredicateError(f'type declaration for unknown predicate {d.pred!r}')
        matched = [p for p in preds if d.index <= p[1]]
        if not matched:
            raise UnknownPredicateError(
                f'type declaration {d.pred}/{d.index} exceeds the arity of every {d.pred} predicate')
        for pred in matched:
            key = (pred, d.index - 1)
            prev = declared.get(key)
            if prev is not None and prev != d.type_name:
                raise TypeConflictError(
                    f'{d.pred} argument {d.index} declared as both {prev} and {d.type_name}')
            declared[key] = d.type_name
    return declared


def _domains(fb, type_of_position):
    domain = defaultdict(set)
    for (pred, i), t in type_of_position.items():
        domain[t].update(r[i] for r in fb.facts(pred))
    return {t: frozenset(cs) for t, cs in domain.items()}


def infer_types(fb, decls=()):
    """Assign one type to every argument position of fb.

    Without declarations, positions that share a constant are merged by
    union-find and each class gets a fresh id. When declarations cover every
    position they are used verbatim. Partial declarations name the classes
    they touch; two declared names landing in one class is a conflict.
    """
    positions = [(pred, i) for pred in fb.predicates for i in range(pred[1])]
    declared = _resolve_decls(fb, decls)

    if positions and all(p in declared for p in positions):
        type_of_position = {p: declared[p] for p in positions}
        domain = _domains(fb, type_of_position)
        owners = defaultdict(set)
        for t, cs in domain.items():
            for c in cs:
                owners[c].add(t)
        shared = sorted(c for c, ts in owners.items() if len(ts) > 1)
        if shared:
            log.warning('declared types overlap on constants %s', ', '.join(shared))
        return TypeAssignment(type_of_position, domain)

    uf = _UnionFind()
    first_seen = {}
    for pos in positions:
        uf.find(pos)
        pred, i = pos
        for r in fb.facts(pred):
            c = r[i]
            if c in first_seen:
                uf.union(first_seen[c], pos)
            else:
                first_seen[c] = pos
    by_name = {}
    for pos, name in sorted(declared.items()):
        if name in by_name:
            uf.union(by_name[name], pos)
        else:
            by_name[name] = pos

    names = {}
    for pos, name in sorted(declared.items()):
        root = uf.find(pos)
        if names.setdefault(root, name) != name:
            raise TypeConflictError(
                f'types {names[root]} and {name} share constants and cannot be kept apart')

    classes = defaultdict(list)
    for pos in positions:
        classes[uf.find(pos)].append(pos)
    type_of_position = {}
    fresh = 0
    for root in sorted(classes, key=lambda r: min(classes[r])):
        name = names.get(root)
        if name is None:
            name = f't{fresh}'
            fresh += 1
        for pos in classes[root]:
            type_of_position[pos] = name
    return TypeAssignment(type_of_position, _domains(fb, type_of_position))
