"""Serialise discovered properties as ASP constraints and as JSON.

The ASP text targets a generate-and-test learner that encodes candidate rules
with body_literal(Rule,Pred,Vars) atoms, variables numbered from 0.
"""

import json
import re
from dataclasses import dataclass

from .discovery import IMPLIES, UNSAT, Property, parse_shape
from .recall import RecallFact
from .templates import LETTERS, SLOT_NAMES
from .totality import TotalFact

HEADER = '% hypothesis-space pruning constraints'

SINGLETON_RULE = (
    '% rule(Rule) binds the rule id the count ranges over\n'
    'singleton(Rule,V):- rule(Rule), var(V),\n'
    '    #count{P,Vars : body_literal(Rule,P,Vars), var_member(V,Vars)} == 1.'
)

DEFAULT_RECALL_CAP = 3


def _tuple(items):
    items = list(items)
    if len(items) == 1:
        return f'({items[0]},)'
    return f'({",".join(items)})'


def generic_rule(fact_name, shape):
    lits = parse_shape(shape)
    slots = SLOT_NAMES[:len(lits)]
    body = [f'{fact_name}({",".join(slots)})']
    for slot, vs in zip(slots, lits):
        body.append(f'body_literal(Rule,{slot},{_tuple(LETTERS[v].upper() for v in vs)})')
    return ':- ' + ', '.join(body) + '.'


def recall_constraint(fact):
    name, arity = fact.pred
    outer = ['_' if i in fact.outputs else f'V{i}' for i in range(arity)]
    inner = [f'V{i}' for i in range(arity)]
    counted = ','.join(f'V{i}' for i in fact.outputs)
    return (f':- body_literal(Rule,{name},{_tuple(outer)}), '
            f'#count{{{counted}: body_literal(Rule,{name},{_tuple(inner)})}} > {fact.bound}.')


def total_constraint(fact):
    name, arity = fact.pred
    parts = [f'body_literal(Rule,{name},{_tuple(f"V{i}" for i in range(arity))})']
    parts += [f'singleton(Rule,V{i})' for i in fact.removable]
    return ':- ' + ', '.join(parts) + '.'


def recall_emittable(fact, cap):
    return bool(fact.inputs) and fact.bound <= cap


@dataclass
class ConstraintDoc:
    property_facts: list
    generic_rules: list
    specialized_constraints: list
    json: str
    text: str


def _split(props):
    groups = {UNSAT: [], IMPLIES: [], 'recall': [], 'total': []}
    for p in props:
        groups[p.kind].append(p)
    return groups


def build_document(props, recall_cap=DEFAULT_RECALL_CAP, allow_repeated_vars=False):
    groups = _split(props)
    facts, generic, special = [], [], []
    sections = [HEADER]
    for kind in (UNSAT, IMPLIES):
        chosen = [p for p in groups[kind] if allow_repeated_vars or not p.has_gated_literal]
        if not chosen:
            continue
        kind_facts = sorted(p.fact for p in chosen)
        shapes = sorted({(p.fact_name, p.shape) for p in chosen})
        kind_rules = [generic_rule(name, shape) for name, shape in shapes]
        facts += kind_facts
        generic += kind_rules
        sections.append('\n'.join([f'% {kind}'] + kind_facts + kind_rules))
    recalls = sorted((f for f in groups['recall'] if recall_emittable(f, recall_cap)),
                     key=lambda f: f.fact_name)
    if recalls:
        lines = [recall_constraint(f) for f in recalls]
        special += lines
        sections.append('\n'.join(['% recall'] + lines))
    # within a predicate, later removable positions first
    totals = sorted(sorted(groups['total'], key=lambda f: f.removable, reverse=True),
                    key=lambda f: f.pred)
    if totals:
        lines = [total_constraint(f) for f in totals]
        special += lines
        sections.append('\n'.join(['% total', SINGLETON_RULE] + lines))
    text = '\n\n'.join(sections) + '\n'
    doc_json = emit_json(props, recall_cap, allow_repeated_vars)
    return ConstraintDoc(facts, generic, special, doc_json, text)


def emit_asp(props, recall_cap=DEFAULT_RECALL_CAP, allow_repeated_vars=False):
    return build_document(props, recall_cap, allow_repeated_vars).text


def _letters(positions):
    return [i + 1 for i in positions]


def emit_json(props, recall_cap=DEFAULT_RECALL_CAP, allow_repeated_vars=False):
    groups = _split(props)
    doc = {
        'meta': {'recall_cap': recall_cap, 'allow_repeated_vars': allow_repeated_vars},
        'unsat': [], 'implies': [], 'recall': [], 'total': [],
    }
    for kind in (UNSAT, IMPLIES):
        for p in sorted(groups[kind], key=lambda p: p.fact):
            entry = {
                'fact': p.fact[:-1],
                'shape': p.shape,
                'predicates': [n for n, _ in p.preds],
                'arities': [a for _, a in p.preds],
            }
            if kind == IMPLIES:
                entry['premise'] = [n for n, _ in p.preds[:-1]]
                entry['conclusion'] = p.preds[-1][0]
            entry['emitted'] = allow_repeated_vars or not p.has_gated_literal
            doc[kind].append(entry)
    for f in sorted(groups['recall'], key=lambda f: (f.pred, f.inputs)):
        doc['recall'].append({
            'fact': f.fact_name,
            'predicate': f.pred[0],
            'arity': f.pred[1],
            'mode': f.mode,
            'inputs': _letters(f.inputs),
            'outputs': _letters(f.outputs),
            'bound': f.bound,
            'emitted': recall_emittable(f, recall_cap),
        })
    for f in sorted(groups['total'], key=lambda f: (f.pred, f.removable)):
        doc['total'].append({
            'fact': f.fact_name,
            'predicate': f.pred[0],
            'arity': f.pred[1],
            'total_positions': _letters(f.total_positions),
            'removable': _letters(f.removable),
            'emitted': True,
        })
    return json.dumps(doc, indent=2) + '\n'


def parse_json(text):
    """Rebuild the property set from emit_json output."""
    doc = json.loads(text)
    props = set()
    for kind in (UNSAT, IMPLIES):
        for e in doc[kind]:
            props.add(Property(kind, e['shape'], tuple(zip(e['predicates'], e['arities']))))
    for e in doc['recall']:
        props.add(RecallFact((e['predicate'], e['arity']), tuple(i - 1 for i in e['inputs']),
                             tuple(i - 1 for i in e['outputs']), e['bound']))
    for e in doc['total']:
        props.add(TotalFact((e['predicate'], e['arity']), tuple(i - 1 for i in e['total_positions']),
                            tuple(i - 1 for i in e['removable'])))
    return props


_ASP_ATOM = re.compile(r'[a-z][A-Za-z0-9_]*\(.*\)\Z', re.S)


def check_asp_syntax(text):
    """Split ASP text into statements, checking brackets and terminators.

    Raises ValueError on the first malformed statement.
    """
    lines = [re.sub(r'%.*', '', line) for line in text.splitlines()]
    src = '\n'.join(lines)
    statements = []
    depth = []
    start = 0
    pairs = {')': '(', '}': '{'}
    for i, ch in enumerate(src):
        if ch in '({':
            depth.append(ch)
        elif ch in ')}':
            if not depth or depth.pop() != pairs[ch]:
                raise ValueError(f'unbalanced {ch!r} at offset {i}')
        elif ch == '.' and not depth and (i + 1 == len(src) or src[i + 1].isspace()):
            stmt = ' '.join(src[start:i].split())
            if not stmt:
                raise ValueError(f'empty statement at offset {i}')
            if ':-' not in stmt and not _ASP_ATOM.match(stmt):
                raise ValueError(f'not a fact or rule: {stmt!r}')
            statements.append(stmt + '.')
            start = i + 1
    if depth:
        raise ValueError('unclosed bracket at end of input')
    if src[start:].strip():
        raise ValueError(f'unterminated statement: {src[start:].strip()!r}')
    return statements
