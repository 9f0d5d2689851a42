"""Discover pointless-rule properties of background knowledge and emit pruning constraints."""

from .discovery import Property, find_unsat_impli
from .emit import emit_asp, emit_json
from .facts import FactBase, infer_types, parse_bk, parse_types
from .recall import RecallFact, compute_recalls
from .totality import TotalFact, find_total_facts

__all__ = [
    'FactBase', 'Property', 'RecallFact', 'TotalFact', 'compute_recalls', 'emit_asp',
    'emit_json', 'find_total_facts', 'find_unsat_impli', 'infer_types', 'parse_bk',
    'parse_types',
]
