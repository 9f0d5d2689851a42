"""Command-line entry point: ingest, discover, emit, and optionally audit."""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .audit import soundness_audit
from .discovery import IMPLIES, UNSAT, find_unsat_impli
from .emit import build_document
from .errors import ShrinkerError
from .facts import infer_types, parse_bk, parse_types
from .recall import compute_recalls
from .totality import find_total_facts

log = logging.getLogger('shrinker')


@dataclass
class RunConfig:
    bk_path: str
    types_path: str = None
    max_literals: int = 3
    max_vars: int = 6
    batch_size: int = 1000
    timeout: float = 10.0
    budget_batches: int = None
    recall_cap: int = 3
    allow_repeated_vars: bool = False
    out: str = None
    audit: bool = False
    audit_max_body: int = 3
    audit_max_vars: int = 4
    audit_repeated_vars: bool = False
    seed: int = 0

    def validate(self):
        for name in ('max_literals', 'max_vars', 'batch_size', 'recall_cap',
                     'audit_max_body', 'audit_max_vars'):
            if getattr(self, name) < 1:
                raise ValueError(f'--{name.replace("_", "-")} must be positive')
        if self.budget_batches is not None and self.budget_batches < 0:
            raise ValueError('--budget-batches must be >= 0')
        if self.timeout < 0:
            raise ValueError('--timeout must be >= 0')

    @property
    def stem(self):
        return self.out or str(Path(self.bk_path).with_suffix(''))


def discover(fb, types, cfg):
    """The three finders in pipeline order; only the first is budgeted."""
    props = find_unsat_impli(fb, cfg.max_literals, cfg.max_vars, cfg.batch_size,
                             timeout=cfg.timeout, max_batches=cfg.budget_batches)
    props |= compute_recalls(fb)
    props |= find_total_facts(fb, types)
    return props


def run(cfg, out=None):
    out = out or sys.stdout
    cfg.validate()
    fb = parse_bk(Path(cfg.bk_path).read_text())
    decls = parse_types(Path(cfg.types_path).read_text()) if cfg.types_path else ()
    types = infer_types(fb, decls)
    fb = fb.with_types(types)
    props = discover(fb, types, cfg)
    doc = build_document(props, cfg.recall_cap, cfg.allow_repeated_vars)
    stem = cfg.stem
    Path(f'{stem}.shrink.lp').write_text(doc.text)
    Path(f'{stem}.shrink.json').write_text(doc.json)
    counts = {k: 0 for k in (UNSAT, IMPLIES, 'recall', 'total')}
    for p in props:
        counts[p.kind] += 1
    for kind, n in counts.items():
        print(f'{kind}: {n}', file=out)
    if not cfg.audit:
        return 0
    report = soundness_audit(fb, props, cfg.audit_max_body, cfg.audit_max_vars, types=types,
                             repeated_vars=cfg.audit_repeated_vars, recall_cap=cfg.recall_cap,
                             allow_repeated_vars=cfg.allow_repeated_vars)
    Path(f'{stem}.audit.json').write_text(json.dumps(report.to_dict(), indent=2) + '\n')
    print(report.summary(), file=out)
    return 0 if report.ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog='shrinker', description=__doc__)
    p.add_argument('bk', help='background knowledge file of ground facts')
    p.add_argument('--types', help='type declarations, type(pred,index,name). per line')
    p.add_argument('--max-literals', type=int, default=3)
    p.add_argument('--max-vars', type=int, default=6)
    p.add_argument('--batch-size', type=int, default=1000)
    budget = p.add_mutually_exclusive_group()
    budget.add_argument('--timeout', type=float, default=10.0, help='discovery budget in seconds')
    budget.add_argument('--budget-batches', type=int, help='discovery budget in batches (deterministic)')
    p.add_argument('--recall-cap', type=int, default=3, help='largest recall bound turned into a constraint')
    p.add_argument('--allow-repeated-vars', action='store_true',
                   help='also emit shapes with a variable repeated inside a literal')
    p.add_argument('--out', help='output stem (default: the BK path without its suffix)')
    p.add_argument('--audit', action='store_true', help='brute-force soundness audit of the output')
    p.add_argument('--audit-max-body', type=int, default=3)
    p.add_argument('--audit-max-vars', type=int, default=4)
    p.add_argument('--audit-repeated-vars', action='store_true',
                   help='include literals with a repeated variable in the audited rule space')
    p.add_argument('--seed', type=int, default=0, help='seed for randomised audit inputs')
    p.add_argument('-v', '--verbose', action='store_true')
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    cfg = RunConfig(
        bk_path=args.bk, types_path=args.types, max_literals=args.max_literals,
        max_vars=args.max_vars, batch_size=args.batch_size, timeout=args.timeout,
        budget_batches=args.budget_batches, recall_cap=args.recall_cap,
        allow_repeated_vars=args.allow_repeated_vars, out=args.out, audit=args.audit,
        audit_max_body=args.audit_max_body, audit_max_vars=args.audit_max_vars,
        audit_repeated_vars=args.audit_repeated_vars, seed=args.seed)
    try:
        return run(cfg)
    except (OSError, ShrinkerError, ValueError) as e:
        print(f'shrinker: error: {e}', file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
