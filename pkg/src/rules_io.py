"""
Rule TSV shared by every phase:

    kind<TAB>affix<TAB>I-class<TAB>R-class<TAB>f<TAB>x<TAB>n<TAB>score[<TAB>merged]

Classes are space-separated tags, `-` is the void I-class and stands in for
x, n and score until scoring fills them. The optional ninth column marks
rules produced by merging. Scores are written for reading convenience only:
when a file is loaded they are recomputed from (x, n, |affix|) so selection
on a reloaded file matches selection in memory.
"""
from __future__ import annotations
import re
from typing import Iterable, List, Optional, TextIO, Union

from pydantic import ValidationError

import rule_scoring
from errors import ParseError
from models import VOID, GuessingRule, POSClass, RuleKind, ScoredRule, ScoringConfig, TrialCounts

AnyRule = Union[GuessingRule, ScoredRule]
MERGED = 'merged'
DIGITS_RE = re.compile(r'[0-9]+')

def format_rule(item: AnyRule, audit: bool = False) -> str:
    if isinstance(item, ScoredRule):
        rule, x, n = item.rule, str(item.counts.x), str(item.counts.n)
        value = VOID if item.score is None else f'{item.score:.6f}'
        flag = MERGED if item.merged else VOID
    else:
        rule, x, n, value, flag = item, VOID, VOID, VOID, VOID
    cols = [rule.kind.value, rule.affix, str(rule.i_class), str(rule.r_class), str(rule.f), x, n, value]
    if audit:
        cols.append(flag)
    return '\t'.join(cols)

def write_rules(rules: Iterable[AnyRule], sink: TextIO, audit: bool = False) -> int:
    count = 0
    for item in rules:
        sink.write(format_rule(item, audit) + '\n')
        count += 1
    return count

def _int_field(text: str, what: str, name: str, lineno: int) -> int:
    if not DIGITS_RE.fullmatch(text):
        raise ParseError(f'{what} must be a non-negative integer, got {text!r}', name, lineno)
    return int(text)

def read_rules(source: TextIO, config: Optional[ScoringConfig] = None,
               kind: Optional[RuleKind] = None) -> List[AnyRule]:
    """Plain rules while x/n are `-`, scored rules once they are filled in."""
    name = str(getattr(source, 'name', '<rules>'))
    config = config or ScoringConfig()
    out: List[AnyRule] = []
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip('\r\n')
        if not line.strip() or line.startswith('#'):
            continue
        cols = line.split('\t')
        if len(cols) not in (8, 9):
            raise ParseError(f'expected 8 or 9 columns, got {len(cols)}', name, lineno)
        kind_s, affix, i_s, r_s, f_s, x_s, n_s = cols[:7]
        try:
            rule_kind = RuleKind(kind_s)
        except ValueError:
            raise ParseError(f'unknown rule kind {kind_s!r}', name, lineno) from None
        if kind is not None and rule_kind is not kind:
            raise ParseError(f'expected {kind.value} rules, got {kind_s}', name, lineno)
        try:
            rule = GuessingRule(kind=rule_kind, affix=affix, i_class=POSClass.of(i_s),
                                r_class=POSClass.of(r_s), f=_int_field(f_s, 'f', name, lineno))
        except ValidationError as e:
            raise ParseError(f'invalid rule: {e.errors()[0]["msg"]}', name, lineno) from None
        if x_s == VOID and n_s == VOID:
            out.append(rule)
            continue
        x, n = _int_field(x_s, 'x', name, lineno), _int_field(n_s, 'n', name, lineno)
        if x > n:
            raise ParseError(f'x={x} exceeds n={n}', name, lineno)
        merged = len(cols) == 9 and cols[8] == MERGED
        out.append(rule_scoring.score(rule, TrialCounts(x=x, n=n), config, merged=merged))
    return out

def as_scored(rules: Iterable[AnyRule]) -> List[ScoredRule]:
    """Wrap plain rules (e.g. an imported rule-set without counts) as unscored ScoredRules."""
    out = []
    for r in rules:
        if isinstance(r, ScoredRule):
            out.append(r)
        else:
            counts = TrialCounts()
            out.append(ScoredRule(rule=r, counts=counts, p_hat=rule_scoring.smoothed_estimate(counts)))
    return out
