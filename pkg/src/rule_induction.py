"""
Rule extraction from the lexicon.

Morphological rules come from pairs of entries where one word is the other
plus an affix: [booked (JJ VBD VBN)] and [book (NN VB)] give the suffix rule
[ed (NN VB) (JJ VBD VBN)]. Ending rules come from single entries:
[different (JJ)] gives [t - (JJ)], [nt - (JJ)], ... up to five characters.
"""
from __future__ import annotations
import logging
from collections import Counter
from typing import Dict, Iterator, List, Optional

from errors import EmptyInputError
from models import (MAX_ENDING_LENGTH, GuessingRule, Lexicon, LexiconEntry,
                    POSClass, RuleKey, RuleKind)

log = logging.getLogger(__name__)

VOID_CLASS = POSClass()

class RuleTable:
    """Extracted rules of one kind with their extraction frequencies."""

    def __init__(self, kind: RuleKind, counts: Optional[Dict[RuleKey, int]] = None):
        self.kind = kind
        self._counts: Counter = Counter()
        for key, f in (counts or {}).items():
            self.add(key, f)

    def add(self, key: RuleKey, f: int = 1) -> None:
        if key.kind is not self.kind:
            raise ValueError(f'{key.kind.value} rule in a {self.kind.value} table')
        self._counts[key] += f

    def add_rule(self, rule: GuessingRule) -> None:
        self.add(rule.key, rule.f)

    def items(self) -> Iterator:
        return iter(self._counts.items())

    def rules(self) -> List[GuessingRule]:
        out = [GuessingRule(kind=k.kind, affix=k.affix, i_class=k.i_class, r_class=k.r_class, f=f)
               for k, f in self._counts.items()]
        out.sort(key=GuessingRule.sort_key)
        return out

    @property
    def total_frequency(self) -> int:
        return sum(self._counts.values())

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, key: RuleKey) -> bool:
        return key in self._counts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RuleTable):
            return NotImplemented
        return self.kind is other.kind and self._counts == other._counts

def subtract(longer: LexiconEntry, shorter: LexiconEntry, kind: RuleKind) -> Optional[GuessingRule]:
    """The morphological rule turning `shorter` into `longer`, if any."""
    if kind is RuleKind.ENDING:
        raise ValueError('subtract builds prefix or suffix rules only')
    big, small = longer.word, shorter.word
    if len(big) <= len(small):
        return None
    if kind is RuleKind.SUFFIX:
        if not big.startswith(small):
            return None
        affix = big[len(small):]
    else:
        if not big.endswith(small):
            return None
        affix = big[:len(big) - len(small)]
    return GuessingRule(kind=kind, affix=affix, i_class=shorter.pos_class,
                        r_class=longer.pos_class, f=1)

def extract_morphological(lexicon: Lexicon, kind: RuleKind) -> RuleTable:
    """Prefix or suffix rules from every ordered pair of entries.

    Instead of comparing all pairs, each word is split at every inner
    position and the remaining stem is looked up; a pair (longer, shorter)
    matches exactly once this way, so the counts equal the pairwise ones.
    """
    if kind is RuleKind.ENDING:
        raise ValueError('use extract_endings for ending rules')
    if not len(lexicon):
        raise EmptyInputError('cannot extract rules from an empty lexicon')
    entries = lexicon.entries
    table = RuleTable(kind)
    for word, r_class in entries.items():
        for cut in range(1, len(word)):
            if kind is RuleKind.SUFFIX:
                stem, affix = word[:cut], word[cut:]
            else:
                affix, stem = word[:cut], word[cut:]
            i_class = entries.get(stem)
            if i_class is not None:
                table.add(RuleKey(kind, affix, i_class, r_class))
    log.info('🔎 extracted %d %s rules (total f=%d)', len(table), kind.value, table.total_frequency)
    return table

def extract_endings(lexicon: Lexicon, max_len: int = MAX_ENDING_LENGTH) -> RuleTable:
    if not 1 <= max_len <= MAX_ENDING_LENGTH:
        raise ValueError(f'max_len must be within 1..{MAX_ENDING_LENGTH}')
    table = RuleTable(RuleKind.ENDING)
    for word, r_class in lexicon.entries.items():
        for size in range(1, min(max_len, len(word) - 1) + 1):
            table.add(RuleKey(RuleKind.ENDING, word[-size:], VOID_CLASS, r_class))
    log.info('🔎 extracted %d ending rules (total f=%d)', len(table), table.total_frequency)
    return table

def render_rule(rule: GuessingRule) -> str:
    """`[ed (NN VB) (JJ VBD VBN)]`, `[ing - (JJ NN VBG)]`."""
    return rule.render()

def filter_by_frequency(table: RuleTable, theta: int) -> RuleTable:
    if theta < 1:
        raise ValueError('theta must be >= 1')
    kept = RuleTable(table.kind, {k: f for k, f in table.items() if f >= theta})
    log.info('🧹 %s rules with f >= %d: %d of %d', table.kind.value, theta, len(kept), len(table))
    return kept

def induce(lexicon: Lexicon, kind: RuleKind, theta: int = 3,
           max_ending_length: int = MAX_ENDING_LENGTH) -> RuleTable:
    if kind is RuleKind.ENDING:
        table = extract_endings(lexicon, max_ending_length)
    else:
        table = extract_morphological(lexicon, kind)
    return filter_by_frequency(table, theta)
