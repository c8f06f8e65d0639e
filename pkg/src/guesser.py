"""
Cascading guesser: prefix rules, then suffix rules, then ending rules, most
accurate family first. The first rule-set with an applicable rule answers.
"""
from __future__ import annotations
import logging
from collections import defaultdict
from typing import (Any, Callable, Dict, Generic, Iterable, Iterator, List, Optional, Sequence,
                    TextIO, Tuple, TypeVar)

import marisa_trie

from errors import GuesserBuildError
from models import Lexicon, POSClass, RuleKind, ScoredRule
from rule_scoring import applicable

log = logging.getLogger(__name__)

T = TypeVar('T')

class AffixTrie(Generic[T]):
    """Affix index over a marisa-trie; reversed keys turn it into a suffix index.

    Values stored under one affix keep the order given by `order`.
    """

    def __init__(self, items: Iterable[Tuple[str, T]] = (), reverse: bool = False,
                 order: Optional[Callable[[T], Any]] = None) -> None:
        self.reverse = reverse
        self._values: Dict[str, List[T]] = defaultdict(list)
        for affix, value in items:
            self._values[self._key(affix)].append(value)
        if order is not None:
            for values in self._values.values():
                values.sort(key=order)
        self._trie = marisa_trie.Trie(list(self._values))

    def _key(self, text: str) -> str:
        return text[::-1] if self.reverse else text

    def matches(self, word: str) -> List[Tuple[int, List[T]]]:
        """(affix length, values) for every stored affix of `word`, longest first."""
        found = sorted(self._trie.prefixes(self._key(word)), key=len, reverse=True)
        return [(len(key), self._values[key]) for key in found]

    def __len__(self) -> int:
        return len(self._values)

def _preference(rule: ScoredRule):
    value = float('-inf') if rule.score is None else rule.score
    return (-value, rule.rule.r_class.tags)

class RuleSet:
    """Accepted rules of one kind behind an affix index."""

    def __init__(self, kind: RuleKind, rules: Iterable[ScoredRule] = (), name: Optional[str] = None):
        self.kind = kind
        self.name = name or kind.letter
        self.rules: Tuple[ScoredRule, ...] = tuple(sorted(rules, key=lambda r: r.rule.sort_key()))
        for r in self.rules:
            if r.kind is not kind:
                raise GuesserBuildError(f'{r.kind.value} rule {r.rule} in a {kind.value} rule-set')
        self._index: AffixTrie[ScoredRule] = AffixTrie(((r.rule.affix, r) for r in self.rules),
                                                       reverse=kind is not RuleKind.PREFIX, order=_preference)

    def candidates(self, word: str) -> Iterator[ScoredRule]:
        """Rules whose affix matches `word`, in preference order."""
        for _, rules in self._index.matches(word):
            yield from rules

    def find(self, word: str, lexicon: Lexicon) -> Optional[ScoredRule]:
        for rule in self.candidates(word):
            if applicable(rule.rule, word, lexicon):
                return rule
        return None

    def __len__(self) -> int:
        return len(self.rules)

class CascadingGuesser:
    def __init__(self, stages: Sequence[RuleSet], lexicon: Lexicon,
                 fallback_common: str = 'NN', fallback_proper: str = 'NP'):
        self._stages = tuple(stages)
        self._lexicon = lexicon
        self.fallback_common = POSClass(tags=[fallback_common])
        self.fallback_proper = POSClass(tags=[fallback_proper])

    @property
    def stages(self) -> Tuple[RuleSet, ...]:
        return self._stages

    @property
    def lexicon(self) -> Lexicon:
        return self._lexicon

    @property
    def name(self) -> str:
        return '+'.join(s.name for s in self._stages) or '-'

    def _stage(self, kind: RuleKind) -> Optional[RuleSet]:
        return next((s for s in self._stages if s.kind is kind), None)

    @property
    def prefix_set(self) -> Optional[RuleSet]:
        return self._stage(RuleKind.PREFIX)

    @property
    def suffix_set(self) -> Optional[RuleSet]:
        return self._stage(RuleKind.SUFFIX)

    @property
    def ending_set(self) -> Optional[RuleSet]:
        return self._stage(RuleKind.ENDING)

def build_guesser(prefix: RuleSet, suffix: RuleSet, ending: RuleSet, lexicon: Lexicon,
                  fallback_common: str = 'NN', fallback_proper: str = 'NP') -> CascadingGuesser:
    for slot, rs in ((RuleKind.PREFIX, prefix), (RuleKind.SUFFIX, suffix), (RuleKind.ENDING, ending)):
        if rs.kind is not slot:
            raise GuesserBuildError(f'{slot.value} slot got a {rs.kind.value} rule-set')
    return CascadingGuesser((prefix, suffix, ending), lexicon, fallback_common, fallback_proper)

def build_cascade(stages: Sequence[RuleSet], lexicon: Lexicon, **fallbacks) -> CascadingGuesser:
    """Any stage order, e.g. an imported ending guesser before or after E."""
    return CascadingGuesser(stages, lexicon, **fallbacks)

def guess_rule(guesser: CascadingGuesser, word: str) -> Optional[ScoredRule]:
    for stage in guesser.stages:
        hit = stage.find(word, guesser.lexicon)
        if hit is not None:
            return hit
    return None

def guess(guesser: CascadingGuesser, word: str) -> Optional[POSClass]:
    hit = guess_rule(guesser, word)
    return None if hit is None else hit.rule.r_class

def guess_with_fallback(guesser: CascadingGuesser, word: str, sentence_initial: bool = False) -> POSClass:
    guessed = guess(guesser, word)
    if guessed is not None:
        return guessed
    if word[:1].isupper() and not sentence_initial:
        return guesser.fallback_proper
    return guesser.fallback_common

def guess_batch(guesser: CascadingGuesser, lines: Iterable[str], sink: TextIO,
                fallback: bool = False) -> int:
    """`word[<TAB>I]` lines in, `word<TAB>tags` lines out (`-` when nothing applies)."""
    count = 0
    for raw in lines:
        line = raw.rstrip('\r\n')
        if not line.strip():
            continue
        word, _, flag = line.partition('\t')
        if fallback:
            result: Optional[POSClass] = guess_with_fallback(guesser, word, flag.strip() == 'I')
        else:
            result = guess(guesser, word)
        sink.write(f"{word}\t{result if result is not None else '-'}\n")
        count += 1
    return count
