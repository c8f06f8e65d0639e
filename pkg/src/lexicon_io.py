"""
Lexicon, frequency-table and closed-class tag list ingestion.

Formats (UTF-8, LF, `#` comment lines and blank lines skipped):
  lexicon      word<TAB>tag tag ...
  frequencies  word<TAB>count
  closed tags  one tag per line
"""
from __future__ import annotations
import logging, re
from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, Iterator, Optional, Set, TextIO, Tuple

from errors import ParseError
from models import FrequencyTable, Lexicon, POSClass

log = logging.getLogger(__name__)

COUNT_RE = re.compile(r'[0-9]+')

def _source_name(source: TextIO, default: str) -> str:
    return str(getattr(source, 'name', default))

def _records(source: Iterable[str]) -> Iterator[Tuple[int, str]]:
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip('\r\n')
        if not line.strip() or line.lstrip().startswith('#'):
            continue
        yield lineno, line

def load_lexicon(source: TextIO, closed_class_tags: Iterable[str] = ()) -> Lexicon:
    name = _source_name(source, '<lexicon>')
    tagsets: Dict[str, Set[str]] = defaultdict(set)
    for lineno, line in _records(source):
        if '\t' not in line:
            raise ParseError('expected word<TAB>tags', name, lineno)
        word, _, rest = line.partition('\t')
        if not word or any(ch.isspace() for ch in word):
            raise ParseError(f'bad word field {word!r}', name, lineno)
        tags = rest.split()
        if not tags:
            raise ParseError(f'no tags for {word!r}', name, lineno)
        tagsets[word].update(tags)

    # words sharing a tag set share one POSClass instance
    classes: Dict[Tuple[str, ...], POSClass] = {}
    entries: Dict[str, POSClass] = {}
    for word, tags in tagsets.items():
        canon = tuple(sorted(tags))
        if canon not in classes:
            classes[canon] = POSClass(tags=canon)
        entries[word] = classes[canon]
    log.debug('loaded %d lexicon entries (%d distinct classes) from %s', len(entries), len(classes), name)
    return Lexicon(entries=entries, closed_class_tags=frozenset(closed_class_tags))

def load_frequencies(source: TextIO) -> FrequencyTable:
    name = _source_name(source, '<frequencies>')
    counts: Dict[str, int] = defaultdict(int)
    for lineno, line in _records(source):
        fields = line.split('\t')
        if len(fields) != 2 or not fields[0]:
            raise ParseError('expected word<TAB>count', name, lineno)
        word, count = fields[0], fields[1].strip()
        if any(ch.isspace() for ch in word):
            raise ParseError(f'bad word field {word!r}', name, lineno)
        if not COUNT_RE.fullmatch(count) or int(count) <= 0:
            raise ParseError(f'count must be a positive integer, got {count!r}', name, lineno)
        counts[word] += int(count)
    return FrequencyTable(counts=dict(counts))

def load_closed_class_tags(source: TextIO) -> FrozenSet[str]:
    name = _source_name(source, '<closed-class tags>')
    tags = set()
    for lineno, line in _records(source):
        tag = line.strip()
        if any(ch.isspace() for ch in tag):
            raise ParseError(f'one tag per line, got {tag!r}', name, lineno)
        tags.add(tag)
    return frozenset(tags)

def dump_lexicon(lexicon: Lexicon, sink: TextIO) -> None:
    for word in lexicon.words():
        sink.write(f'{word}\t{lexicon.entries[word]}\n')

def dump_frequencies(freqs: FrequencyTable, sink: TextIO) -> None:
    for word in sorted(freqs.counts):
        sink.write(f'{word}\t{freqs.counts[word]}\n')

def _is_open(pos_class: POSClass, closed: FrozenSet[str]) -> bool:
    return not any(tag in closed for tag in pos_class.tags)

def filter_for_evaluation(lexicon: Lexicon, min_word_length: int = 5,
                          closed_class_tags: Optional[Iterable[str]] = None) -> Lexicon:
    """Words at least `min_word_length` long whose class has no closed-class tag."""
    if min_word_length < 1:
        raise ValueError('min_word_length must be >= 1')
    closed = lexicon.closed_class_tags if closed_class_tags is None else frozenset(closed_class_tags)
    kept = {w: c for w, c in lexicon.entries.items()
            if len(w) >= min_word_length and _is_open(c, closed)}
    log.info('evaluation lexicon: %d of %d entries', len(kept), len(lexicon))
    return Lexicon(entries=kept, closed_class_tags=closed)

def known_word_lexicon(lexicon: Lexicon, min_word_length: int = 5,
                       closed_class_tags: Optional[Iterable[str]] = None) -> Lexicon:
    """Complement of filter_for_evaluation: only closed-class and short words stay known."""
    if min_word_length < 1:
        raise ValueError('min_word_length must be >= 1')
    closed = lexicon.closed_class_tags if closed_class_tags is None else frozenset(closed_class_tags)
    kept = {w: c for w, c in lexicon.entries.items()
            if len(w) < min_word_length or not _is_open(c, closed)}
    log.info('small lexicon: %d of %d entries', len(kept), len(lexicon))
    return Lexicon(entries=kept, closed_class_tags=closed)
