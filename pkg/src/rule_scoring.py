"""
Rule scoring against word frequencies from a raw corpus.

A rule is tried on every corpus word it is compatible with (token-weighted)
and succeeds when its R-class equals the word's lexicon class exactly:

    p_hat = (x + 0.5) / (n + 1)
    s_p   = sqrt(p_hat * (1 - p_hat) / n)
    score = p_hat - z * s_p / (1 + log10(|affix|))
"""
from __future__ import annotations
import logging, math, multiprocessing
from collections import Counter, defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from scipy import stats

from errors import InsufficientTrialsError
from models import (FrequencyTable, GuessingRule, Lexicon, POSClass, RuleKind,
                    ScoredRule, ScoringConfig, TrialCounts)

log = logging.getLogger(__name__)

def z_from_confidence(confidence: float) -> float:
    """Two-sided normal quantile: 0.90 -> 1.645."""
    if not 0 < confidence < 1:
        raise ValueError('confidence must be in (0, 1)')
    return float(stats.norm.ppf(1 - (1 - confidence) / 2))

def _stem(rule: GuessingRule, word: str) -> Optional[str]:
    if len(word) <= len(rule.affix):
        return None
    if rule.kind is RuleKind.PREFIX:
        return word[len(rule.affix):] if word.startswith(rule.affix) else None
    return word[:-len(rule.affix)] if word.endswith(rule.affix) else None

def applicable(rule: GuessingRule, word: str, lexicon: Lexicon) -> bool:
    stem = _stem(rule, word)
    if stem is None:
        return False
    if rule.kind is RuleKind.ENDING:
        return True
    return lexicon.get(stem) == rule.i_class

def apply_rule(rule: GuessingRule, word: str, lexicon: Lexicon) -> Optional[POSClass]:
    return rule.r_class if applicable(rule, word, lexicon) else None

def tally(rule: GuessingRule, lexicon: Lexicon, freqs: FrequencyTable) -> TrialCounts:
    """Trial counts of one rule over every word known to both corpus and lexicon."""
    x = n = 0
    for word, count in freqs.counts.items():
        truth = lexicon.get(word)
        if truth is None:
            continue
        guessed = apply_rule(rule, word, lexicon)
        if guessed is None:
            continue
        n += count
        if guessed == truth:
            x += count
    return TrialCounts(x=x, n=n)

def smoothed_estimate(counts: TrialCounts) -> float:
    return (counts.x + 0.5) / (counts.n + 1)

def length_divisor(affix_length: int) -> float:
    return 1.0 + math.log10(affix_length)

def score_rule(counts: TrialCounts, affix_length: int,
               config: ScoringConfig = ScoringConfig()) -> Tuple[float, float, float]:
    """(p_hat, lower confidence limit, length-adjusted score)."""
    if affix_length < 1:
        raise ValueError('affix_length must be >= 1')
    if counts.n < config.min_trials:
        raise InsufficientTrialsError(counts.n, config.min_trials)
    p_hat = smoothed_estimate(counts)
    s_p = math.sqrt(p_hat * (1 - p_hat) / counts.n)
    lower = p_hat - config.z * s_p
    score = p_hat - config.z * s_p / length_divisor(affix_length)
    return p_hat, lower, score

def score(rule: GuessingRule, counts: TrialCounts, config: ScoringConfig = ScoringConfig(),
          merged: bool = False) -> ScoredRule:
    """Attach counts and score; rules below min_trials come back with score=None."""
    try:
        p_hat, lower, value = score_rule(counts, len(rule.affix), config)
    except InsufficientTrialsError:
        return ScoredRule(rule=rule, counts=counts, p_hat=smoothed_estimate(counts), merged=merged)
    return ScoredRule(rule=rule, counts=counts, p_hat=p_hat, lower_conf=lower,
                      score=value, merged=merged)

# Bulk tally. Rules sharing (affix, I-class) have the same compatible words,
# so each group keeps one trial count plus a Counter of the words' classes;
# a rule's x is the count for its own R-class.

GroupKey = Tuple[str, Optional[POSClass]]

_state: Dict[str, object] = {}

def _init_worker(kind: RuleKind, entries: Dict[str, POSClass], groups: frozenset, max_affix: int) -> None:
    _state.update(kind=kind, entries=entries, groups=groups, max_affix=max_affix)

def _tally_words(chunk: Sequence[Tuple[str, int]]) -> Dict[GroupKey, Tuple[int, Counter]]:
    kind: RuleKind = _state['kind']
    entries: Dict[str, POSClass] = _state['entries']
    groups: frozenset = _state['groups']
    out: Dict[GroupKey, Tuple[int, Counter]] = {}
    for word, count in chunk:
        truth = entries.get(word)
        if truth is None:
            continue
        for size in range(1, min(_state['max_affix'], len(word) - 1) + 1):
            if kind is RuleKind.PREFIX:
                affix, stem = word[:size], word[size:]
            else:
                affix, stem = word[-size:], word[:-size]
            if kind is RuleKind.ENDING:
                key = (affix, None)
            else:
                i_class = entries.get(stem)
                if i_class is None:
                    continue
                key = (affix, i_class)
            if key not in groups:
                continue
            n, classes = out.get(key, (0, None))
            if classes is None:
                classes = Counter()
            classes[truth] += count
            out[key] = (n + count, classes)
    return out

def _group_key(rule: GuessingRule) -> GroupKey:
    return (rule.affix, None if rule.kind is RuleKind.ENDING else rule.i_class)

def tally_rules(rules: Sequence[GuessingRule], lexicon: Lexicon, freqs: FrequencyTable,
                jobs: int = 1, chunk_size: int = 2000) -> List[TrialCounts]:
    """Trial counts for many rules of one kind, equal to calling tally on each."""
    if not rules:
        return []
    kinds = {r.kind for r in rules}
    if len(kinds) != 1:
        raise ValueError('tally_rules expects rules of a single kind')
    kind = kinds.pop()
    groups = frozenset(_group_key(r) for r in rules)
    max_affix = max(len(r.affix) for r in rules)
    words = sorted(freqs.counts.items())
    chunks = [words[i:i + chunk_size] for i in range(0, len(words), chunk_size)]
    init_args = (kind, lexicon.entries, groups, max_affix)
    if jobs == 1:
        _init_worker(*init_args)
        partials = map(_tally_words, chunks)
        totals = _merge_partials(partials)
    else:
        with multiprocessing.Pool(processes=jobs, initializer=_init_worker, initargs=init_args) as pool:
            totals = _merge_partials(pool.imap(_tally_words, chunks))
    out = []
    for rule in rules:
        n, classes = totals.get(_group_key(rule), (0, Counter()))
        out.append(TrialCounts(x=classes.get(rule.r_class, 0), n=n))
    return out

def _merge_partials(partials: Iterable[Dict[GroupKey, Tuple[int, Counter]]]) -> Dict[GroupKey, Tuple[int, Counter]]:
    totals: Dict[GroupKey, Tuple[int, Counter]] = defaultdict(lambda: (0, Counter()))
    for part in partials:
        for key, (n, classes) in part.items():
            tn, tc = totals[key]
            tc.update(classes)
            totals[key] = (tn + n, tc)
    return dict(totals)

def score_table(rules: Sequence[GuessingRule], lexicon: Lexicon, freqs: FrequencyTable,
                config: ScoringConfig = ScoringConfig(), jobs: int = 1) -> List[ScoredRule]:
    counts = tally_rules(rules, lexicon, freqs, jobs=jobs)
    scored = [score(r, c, config) for r, c in zip(rules, counts)]
    unscorable = sum(1 for s in scored if s.score is None)
    if unscorable:
        log.info('⚠️  %d rules have fewer than %d trials and stay unscored', unscorable, config.min_trials)
    return scored

def select(rules: Iterable[ScoredRule], theta_s: float) -> Tuple[List[ScoredRule], List[ScoredRule]]:
    """Split into (accepted, rejected); accepted rules score strictly above theta_s points."""
    accepted: List[ScoredRule] = []
    rejected: List[ScoredRule] = []
    for r in rules:
        if r.points is not None and r.points > theta_s:
            accepted.append(r)
        else:
            rejected.append(r)
    return accepted, rejected
