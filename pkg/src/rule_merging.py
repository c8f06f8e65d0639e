"""
Merging of rules that scored below the threshold.

Two rejected rules with the same kind, affix and I-class merge into one rule
whose R-class is the union of theirs: successes add up, trials stay put. The
best-scored pair of a group merges first; a merged rule that clears the
threshold joins the final set, otherwise it goes back into its group and may
merge again.
"""
from __future__ import annotations
import bisect, logging
from collections import defaultdict
from typing import Dict, Iterable, List, Tuple

import rule_scoring
from errors import MergeError
from models import GuessingRule, POSClass, RuleKind, ScoredRule, ScoringConfig, TrialCounts

log = logging.getLogger(__name__)

GroupKey = Tuple[RuleKind, str, POSClass]

def _rank(rule: ScoredRule) -> Tuple[float, int, Tuple[str, ...]]:
    # best first: higher score, then more trials, then lexicographic R-class
    value = float('-inf') if rule.score is None else rule.score
    return (-value, -rule.counts.n, rule.rule.r_class.tags)

def _group(rule: ScoredRule) -> GroupKey:
    return (rule.rule.kind, rule.rule.affix, rule.rule.i_class)

def merge_pair(r1: ScoredRule, r2: ScoredRule, config: ScoringConfig = ScoringConfig()) -> ScoredRule:
    if _group(r1) != _group(r2):
        raise MergeError(f'cannot merge {r1.rule} with {r2.rule}: kind, affix and I-class must match')
    x = r1.counts.x + r2.counts.x
    n = max(r1.counts.n, r2.counts.n)
    if x > n:
        raise MergeError(f'inconsistent counts merging {r1.rule} and {r2.rule}: x={x} > n={n}')
    rule = GuessingRule(kind=r1.rule.kind, affix=r1.rule.affix, i_class=r1.rule.i_class,
                        r_class=r1.rule.r_class.union(r2.rule.r_class), f=r1.rule.f + r2.rule.f)
    return rule_scoring.score(rule, TrialCounts(x=x, n=n), config, merged=True)

class MergePool:
    """Rejected rules grouped by (kind, affix, I-class), each group best-first."""

    def __init__(self, rejected: Iterable[ScoredRule] = (), theta_s: float = 0.0):
        self.groups: Dict[GroupKey, List[ScoredRule]] = defaultdict(list)
        for r in rejected:
            if r.points is not None and r.points > theta_s:
                raise ValueError(f'{r.rule} scores above theta_s={theta_s} and cannot be pooled')
            self.groups[_group(r)].append(r)
        for members in self.groups.values():
            members.sort(key=_rank)

    @property
    def rejected(self) -> List[ScoredRule]:
        out = [r for members in self.groups.values() for r in members]
        out.sort(key=lambda r: r.rule.sort_key())
        return out

    def __len__(self) -> int:
        return sum(len(m) for m in self.groups.values())

def merge_below_threshold(pool: MergePool, theta_s: float,
                          config: ScoringConfig = ScoringConfig()) -> List[ScoredRule]:
    """Merge within each group until fewer than two members remain.

    Returns the merged rules that cleared theta_s; `pool` keeps the rest,
    merged forms replacing their constituents.
    """
    accepted: List[ScoredRule] = []
    for key in sorted(pool.groups, key=lambda k: (k[0].value, k[1], k[2].tags)):
        members = pool.groups[key]
        while len(members) >= 2:
            best, second = members[0], members[1]
            merged = merge_pair(best, second, config)
            del members[:2]
            if merged.points is not None and merged.points > theta_s:
                log.debug('merged %s + %s -> %s accepted', best.rule, second.rule, merged.render())
                accepted.append(merged)
            else:
                ranks = [_rank(m) for m in members]
                members.insert(bisect.bisect_right(ranks, _rank(merged)), merged)
    accepted.sort(key=lambda r: r.rule.sort_key())
    return accepted

def select_and_merge(scored: Iterable[ScoredRule], theta_s: float,
                     config: ScoringConfig = ScoringConfig(),
                     merge: bool = True) -> Tuple[List[ScoredRule], List[ScoredRule]]:
    """Final (accepted, rejected) split, with merging of the rejected rules."""
    accepted, rejected = rule_scoring.select(scored, theta_s)
    if merge:
        pool = MergePool(rejected, theta_s)
        promoted = merge_below_threshold(pool, theta_s, config)
        rejected = pool.rejected
        # a merged rule can coincide with one accepted directly; keep the better score
        by_key = {r.key: r for r in accepted}
        for r in promoted:
            held = by_key.get(r.key)
            if held is None or (r.score or 0) > (held.score or 0):
                by_key[r.key] = r
        log.info('🔗 merging promoted %d rules', len(promoted))
        accepted = list(by_key.values())
        # a weak merged form of an accepted rule stays out of the rejected list
        rejected = [r for r in rejected if r.key not in by_key]
    accepted.sort(key=lambda r: r.rule.sort_key())
    rejected.sort(key=lambda r: r.rule.sort_key())
    return accepted, rejected
