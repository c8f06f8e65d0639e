"""
Guesser evaluation.

Word precision and recall are averaged over covered words only, weighted by 1
(lexicon mode) or by corpus frequency (corpus mode); coverage is the weight
share of words that got any guess. No NN/NP fallback is applied here.
"""
from __future__ import annotations
import logging, math
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

from tabulate import tabulate

from errors import EmptyInputError, ParseError
from guesser import CascadingGuesser, RuleSet, build_cascade, guess
from models import (EvalInputs, FrequencyTable, Lexicon, Metrics, POSClass, RuleKind,
                    ScoredRule, ScoringConfig, SweepRow, TaggedToken, TaggingReport, WordResult)
from rule_merging import select_and_merge

log = logging.getLogger(__name__)

def word_metrics(guessed: POSClass, truth: POSClass) -> Tuple[float, float]:
    if guessed.is_void:
        raise ValueError('empty guess: account for it as not covered')
    if truth.is_void:
        raise ValueError('empty truth class')
    hits = guessed.intersection_size(truth)
    return hits / len(guessed), hits / len(truth)

def _as_guesser(target: Union[CascadingGuesser, RuleSet], lexicon: Optional[Lexicon]) -> CascadingGuesser:
    if isinstance(target, CascadingGuesser):
        return target
    if lexicon is None:
        raise ValueError('a bare rule-set needs the training lexicon for stem lookups')
    return build_cascade([target], lexicon)

def word_results(target: Union[CascadingGuesser, RuleSet], eval_lexicon: Lexicon,
                 freqs: Optional[FrequencyTable] = None,
                 lexicon: Optional[Lexicon] = None) -> List[WordResult]:
    guesser = _as_guesser(target, lexicon)
    out = []
    for word in eval_lexicon.words():
        if freqs is None:
            weight = 1
        else:
            weight = freqs.get(word)
            if not weight:
                continue
        out.append(WordResult(word=word, guessed=guess(guesser, word),
                              truth=eval_lexicon.entries[word], weight=weight))
    return out

def aggregate(results: Sequence[WordResult]) -> Metrics:
    if not results:
        raise EmptyInputError('nothing to evaluate')
    total = math.fsum(r.weight for r in results)
    covered = [r for r in results if r.guessed is not None and not r.guessed.is_void]
    covered_weight = math.fsum(r.weight for r in covered)
    if covered_weight:
        pairs = [(r.weight, word_metrics(r.guessed, r.truth)) for r in covered]
        precision = math.fsum(w * p for w, (p, _) in pairs) / covered_weight
        recall = math.fsum(w * rc for w, (_, rc) in pairs) / covered_weight
    else:
        precision = recall = 0.0
    return Metrics(precision=min(precision, 1.0), recall=min(recall, 1.0),
                   coverage=covered_weight / total, n_words=len(results), total_weight=total)

def evaluate(target: Union[CascadingGuesser, RuleSet], eval_lexicon: Lexicon,
             freqs: Optional[FrequencyTable] = None, lexicon: Optional[Lexicon] = None) -> Metrics:
    return aggregate(word_results(target, eval_lexicon, freqs, lexicon))

def evaluate_both(target: Union[CascadingGuesser, RuleSet],
                  inputs: EvalInputs) -> Tuple[Metrics, Optional[Metrics]]:
    """(lexicon metrics, corpus metrics or None without frequencies)."""
    lex = evaluate(target, inputs.eval_lexicon, None, inputs.lexicon)
    corpus = None
    if inputs.frequencies is not None:
        corpus = evaluate(target, inputs.eval_lexicon, inputs.frequencies, inputs.lexicon)
    return lex, corpus

def parse_grid(text: str) -> List[float]:
    """`50:95:5` (inclusive range) or `60,75,80`."""
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(f'grid range must be start:stop:step, got {text!r}')
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f'bad grid range {text!r}')
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(p) for p in text.split(',') if p.strip()]

def nested_selections(scored: Sequence[ScoredRule], grid: Sequence[float],
                       config: ScoringConfig = ScoringConfig(), merge: bool = False) -> List[List[ScoredRule]]:
    """Accepted rules at each point of an ascending grid.

    With merging, a higher threshold can promote a merged rule the lower one
    never accepted; such rules are dropped so each set is a subset of the one
    before it.
    """
    if not grid:
        raise ValueError('empty threshold grid')
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError('threshold grid must be ascending')
    out: List[List[ScoredRule]] = []
    allowed = None
    for theta_s in grid:
        accepted, _ = select_and_merge(scored, theta_s, config, merge=merge)
        if allowed is not None:
            dropped = [r for r in accepted if r.key not in allowed]
            if dropped:
                log.debug('θs=%g: %d merged rules not accepted below, dropped', theta_s, len(dropped))
                accepted = [r for r in accepted if r.key in allowed]
        allowed = {r.key for r in accepted}
        out.append(accepted)
    return out

def threshold_sweep(scored: Sequence[ScoredRule], grid: Sequence[float], inputs: EvalInputs,
                    config: ScoringConfig = ScoringConfig(), merge: bool = False) -> List[SweepRow]:
    kinds = {r.kind for r in scored}
    if len(kinds) > 1:
        raise ValueError('sweep one rule kind at a time')
    kind = kinds.pop() if kinds else RuleKind.ENDING
    rows = []
    for theta_s, accepted in zip(grid, nested_selections(scored, grid, config, merge)):
        lex, corpus = evaluate_both(RuleSet(kind, accepted), inputs)
        rows.append(SweepRow(kind=kind, theta_s=theta_s, metrics=lex, corpus_metrics=corpus,
                             accepted_rule_count=len(accepted)))
        log.debug('θs=%g: %d rules, P=%.4f R=%.4f C=%.4f', theta_s, len(accepted),
                  lex.precision, lex.recall, lex.coverage)
    return rows

def _f1(m: Metrics) -> float:
    return 0.0 if m.precision + m.recall == 0 else 2 * m.precision * m.recall / (m.precision + m.recall)

POLICIES: Dict[str, Callable[[Metrics], float]] = {
    'f_coverage': lambda m: _f1(m) * m.coverage,
    'precision': lambda m: m.precision,
    'f1': _f1,
}

def select_best_row(rows: Sequence[SweepRow], policy: str = 'f_coverage', corpus: bool = False) -> SweepRow:
    """Best row under `policy`; ties go to the lower threshold."""
    if not rows:
        raise EmptyInputError('no sweep rows')
    measure = POLICIES[policy]
    def value(row: SweepRow) -> float:
        m = row.corpus_metrics if corpus and row.corpus_metrics is not None else row.metrics
        return measure(m)
    return max(rows, key=lambda r: (value(r), -r.theta_s))

def cascade_experiments(stages: Dict[str, RuleSet], orders: Iterable[str],
                        inputs: EvalInputs) -> List[Tuple[str, Metrics, Optional[Metrics]]]:
    """Evaluate cascades named like `P+S+E` (or any `+`-joined stage names)."""
    out = []
    for order in orders:
        names = [n for n in order.split('+') if n]
        missing = [n for n in names if n not in stages]
        if missing:
            raise ValueError(f'unknown stage(s) {missing} in {order!r}; have {sorted(stages)}')
        guesser = build_cascade([stages[n] for n in names], inputs.lexicon)
        lex, corpus = evaluate_both(guesser, inputs)
        out.append((order, lex, corpus))
    return out

# tagging accuracy from externally tagged text

def read_tagged(source: TextIO, lexicon: Optional[Lexicon] = None) -> List[TaggedToken]:
    """`token<TAB>gold<TAB>predicted[<TAB>U]`, blank lines between sentences.

    With a lexicon a token is unknown iff it is missing from it; otherwise
    the `U` flag decides.
    """
    name = str(getattr(source, 'name', '<tagged>'))
    tokens = []
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip('\r\n')
        if not line.strip() or line.startswith('#'):
            continue
        cols = line.split('\t')
        if len(cols) not in (3, 4) or not all(c.strip() for c in cols[:3]):
            raise ParseError('expected token<TAB>gold<TAB>predicted[<TAB>U]', name, lineno)
        if len(cols) == 4 and cols[3].strip() not in ('U', ''):
            raise ParseError(f'unknown flag {cols[3]!r}', name, lineno)
        flagged = len(cols) == 4 and cols[3].strip() == 'U'
        unknown = (cols[0] not in lexicon) if lexicon is not None else flagged
        tokens.append(TaggedToken(token=cols[0], gold_tag=cols[1].strip(),
                                  predicted_tag=cols[2].strip(), is_unknown=unknown))
    return tokens

def tagging_report(tokens: Sequence[TaggedToken]) -> TaggingReport:
    if not tokens:
        raise EmptyInputError('no tagged tokens')
    unknown = [t for t in tokens if t.is_unknown]
    total_wrong = sum(1 for t in tokens if not t.correct)
    unknown_wrong = sum(1 for t in unknown if not t.correct)
    return TaggingReport(
        total_words=len(tokens), unknown_words=len(unknown),
        total_mistagged=total_wrong, unknown_mistagged=unknown_wrong,
        total_score=(len(tokens) - total_wrong) / len(tokens),
        unknown_score=(len(unknown) - unknown_wrong) / len(unknown) if unknown else None,
    )

def tagging_scores(tokens: Sequence[TaggedToken]) -> Tuple[float, Optional[float]]:
    report = tagging_report(tokens)
    return report.total_score, report.unknown_score

# rendering

def _fmt(v: Optional[float]) -> str:
    return '-' if v is None else f'{v:.6f}'

METRIC_HEADERS = ['strategy', 'test', 'precision', 'recall', 'coverage', 'words']

def metrics_rows(results: Iterable[Tuple[str, Metrics, Optional[Metrics]]]) -> List[List[str]]:
    rows = []
    for name, lex, corpus in results:
        for test, m in (('lexicon', lex), ('corpus', corpus)):
            if m is not None:
                rows.append([name, test, _fmt(m.precision), _fmt(m.recall), _fmt(m.coverage), str(m.n_words)])
    return rows

SWEEP_HEADERS = ['kind', 'theta_s', 'rules', 'precision', 'recall', 'coverage',
                 'corpus_precision', 'corpus_recall', 'corpus_coverage']

def sweep_rows(rows: Iterable[SweepRow]) -> List[List[str]]:
    out = []
    for r in rows:
        c = r.corpus_metrics
        out.append([r.kind.value, f'{r.theta_s:g}', str(r.accepted_rule_count),
                    _fmt(r.metrics.precision), _fmt(r.metrics.recall), _fmt(r.metrics.coverage),
                    _fmt(c and c.precision), _fmt(c and c.recall), _fmt(c and c.coverage)])
    return out

TAGGING_HEADERS = ['total words', 'unknown words', 'total mistagged', 'unknown mistagged',
                   'total score', 'unknown score']

def tagging_rows(report: TaggingReport) -> List[List[str]]:
    pct = lambda v: '-' if v is None else f'{v * 100:.1f}%'
    return [[str(report.total_words), str(report.unknown_words), str(report.total_mistagged),
             str(report.unknown_mistagged), pct(report.total_score), pct(report.unknown_score)]]

def render_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    return tabulate(rows, headers=list(headers), tablefmt='simple', disable_numparse=True) + '\n'

def write_tsv(headers: Sequence[str], rows: Sequence[Sequence[str]], sink: TextIO) -> None:
    sink.write('\t'.join(headers) + '\n')
    for row in rows:
        sink.write('\t'.join(row) + '\n')
