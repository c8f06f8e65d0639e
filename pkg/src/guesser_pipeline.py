#!/usr/bin/env python3
"""
Guessing-rule pipeline: induce -> score -> select (+merge) -> eval, plus
sweep, guess, tag-eval and small-lexicon. Every command reads and checks all
of its inputs before it writes anything into the output directory.

    python3 src/guesser_pipeline.py pipeline --config seeds/fixture.yml
    python3 src/guesser_pipeline.py guess --config seeds/fixture.yml --fallback < words.txt
"""
from __future__ import annotations
import argparse, hashlib, io, logging, os, sys
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import orjson
from pydantic import ValidationError

import config as cfg
import evaluation
import rule_induction
import rule_merging
import rule_scoring
import rules_io
from errors import EmptyInputError, GuesserError, MissingArtifactError
from guesser import CascadingGuesser, RuleSet, build_cascade, guess_batch
from lexicon_io import (dump_lexicon, filter_for_evaluation, known_word_lexicon,
                        load_closed_class_tags, load_frequencies, load_lexicon)
from models import (EvalInputs, FrequencyTable, GuessingRule, Lexicon, PipelineConfig,
                    RuleKind, RunManifest, ScoredRule)

log = logging.getLogger('guesser_pipeline')

KINDS = (RuleKind.PREFIX, RuleKind.SUFFIX, RuleKind.ENDING)
DEFAULT_CASCADES = ('P', 'S', 'E', 'P+E', 'S+E', 'P+S+E')

# artifacts

def rules_path(config: PipelineConfig, stage: str, kind: RuleKind) -> Path:
    return config.output_dir / f'{stage}.{kind.value}.tsv'

PRODUCERS = {'rules': 'induce', 'scored': 'score', 'final': 'select'}

def _require(path: Optional[Path], what: str) -> Path:
    if path is None:
        raise GuesserError(f'no {what} configured (set it in the config file or pass a flag)')
    return path

def _read_text(path: Path) -> TextIO:
    return open(path, 'r', encoding='utf-8', newline='')

def commit(files: Dict[Path, str]) -> List[Path]:
    """Write every output at once, each through a temp file."""
    written = []
    for path, text in files.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + '.tmp')
        with open(tmp, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp, path)
        written.append(path)
        log.info('✅ wrote %s', path)
    return written

def rules_text(rules: Iterable, audit: bool = False) -> str:
    buf = io.StringIO()
    rules_io.write_rules(rules, buf, audit=audit)
    return buf.getvalue()

# inputs

def load_training(config: PipelineConfig) -> Lexicon:
    closed = frozenset()
    if config.closed_class_tags is not None:
        with _read_text(config.closed_class_tags) as f:
            closed = load_closed_class_tags(f)
    with _read_text(_require(config.lexicon, 'lexicon')) as f:
        lexicon = load_lexicon(f, closed)
    log.info('📖 lexicon: %d entries, %d closed-class tags', len(lexicon), len(closed))
    return lexicon

def load_freqs(path: Optional[Path]) -> FrequencyTable:
    with _read_text(_require(path, 'frequency table')) as f:
        freqs = load_frequencies(f)
    log.info('📊 frequencies: %d words, %d tokens', len(freqs), freqs.tokens)
    return freqs

def read_stage(config: PipelineConfig, stage: str, kind: RuleKind) -> List:
    path = rules_path(config, stage, kind)
    if not path.exists():
        raise MissingArtifactError(path, PRODUCERS[stage])
    with _read_text(path) as f:
        return rules_io.read_rules(f, cfg.scoring_config(config, kind), kind=kind)

def eval_inputs(config: PipelineConfig, lexicon: Lexicon, eval_lexicon: Optional[Path] = None,
                eval_frequencies: Optional[Path] = None) -> EvalInputs:
    source, freqs_path = lexicon, eval_frequencies or config.frequencies
    if eval_lexicon is not None:
        with _read_text(eval_lexicon) as f:
            source = load_lexicon(f, lexicon.closed_class_tags)
        # training frequencies say nothing about held-out words
        freqs_path = eval_frequencies
    freqs = load_freqs(freqs_path) if freqs_path is not None else None
    return EvalInputs(lexicon=lexicon, frequencies=freqs,
                      eval_lexicon=filter_for_evaluation(source, config.min_word_length))

# commands

def induce_rules(config: PipelineConfig, lexicon: Lexicon,
                 kinds: Sequence[RuleKind] = KINDS) -> Dict[RuleKind, List[GuessingRule]]:
    if not len(lexicon):
        raise EmptyInputError('the lexicon is empty; nothing to induce')
    return {kind: rule_induction.induce(lexicon, kind, config.theta.for_kind(kind),
                                        config.max_ending_length).rules()
            for kind in kinds}

def cmd_induce(config: PipelineConfig, kinds: Sequence[RuleKind] = KINDS) -> Dict[RuleKind, List[GuessingRule]]:
    tables = induce_rules(config, load_training(config), kinds)
    commit({rules_path(config, 'rules', k): rules_text(r) for k, r in tables.items()})
    return tables

def score_rules(config: PipelineConfig, tables: Dict[RuleKind, List[GuessingRule]],
                lexicon: Lexicon, freqs: FrequencyTable) -> Dict[RuleKind, List[ScoredRule]]:
    out = {}
    for kind, rules in tables.items():
        out[kind] = rule_scoring.score_table(rules, lexicon, freqs, cfg.scoring_config(config, kind),
                                             jobs=config.jobs)
        log.info('🧮 scored %d %s rules', len(out[kind]), kind.value)
    return out

def cmd_score(config: PipelineConfig, kinds: Sequence[RuleKind] = KINDS) -> Dict[RuleKind, List[ScoredRule]]:
    tables = {k: read_stage(config, 'rules', k) for k in kinds}
    lexicon, freqs = load_training(config), load_freqs(config.frequencies)
    scored = score_rules(config, tables, lexicon, freqs)
    commit({rules_path(config, 'scored', k): rules_text(r) for k, r in scored.items()})
    return scored

def select_rules(config: PipelineConfig, scored: Dict[RuleKind, List[ScoredRule]]
                 ) -> Dict[RuleKind, Tuple[List[ScoredRule], List[ScoredRule]]]:
    out = {}
    for kind, rules in scored.items():
        theta_s = config.theta_s.for_kind(kind)
        accepted, rejected = rule_merging.select_and_merge(
            rules, theta_s, cfg.scoring_config(config, kind), merge=config.merge)
        log.info('🏁 %s: %d accepted over %g points, %d rejected',
                 kind.value, len(accepted), theta_s, len(rejected))
        out[kind] = (accepted, rejected)
    return out

def cmd_select(config: PipelineConfig, kinds: Sequence[RuleKind] = KINDS):
    scored = {k: read_stage(config, 'scored', k) for k in kinds}
    selected = select_rules(config, scored)
    files = {}
    for kind, (accepted, rejected) in selected.items():
        files[rules_path(config, 'final', kind)] = rules_text(accepted, audit=True)
        files[rules_path(config, 'rejected', kind)] = rules_text(rejected, audit=True)
    commit(files)
    return selected

def cmd_sweep(config: PipelineConfig, kinds: Sequence[RuleKind] = KINDS,
              grid: Optional[Sequence[float]] = None) -> Dict[RuleKind, List]:
    grid = list(grid or config.sweep_grid)
    scored = {k: read_stage(config, 'scored', k) for k in kinds}
    inputs = eval_inputs(config, load_training(config))
    files, out = {}, {}
    for kind in kinds:
        rows = evaluation.threshold_sweep(scored[kind], grid, inputs,
                                          cfg.scoring_config(config, kind), merge=config.sweep_merge)
        best = evaluation.select_best_row(rows, config.selection_policy)
        log.info('🎯 %s: best theta_s=%g by %s', kind.value, best.theta_s, config.selection_policy)
        table = evaluation.sweep_rows(rows)
        tsv = io.StringIO()
        evaluation.write_tsv(evaluation.SWEEP_HEADERS, table, tsv)
        files[config.output_dir / f'sweep.{kind.value}.tsv'] = tsv.getvalue()
        files[config.output_dir / f'sweep.{kind.value}.txt'] = evaluation.render_table(evaluation.SWEEP_HEADERS, table)
        out[kind] = rows
    commit(files)
    return out

def load_stages(config: PipelineConfig, extra: Sequence[str] = ()) -> Dict[str, RuleSet]:
    stages = {kind.letter: RuleSet(kind, read_stage(config, 'final', kind), kind.letter) for kind in KINDS}
    for item in extra:
        name, _, path = item.partition('=')
        if not name or not path:
            raise GuesserError(f'--stage expects NAME=PATH, got {item!r}')
        with _read_text(Path(path)) as f:
            rules = rules_io.as_scored(rules_io.read_rules(f))
        kinds = {r.kind for r in rules}
        if len(kinds) != 1:
            raise GuesserError(f'{path}: a stage needs rules of exactly one kind')
        stages[name] = RuleSet(kinds.pop(), rules, name)
    return stages

def evaluate_cascades(config: PipelineConfig, stages: Dict[str, RuleSet], inputs: EvalInputs,
                      cascades: Sequence[str]) -> Dict[Path, str]:
    results = evaluation.cascade_experiments(stages, cascades, inputs)
    table = evaluation.metrics_rows(results)
    tsv = io.StringIO()
    evaluation.write_tsv(evaluation.METRIC_HEADERS, table, tsv)
    text = evaluation.render_table(evaluation.METRIC_HEADERS, table)
    print(text, end='')
    return {config.output_dir / 'metrics.tsv': tsv.getvalue(),
            config.output_dir / 'metrics.txt': text}

def cmd_eval(config: PipelineConfig, cascades: Sequence[str] = DEFAULT_CASCADES, extra: Sequence[str] = (),
             eval_lexicon: Optional[Path] = None, eval_frequencies: Optional[Path] = None) -> Dict[Path, str]:
    stages = load_stages(config, extra)
    inputs = eval_inputs(config, load_training(config), eval_lexicon, eval_frequencies)
    files = evaluate_cascades(config, stages, inputs, cascades)
    commit(files)
    return files

def build_from_artifacts(config: PipelineConfig, cascade: str = 'P+S+E', extra: Sequence[str] = ()) -> CascadingGuesser:
    stages = load_stages(config, extra)
    names = [n for n in cascade.split('+') if n]
    missing = [n for n in names if n not in stages]
    if missing:
        raise GuesserError(f'unknown stage(s) {missing}; have {sorted(stages)}')
    return build_cascade([stages[n] for n in names], load_training(config))

def cmd_guess(config: PipelineConfig, words: TextIO, sink: TextIO, fallback: bool = False,
              cascade: str = 'P+S+E', extra: Sequence[str] = ()) -> int:
    guesser = build_from_artifacts(config, cascade, extra)
    count = guess_batch(guesser, words, sink, fallback=fallback)
    log.info('🔮 guessed %d words with %s', count, guesser.name)
    return count

def cmd_tag_eval(config: PipelineConfig, tagged: Path, lexicon: Optional[Path] = None):
    known = None
    if lexicon is not None:
        with _read_text(lexicon) as f:
            known = load_lexicon(f)
    with _read_text(tagged) as f:
        tokens = evaluation.read_tagged(f, known)
    report = evaluation.tagging_report(tokens)
    print(evaluation.render_table(evaluation.TAGGING_HEADERS, evaluation.tagging_rows(report)), end='')
    if report.unknown_score is None:
        log.info('⚠️  no unknown tokens; unknown score is undefined')
    return report

def cmd_small_lexicon(config: PipelineConfig, out: Path) -> Lexicon:
    small = known_word_lexicon(load_training(config), config.min_word_length)
    buf = io.StringIO()
    dump_lexicon(small, buf)
    commit({out: buf.getvalue()})
    return small

def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()

def cmd_pipeline(config: PipelineConfig, cascades: Sequence[str] = DEFAULT_CASCADES) -> RunManifest:
    lexicon = load_training(config)
    freqs = load_freqs(config.frequencies)
    inputs = eval_inputs(config, lexicon)
    tables = induce_rules(config, lexicon)
    scored = score_rules(config, tables, lexicon, freqs)
    selected = select_rules(config, scored)

    files: Dict[Path, str] = {}
    for kind in KINDS:
        accepted, rejected = selected[kind]
        files[rules_path(config, 'rules', kind)] = rules_text(tables[kind])
        files[rules_path(config, 'scored', kind)] = rules_text(scored[kind])
        files[rules_path(config, 'final', kind)] = rules_text(accepted, audit=True)
        files[rules_path(config, 'rejected', kind)] = rules_text(rejected, audit=True)
    stages = {k.letter: RuleSet(k, selected[k][0], k.letter) for k in KINDS}
    files.update(evaluate_cascades(config, stages, inputs, cascades))

    sources = [p for p in (config.lexicon, config.frequencies, config.closed_class_tags) if p is not None]
    manifest = RunManifest(
        config=cfg.snapshot(config),
        inputs={str(p): _sha256(p) for p in sources},
        artifacts=sorted(p.name for p in files),
        rule_counts={k.value: {'induced': len(tables[k]), 'accepted': len(selected[k][0]),
                               'rejected': len(selected[k][1])} for k in KINDS},
    )
    manifest_path = config.output_dir / 'manifest.json'
    files[manifest_path] = orjson.dumps(manifest.model_dump(mode='json'),
                                        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS).decode() + '\n'
    commit(files)
    return manifest

# command line

def _kinds(text: Optional[str]) -> Sequence[RuleKind]:
    if not text:
        return KINDS
    return [RuleKind(k.strip()) for k in text.split(',')]

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Induce, score and apply POS guessing rules for unknown words')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help=f'YAML config (default: ${cfg.CONFIG_ENV})')
    common.add_argument('--lexicon', type=Path)
    common.add_argument('--frequencies', type=Path)
    common.add_argument('--closed-class', dest='closed_class_tags', type=Path)
    common.add_argument('--output-dir', type=Path)
    for kind in KINDS:
        common.add_argument(f'--theta-{kind.value}', type=int, help=f'min extraction frequency for {kind.value} rules')
        common.add_argument(f'--theta-s-{kind.value}', type=float, help=f'score threshold (points) for {kind.value} rules')
    common.add_argument('--z', type=float)
    common.add_argument('--confidence', type=float, help='derive z from a confidence level when --z is not set')
    common.add_argument('--min-trials', type=int)
    common.add_argument('--max-ending-length', type=int)
    common.add_argument('--min-word-length', type=int)
    common.add_argument('--policy', dest='selection_policy', choices=sorted(evaluation.POLICIES))
    common.add_argument('--no-merge', action='store_true', help='skip merging of rejected rules')
    common.add_argument('--jobs', type=int, help='worker processes for scoring')
    common.add_argument('--kinds', help='comma-separated subset of prefix,suffix,ending')
    common.add_argument('-v', '--verbose', action='store_true')
    common.add_argument('-q', '--quiet', action='store_true')

    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('induce', parents=[common], help='extract and frequency-filter rules')
    sub.add_parser('score', parents=[common], help='tally and score induced rules')
    sub.add_parser('select', parents=[common], help='apply theta_s and merge rejected rules')
    p = sub.add_parser('sweep', parents=[common], help='evaluate a grid of score thresholds')
    p.add_argument('--grid', help='start:stop:step or comma list of points')
    p.add_argument('--sweep-merge', action='store_true', help='merge rejected rules at each threshold too')
    for name in ('eval', 'pipeline'):
        p = sub.add_parser(name, parents=[common], help='evaluate cascades' if name == 'eval' else 'induce..eval in one run')
        p.add_argument('--cascade', action='append', help='stage order like P+S+E (repeatable)')
        if name == 'eval':
            p.add_argument('--stage', action='append', default=[], help='extra stage NAME=rules.tsv')
            p.add_argument('--eval-lexicon', type=Path, help='held-out lexicon to evaluate on')
            p.add_argument('--eval-frequencies', type=Path)
    p = sub.add_parser('guess', parents=[common], help='guess classes for words read from stdin or --input')
    p.add_argument('--input', type=Path)
    p.add_argument('--fallback', action='store_true', help='NN/NP fallback for unguessable words')
    p.add_argument('--cascade', default='P+S+E')
    p.add_argument('--stage', action='append', default=[])
    p = sub.add_parser('tag-eval', parents=[common], help='Total/Unknown scores of tagged text')
    p.add_argument('tagged', type=Path)
    p.add_argument('--known', type=Path, help='lexicon deciding which tokens are unknown')
    p = sub.add_parser('small-lexicon', parents=[common], help='keep only closed-class and short words')
    p.add_argument('out', type=Path)
    return parser

def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides = {key: getattr(args, key) for key in
                 ('lexicon', 'frequencies', 'closed_class_tags', 'output_dir', 'z', 'confidence',
                  'min_trials', 'max_ending_length', 'min_word_length', 'selection_policy', 'jobs')}
    overrides['theta'] = {k.value: getattr(args, f'theta_{k.value}') for k in KINDS
                          if getattr(args, f'theta_{k.value}') is not None}
    overrides['theta_s'] = {k.value: getattr(args, f'theta_s_{k.value}') for k in KINDS
                            if getattr(args, f'theta_s_{k.value}') is not None}
    if args.no_merge:
        overrides['merge'] = False
    if getattr(args, 'sweep_merge', False):
        overrides['sweep_merge'] = True
    return cfg.load_config(args.config, overrides)

def run(args: argparse.Namespace) -> None:
    config = config_from_args(args)
    kinds = _kinds(args.kinds)
    if args.command == 'induce':
        cmd_induce(config, kinds)
    elif args.command == 'score':
        cmd_score(config, kinds)
    elif args.command == 'select':
        cmd_select(config, kinds)
    elif args.command == 'sweep':
        cmd_sweep(config, kinds, evaluation.parse_grid(args.grid) if args.grid else None)
    elif args.command == 'eval':
        cmd_eval(config, args.cascade or DEFAULT_CASCADES, args.stage, args.eval_lexicon, args.eval_frequencies)
    elif args.command == 'pipeline':
        cmd_pipeline(config, args.cascade or DEFAULT_CASCADES)
    elif args.command == 'guess':
        if args.input is not None:
            with _read_text(args.input) as words:
                cmd_guess(config, words, sys.stdout, args.fallback, args.cascade, args.stage)
        else:
            cmd_guess(config, sys.stdin, sys.stdout, args.fallback, args.cascade, args.stage)
    elif args.command == 'tag-eval':
        cmd_tag_eval(config, args.tagged, args.known)
    elif args.command == 'small-lexicon':
        cmd_small_lexicon(config, args.out)

def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(message)s', stream=sys.stderr, force=True)
    try:
        run(args)
    except MissingArtifactError as e:
        print(f'❌ {e}', file=sys.stderr)
        return 2
    except (GuesserError, ValidationError, ValueError) as e:
        print(f'❌ {e}', file=sys.stderr)
        return 1
    except OSError as e:
        print(f'❌ {e}', file=sys.stderr)
        return 2
    return 0

if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        sys.exit(130)
