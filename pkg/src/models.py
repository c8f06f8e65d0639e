from __future__ import annotations
from enum import Enum
from pathlib import Path
from typing import Annotated, Dict, FrozenSet, List, Literal, NamedTuple, Optional, Tuple
from pydantic import (BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat,
                      PositiveInt, StringConstraints, field_validator, model_validator)

# Tags and words are whitespace-free tokens; tags are usually `NN`, `VBD`, `JJ`.
Tag = Annotated[str, StringConstraints(min_length=1, pattern=r'^\S+$')]
Word = Annotated[str, StringConstraints(min_length=1, pattern=r'^\S+$')]

VOID = '-'
MAX_ENDING_LENGTH = 5

class POSClass(BaseModel):
    """Canonical (sorted, deduplicated) set of POS tags."""
    model_config = ConfigDict(frozen=True)

    tags: Tuple[Tag, ...] = ()

    @field_validator('tags', mode='before')
    @classmethod
    def _canonical(cls, v):
        if isinstance(v, str):
            v = [] if v.strip() == VOID else v.split()
        return tuple(sorted(set(v)))

    @classmethod
    def of(cls, text: str) -> 'POSClass':
        return cls(tags=text)

    @property
    def is_void(self) -> bool:
        return not self.tags

    def union(self, other: 'POSClass') -> 'POSClass':
        return POSClass(tags=self.tags + other.tags)

    def intersection_size(self, other: 'POSClass') -> int:
        return len(set(self.tags) & set(other.tags))

    def __len__(self) -> int:
        return len(self.tags)

    def __contains__(self, tag: str) -> bool:
        return tag in self.tags

    def __str__(self) -> str:
        return ' '.join(self.tags) if self.tags else VOID

    def render(self) -> str:
        return f"({' '.join(self.tags)})" if self.tags else VOID

class LexiconEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    word: Word
    pos_class: POSClass

    @field_validator('pos_class')
    @classmethod
    def _non_empty(cls, v: POSClass) -> POSClass:
        if v.is_void:
            raise ValueError('lexicon entries need at least one tag')
        return v

class Lexicon(BaseModel):
    """word -> POSClass; read-only once loaded."""
    model_config = ConfigDict(frozen=True)

    entries: Dict[Word, POSClass] = Field(default_factory=dict)
    closed_class_tags: FrozenSet[Tag] = frozenset()

    def get(self, word: str) -> Optional[POSClass]:
        return self.entries.get(word)

    def words(self) -> List[str]:
        return sorted(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

class FrequencyTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    counts: Dict[Word, PositiveInt] = Field(default_factory=dict)

    def get(self, word: str, default: int = 0) -> int:
        return self.counts.get(word, default)

    def __contains__(self, word: str) -> bool:
        return word in self.counts

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def tokens(self) -> int:
        return sum(self.counts.values())

class RuleKind(str, Enum):
    PREFIX = 'prefix'
    SUFFIX = 'suffix'
    ENDING = 'ending'

    @property
    def letter(self) -> str:
        return self.value[0].upper()

class RuleKey(NamedTuple):
    kind: RuleKind
    affix: str
    i_class: POSClass
    r_class: POSClass

class GuessingRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: RuleKind
    affix: Annotated[str, StringConstraints(min_length=1)]
    i_class: POSClass = Field(default_factory=POSClass)
    r_class: POSClass
    f: NonNegativeInt = 0  # extraction frequency

    @model_validator(mode='after')
    def _check_shape(self) -> 'GuessingRule':
        if self.r_class.is_void:
            raise ValueError('R-class must not be empty')
        if self.kind is RuleKind.ENDING:
            if not self.i_class.is_void:
                raise ValueError('ending rules carry a void I-class')
            if len(self.affix) > MAX_ENDING_LENGTH:
                raise ValueError(f'ending longer than {MAX_ENDING_LENGTH}: {self.affix!r}')
        elif self.i_class.is_void:
            raise ValueError(f'{self.kind.value} rules need an I-class')
        return self

    @property
    def key(self) -> RuleKey:
        return RuleKey(self.kind, self.affix, self.i_class, self.r_class)

    def sort_key(self) -> Tuple[str, str, str]:
        return (self.affix, str(self.i_class), str(self.r_class))

    def render(self) -> str:
        return f'[{self.affix} {self.i_class.render()} {self.r_class.render()}]'

    def __str__(self) -> str:
        return self.render()

class TrialCounts(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: NonNegativeInt = 0  # successes
    n: NonNegativeInt = 0  # trials

    @model_validator(mode='after')
    def _x_le_n(self) -> 'TrialCounts':
        if self.x > self.n:
            raise ValueError(f'x={self.x} exceeds n={self.n}')
        return self

class ScoringConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    z: PositiveFloat = 1.65
    confidence: float = Field(0.90, gt=0, lt=1)  # informational; z is what gets used
    theta_s: float = Field(0.0, ge=0)  # points, 0-100 scale
    min_trials: PositiveInt = 1

class ScoredRule(BaseModel):
    """A rule with its trial counts. `score` is None for unscorable rules."""
    model_config = ConfigDict(frozen=True)

    rule: GuessingRule
    counts: TrialCounts
    p_hat: float = Field(gt=0, lt=1)
    lower_conf: Optional[float] = None
    score: Optional[float] = None
    merged: bool = False

    @property
    def key(self) -> RuleKey:
        return self.rule.key

    @property
    def kind(self) -> RuleKind:
        return self.rule.kind

    @property
    def points(self) -> Optional[float]:
        return None if self.score is None else self.score * 100.0

    def render(self) -> str:
        pts = '-' if self.score is None else f'{self.points:.2f}'
        return f'{self.rule.render()} x={self.counts.x} n={self.counts.n} score={pts}'

class WordResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    word: str
    guessed: Optional[POSClass] = None
    truth: POSClass
    weight: PositiveFloat = 1.0

class Metrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    precision: float = Field(ge=0, le=1)
    recall: float = Field(ge=0, le=1)
    coverage: float = Field(ge=0, le=1)
    n_words: NonNegativeInt
    total_weight: float = Field(ge=0)

class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: RuleKind
    theta_s: float
    metrics: Metrics
    corpus_metrics: Optional[Metrics] = None
    accepted_rule_count: NonNegativeInt

class TaggedToken(BaseModel):
    model_config = ConfigDict(frozen=True)

    token: Word
    gold_tag: Tag
    predicted_tag: Tag
    is_unknown: bool = False

    @property
    def correct(self) -> bool:
        return self.gold_tag == self.predicted_tag

class TaggingReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    total_words: NonNegativeInt
    unknown_words: NonNegativeInt
    total_mistagged: NonNegativeInt
    unknown_mistagged: NonNegativeInt
    total_score: float
    unknown_score: Optional[float] = None  # undefined without unknown tokens

class EvalInputs(BaseModel):
    """What a guesser is measured against; `lexicon` feeds stem lookups."""
    model_config = ConfigDict(frozen=True)

    lexicon: Lexicon
    eval_lexicon: Lexicon
    frequencies: Optional[FrequencyTable] = None

class PerKind(BaseModel):
    model_config = ConfigDict(frozen=True)

    prefix: float
    suffix: float
    ending: float

    def for_kind(self, kind: RuleKind) -> float:
        return getattr(self, kind.value)

class PerKindCount(BaseModel):
    model_config = ConfigDict(frozen=True)

    prefix: PositiveInt
    suffix: PositiveInt
    ending: PositiveInt

    def for_kind(self, kind: RuleKind) -> int:
        return getattr(self, kind.value)

class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    lexicon: Optional[Path] = None
    frequencies: Optional[Path] = None
    closed_class_tags: Optional[Path] = None
    output_dir: Path = Path('dist')
    theta: PerKindCount = PerKindCount(prefix=3, suffix=3, ending=3)
    theta_s: PerKind = PerKind(prefix=80, suffix=60, ending=75)
    z: Optional[PositiveFloat] = None
    confidence: float = Field(0.90, gt=0, lt=1)
    min_trials: PositiveInt = 1
    max_ending_length: int = Field(MAX_ENDING_LENGTH, ge=1, le=MAX_ENDING_LENGTH)
    min_word_length: PositiveInt = 5
    sweep_grid: List[float] = Field(default_factory=lambda: [50.0 + 5 * i for i in range(10)])
    selection_policy: Literal['f_coverage', 'precision', 'f1'] = 'f_coverage'
    merge: bool = True
    sweep_merge: bool = False
    jobs: PositiveInt = 1

    @model_validator(mode='after')
    def _thresholds(self) -> 'PipelineConfig':
        for kind in RuleKind:
            if self.theta_s.for_kind(kind) < 0:
                raise ValueError(f'theta_s for {kind.value} must be >= 0')
        return self

class RunManifest(BaseModel):
    config: Dict[str, object]
    inputs: Dict[str, str]  # path -> sha256
    artifacts: List[str]
    rule_counts: Dict[str, Dict[str, int]]
