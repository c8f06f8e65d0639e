from __future__ import annotations
from typing import Optional

class GuesserError(Exception):
    """Base for every validation-type failure the pipeline reports (exit 1)."""

class ParseError(GuesserError):
    def __init__(self, message: str, source: str = '<input>', line: Optional[int] = None):
        self.message = message
        self.source = source
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.source if self.line is None else f'{self.source}:{self.line}'
        return f'{where}: {self.message}'

class EmptyInputError(GuesserError):
    pass

class InsufficientTrialsError(GuesserError):
    def __init__(self, n: int, min_trials: int):
        self.n = n
        self.min_trials = min_trials
        super().__init__(f'insufficient trials: n={n} < min_trials={min_trials}')

class MergeError(GuesserError):
    pass

class GuesserBuildError(GuesserError):
    pass

class MissingArtifactError(GuesserError):
    def __init__(self, path, producer: str):
        self.path = path
        self.producer = producer
        super().__init__(f'missing {path}; run `{producer}` first')
