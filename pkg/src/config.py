"""
Pipeline configuration: a YAML file (see seeds/fixture.yml) plus CLI overrides.
"""
from __future__ import annotations
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from errors import GuesserError
from models import PipelineConfig, RuleKind, ScoringConfig
from rule_scoring import z_from_confidence

CONFIG_ENV = 'POS_GUESSER_CONFIG'
PATH_KEYS = ('lexicon', 'frequencies', 'closed_class_tags', 'output_dir')

def load_raw(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise GuesserError(f'missing config file: {path}')
    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise GuesserError(f'{path}: not valid YAML: {e}') from e
    if not isinstance(data, dict):
        raise GuesserError(f'{path}: expected a mapping at the top level')
    # relative paths are relative to the config file
    for key in PATH_KEYS:
        if data.get(key) is not None:
            p = Path(data[key])
            data[key] = p if p.is_absolute() else path.parent / p
    return data

def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out

def load_config(path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> PipelineConfig:
    """Config file (or $POS_GUESSER_CONFIG) with overrides on top; flags win."""
    if path is None and os.getenv(CONFIG_ENV):
        path = Path(os.environ[CONFIG_ENV])
    data = load_raw(path) if path is not None else {}
    data = _merge(data, overrides or {})
    # per-kind thresholds may be given partially
    defaults = PipelineConfig().model_dump()
    for key in ('theta', 'theta_s'):
        if isinstance(data.get(key), dict):
            data[key] = {**defaults[key], **data[key]}
    return PipelineConfig(**data)

def resolved_z(config: PipelineConfig) -> float:
    if config.z is not None:
        return config.z
    if 'confidence' in config.model_fields_set:
        return z_from_confidence(config.confidence)
    return 1.65

def scoring_config(config: PipelineConfig, kind: RuleKind) -> ScoringConfig:
    return ScoringConfig(z=resolved_z(config), confidence=config.confidence,
                         theta_s=config.theta_s.for_kind(kind), min_trials=config.min_trials)

def snapshot(config: PipelineConfig) -> Dict[str, Any]:
    data = config.model_dump(mode='json')
    data['z'] = resolved_z(config)
    return data
