"""Experiment configuration: schema, validation, and shipped presets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import jsonschema

KINDS = (
    "identity-suite",
    "basic-lemma-fuzz",
    "curve-frames",
    "expansion-ladder",
    "equidistribution",
    "escape",
    "dirichlet-scan",
)

VARIANTS: Dict[str, Tuple[str, ...]] = {
    "identity-suite": (),
    "basic-lemma-fuzz": ("parts", "sl2"),
    "curve-frames": (),
    "expansion-ladder": ("certification", "vandermonde", "bounded-fixed", "qfixed"),
    "equidistribution": (),
    "escape": (),
    "dirichlet-scan": (),
}

STOCHASTIC_KINDS = (
    "basic-lemma-fuzz",
    "expansion-ladder",
    "equidistribution",
    "dirichlet-scan",
)

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "variant": {"type": "string"},
        "description": {"type": "string"},
        "n": {"type": "integer", "minimum": 1, "maximum": 6},
        "modules": {
            "type": "array",
            "items": {"type": "string"},
            "minItems": 1,
        },
        "schedule": {"type": "string"},
        "curve": {"type": "string"},
        "t_ladder": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 1,
        },
        "interval": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
        "samples": {
            "oneOf": [
                {"type": "integer", "minimum": 1},
                {
                    "type": "object",
                    "additionalProperties": {"type": "integer", "minimum": 1},
                },
            ]
        },
        "seed": {"type": "integer", "minimum": 0},
        "out": {"type": "string"},
        "test_hooks": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "corrupt_sk_predicate": {"type": "boolean"},
            },
        },
    },
}


class ConfigError(ValueError):
    """Configuration rejected; message carries the schema diagnostics."""


@dataclass(frozen=True)
class TestHooks:
    corrupt_sk_predicate: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, normalised experiment description."""

    kind: str
    variant: str
    n: Optional[int]
    modules: Tuple[str, ...]
    schedule: Optional[str]
    curve: Optional[str]
    t_ladder: Tuple[float, ...]
    interval: Optional[Tuple[float, float]]
    samples: Union[int, Dict[str, int], None]
    seed: Optional[int]
    out: Optional[str]
    description: str
    test_hooks: TestHooks
    raw: Dict = field(repr=False)


def validate_config(raw: Dict) -> ExperimentConfig:
    """Schema-check a raw mapping and normalise it.

    Unknown keys, bad types, unknown variants, and a missing seed on a
    stochastic kind are all rejected with a diagnostic message.
    """
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config rejected at {path}: {exc.message}") from exc

    kind = raw["kind"]
    allowed = VARIANTS[kind]
    variant = raw.get("variant", allowed[0] if allowed else "")
    if allowed and variant not in allowed:
        raise ConfigError(
            f"config rejected at variant: {variant!r} is not one of {sorted(allowed)}"
        )
    if not allowed and "variant" in raw:
        raise ConfigError(f"config rejected at variant: {kind} takes no variant")
    if kind in STOCHASTIC_KINDS and "seed" not in raw:
        raise ConfigError(f"config rejected at seed: mandatory for kind {kind}")

    interval = raw.get("interval")
    return ExperimentConfig(
        kind=kind,
        variant=variant,
        n=raw.get("n"),
        modules=tuple(raw.get("modules", ())),
        schedule=raw.get("schedule"),
        curve=raw.get("curve"),
        t_ladder=tuple(float(t) for t in raw.get("t_ladder", ())),
        interval=(float(interval[0]), float(interval[1])) if interval else None,
        samples=raw.get("samples"),
        seed=raw.get("seed"),
        out=raw.get("out"),
        description=raw.get("description", ""),
        test_hooks=TestHooks(**raw.get("test_hooks", {})),
        raw=dict(raw),
    )


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return validate_config(raw)


# -- shipped presets -----------------------------------------------------------------


def presets_dir() -> Path:
    return Path(__file__).resolve().parent / "presets"


def preset_path(name: str) -> Path:
    p = presets_dir() / f"{name}.json"
    if not p.exists():
        known = ", ".join(sorted(q.stem for q in presets_dir().glob("*.json")))
        raise ConfigError(f"unknown preset {name!r}; shipped presets: {known}")
    return p


def resolve_config(spec: Union[str, Path]) -> ExperimentConfig:
    """Accept either a config file path or a shipped preset name."""
    p = Path(spec)
    if p.exists():
        return load_config(p)
    return load_config(preset_path(str(spec)))


def list_presets() -> List[Tuple[str, str]]:
    out = []
    for p in sorted(presets_dir().glob("*.json")):
        cfg = load_config(p)
        out.append((p.stem, cfg.description))
    return out
