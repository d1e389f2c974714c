"""Run configuration: one JSON document tying model, training, prior and paths together."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from ucolor.configbase import ConfigSection
from ucolor.errors import ConfigError
from ucolor.io.files import atomic_write_text, dump_json
from ucolor.network.config import ModelConfig
from ucolor.training.config import TrainConfig

TOP_LEVEL_KEYS = ("model", "train", "prior", "seed", "paths")


@dataclass
class RunPaths(ConfigSection):
    """IO locations; relative paths are used as given."""

    section = "paths"

    manifest: Optional[str] = None
    weights: Optional[str] = None
    trace: Optional[str] = None
    output: Optional[str] = None

    def violations(self) -> list[str]:
        return [
            f"paths.{name} must be a string or null; got {getattr(self, name)!r}"
            for name in self.field_names()
            if getattr(self, name) is not None and not isinstance(getattr(self, name), str)
        ]


@dataclass
class RunConfig:
    """Model, training and IO settings of one experiment.

    ``prior`` and ``seed`` are shortcuts for ``model.prior`` and
    ``train.seed``; when present in a document they override the nested
    values. :meth:`to_dict` emits every default, so a dumped document
    validates and reloads to an equal config.
    """

    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    paths: RunPaths = field(default_factory=RunPaths)

    @property
    def prior(self) -> str:
        return self.model.prior

    @property
    def seed(self) -> int:
        return self.train.seed

    @classmethod
    def preset(cls, name: str) -> "RunConfig":
        return cls(ModelConfig.preset(name), TrainConfig.preset(name))

    def with_preset(self, name: str) -> "RunConfig":
        """Apply a named preset's overrides on top of this config."""
        ModelConfig.preset(name)
        return replace(
            self,
            model=self.model.with_updates(**ModelConfig.presets.get(name, {})),
            train=self.train.with_updates(**TrainConfig.presets.get(name, {})),
        )

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, train=self.train.with_updates(seed=seed))

    @staticmethod
    def _sections(
        payload: Mapping[str, Any],
    ) -> tuple[Dict[str, Any], Dict[str, Any], Dict[str, Any]]:
        model = dict(payload.get("model") or {})
        train = dict(payload.get("train") or {})
        if payload.get("prior") is not None:
            model["prior"] = payload["prior"]
        if payload.get("seed") is not None:
            train["seed"] = payload["seed"]
        return model, train, dict(payload.get("paths") or {})

    @classmethod
    def validate_mapping(cls, payload: Any) -> list[str]:
        """Every violation in ``payload``; an empty list means it loads cleanly."""
        if not isinstance(payload, Mapping):
            return ["run config must be a JSON object"]
        problems = [f"unknown key '{key}'" for key in sorted(payload) if key not in TOP_LEVEL_KEYS]
        for name in ("model", "train", "paths"):
            if payload.get(name) is not None and not isinstance(payload[name], Mapping):
                problems.append(f"{name} must be a JSON object")
        if payload.get("seed") is not None and not isinstance(payload["seed"], int):
            problems.append(f"seed must be an integer; got {payload['seed']!r}")
        if problems:
            return problems
        model, train, paths = cls._sections(payload)
        for section, values in ((ModelConfig, model), (TrainConfig, train), (RunPaths, paths)):
            accepted = set(section.field_names()) | set(section.aliases)
            unknown = [key for key in sorted(values) if key not in accepted]
            problems.extend(f"{section.section}: unknown key '{key}'" for key in unknown)
            known = {key: value for key, value in values.items() if key not in unknown}
            try:
                section.from_mapping(known)
            except ConfigError as exc:
                problems.extend(exc.violations)
        return problems

    @classmethod
    def from_mapping(cls, payload: Any) -> "RunConfig":
        problems = cls.validate_mapping(payload)
        if problems:
            raise ConfigError(problems)
        model, train, paths = cls._sections(payload)
        return cls(
            ModelConfig.from_mapping(model),
            TrainConfig.from_mapping(train),
            RunPaths.from_mapping(paths),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model.to_dict(),
            "train": self.train.to_dict(),
            "prior": self.prior,
            "seed": self.seed,
            "paths": self.paths.to_dict(),
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())


def read_config_document(path: str | os.PathLike[str]) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON ({exc})"]) from exc


def load_config(path: str | os.PathLike[str]) -> RunConfig:
    return RunConfig.from_mapping(read_config_document(path))


def save_config(config: RunConfig, path: str | os.PathLike[str]) -> Path:
    return atomic_write_text(path, config.to_json())
