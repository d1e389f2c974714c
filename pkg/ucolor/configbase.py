"""Shared behaviour of the dataclass configuration sections."""

from __future__ import annotations

from dataclasses import asdict, fields, replace
from typing import Any, ClassVar, Dict, Mapping, Type, TypeVar

from ucolor.errors import ConfigError

C = TypeVar("C", bound="ConfigSection")

# Named ablation variants; each section maps a name onto its own overrides.
PRESET_NAMES = (
    "full",
    "no_hsv",
    "no_lab",
    "no_hsv_lab",
    "rgb3",
    "no_mtgm",
    "rdcp",
    "rudcp",
    "no_cam",
    "no_perc",
)


class ConfigSection:
    """Mixin for ``@dataclass`` configs: strict mapping IO plus collected validation.

    Subclasses implement :meth:`violations`; construction raises
    :class:`~ucolor.errors.ConfigError` carrying every violation at once.
    """

    section: ClassVar[str] = "config"
    presets: ClassVar[Dict[str, Mapping[str, Any]]] = {}
    # Alternative JSON key -> field name.
    aliases: ClassVar[Dict[str, str]] = {}

    def __post_init__(self) -> None:
        problems = self.violations()
        if problems:
            raise ConfigError(problems)

    def violations(self) -> list[str]:
        return []

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))  # type: ignore[arg-type]

    @classmethod
    def from_mapping(cls: Type[C], mapping: Mapping[str, Any] | None) -> C:
        """Build a config from a JSON-style mapping, rejecting unknown keys by name."""
        mapping = cls._canonical_keys(dict(mapping or {}))
        known = set(cls.field_names())
        unknown = sorted(key for key in mapping if key not in known)
        if unknown:
            raise ConfigError([f"{cls.section}: unknown key '{key}'" for key in unknown])
        try:
            return cls(**mapping)  # type: ignore[call-arg]
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError([f"{cls.section}: {exc}"]) from exc

    @classmethod
    def _canonical_keys(cls, mapping: Dict[str, Any]) -> Dict[str, Any]:
        clashes = sorted(
            alias for alias, name in cls.aliases.items() if alias in mapping and name in mapping
        )
        if clashes:
            raise ConfigError(
                [
                    f"{cls.section}: '{alias}' and '{cls.aliases[alias]}' are the same setting"
                    for alias in clashes
                ]
            )
        return {cls.aliases.get(key, key): value for key, value in mapping.items()}

    def to_dict(self) -> Dict[str, Any]:
        """Every field, defaults included."""
        return asdict(self)  # type: ignore[call-overload]

    def with_updates(self: C, **changes: Any) -> C:
        return replace(self, **changes)  # type: ignore[type-var]

    @classmethod
    def preset(cls: Type[C], name: str, **overrides: Any) -> C:
        """Resolve a named preset; presets that do not touch this section yield defaults."""
        if name not in PRESET_NAMES:
            known = ", ".join(PRESET_NAMES)
            raise ConfigError([f"unknown preset '{name}' (known: {known})"])
        values = dict(cls.presets.get(name, {}))
        values.update(overrides)
        return cls.from_mapping(values)
