"""Application configuration: TOML file, dotted-name CLI overrides, defaults.

Every leaf value can be overridden on the command line with a flag of the
same dotted name (e.g. ``--curation.min_docs 10``). Paths support a ``pkg:``
prefix resolving into the bundled data directory; relative paths resolve
against the config file's directory.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
import typing
from dataclasses import dataclass, field
from pathlib import Path

from importlib import resources

from .corpus import RecordSchema
from .curation import CurationConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    """The configuration file or an override is malformed."""


@dataclass(frozen=True)
class CommunitiesConfig:
    labels: tuple[str, str] | None = None
    names: tuple[str, str] | None = None


@dataclass(frozen=True)
class RagConfig:
    cap: int = 50
    model_id: str = "gpt-3.5-turbo"
    seed: int = 1234
    parallelism: int = 4
    timeout: float = 30.0
    prompt_char_budget: int = 8000
    sample_char_limit: int = 500
    max_output_chars: int = 1200


@dataclass(frozen=True)
class ScatterConfig:
    dim: int = 256
    eps: float = 0.15
    min_pts: int = 4


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8750
    cors_origin: str = "*"
    static_dir: str | None = None


@dataclass(frozen=True)
class PathsConfig:
    index_snapshot: str = "out/bd.index"
    cache: str = "out/bd-cache.sqlite"
    templates: str | None = None
    output_dir: str = "out"


@dataclass(frozen=True)
class AppConfig:
    corpus_path: str = "pkg:fixture/corpus.jsonl"
    lexicon_path: str | None = None
    n_max: int = 3
    schema: RecordSchema = field(default_factory=RecordSchema)
    communities: CommunitiesConfig = field(default_factory=CommunitiesConfig)
    curation: CurationConfig = field(default_factory=CurationConfig)
    rag: RagConfig = field(default_factory=RagConfig)
    scatter: ScatterConfig = field(default_factory=ScatterConfig)
    server: ServerConfig = field(default_factory=ServerConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)
    base_dir: str = "."

    def resolve(self, path_value: str) -> Path:
        if path_value.startswith("pkg:"):
            return Path(str(resources.files("bridgedict").joinpath("data", path_value[4:])))
        path = Path(path_value)
        if path.is_absolute():
            return path
        return Path(self.base_dir) / path

    def display_names(self) -> tuple[str, str]:
        if self.communities.names is not None:
            return self.communities.names
        if self.communities.labels is not None:
            return self.communities.labels
        return ("community 1", "community 2")

    def digest(self) -> str:
        """Short digest of the settings that shape curated output and generations."""
        material = {
            "n_max": self.n_max,
            "curation": dataclasses.asdict(self.curation),
            "rag": dataclasses.asdict(self.rag),
            "scatter": dataclasses.asdict(self.scatter),
            "communities": dataclasses.asdict(self.communities),
        }
        blob = json.dumps(material, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


_SECTION_TYPES = {
    "schema": RecordSchema,
    "communities": CommunitiesConfig,
    "curation": CurationConfig,
    "rag": RagConfig,
    "scatter": ScatterConfig,
    "server": ServerConfig,
    "paths": PathsConfig,
}


def _coerce(value, target_type, where: str):
    origin = getattr(target_type, "__origin__", None)
    args = [a for a in getattr(target_type, "__args__", ()) if a is not type(None)]
    if origin is None and target_type in (str, int, float, bool):
        return _coerce_scalar(value, target_type, where)
    if args:  # Optional[...] or tuple[...]
        if origin is tuple or (args and getattr(args[0], "__origin__", None) is tuple):
            inner = args[0] if getattr(args[0], "__origin__", None) is tuple else target_type
            item_types = [a for a in inner.__args__ if a is not Ellipsis]
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",")]
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{where}: expected a list, got {value!r}")
            if len(item_types) == len(value):
                return tuple(
                    _coerce_scalar(v, t, where) for v, t in zip(value, item_types)
                )
            return tuple(_coerce_scalar(v, item_types[0], where) for v in value)
        return _coerce_scalar(value, args[0], where)
    return value


def _coerce_scalar(value, target_type, where: str):
    if target_type is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str):
            lowered = value.strip().lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
        raise ConfigError(f"{where}: expected a boolean, got {value!r}")
    if target_type is int:
        try:
            return int(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: expected an integer, got {value!r}") from exc
    if target_type is float:
        try:
            return float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: expected a number, got {value!r}") from exc
    if target_type is str:
        if value is None:
            return None
        return str(value)
    return value


_FIELD_TYPES: dict[type, dict[str, object]] = {
    cls: typing.get_type_hints(cls)
    for cls in (RecordSchema, CommunitiesConfig, CurationConfig, RagConfig,
                ScatterConfig, ServerConfig, PathsConfig, AppConfig)
}


def _field_type(cls, name: str):
    return _FIELD_TYPES[cls][name]


def _build_section(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a table")
    kwargs = {}
    names = {f.name for f in dataclasses.fields(cls)}
    for key, value in data.items():
        if key not in names:
            raise ConfigError(f"{where}.{key}: unknown setting")
        kwargs[key] = _coerce(value, _field_type(cls, key), f"{where}.{key}")
    return cls(**kwargs)


def load_config(path: str | Path | None) -> AppConfig:
    """Load a TOML config file; None yields the built-in defaults."""
    if path is None:
        return AppConfig()
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {path}: {exc}") from exc
    kwargs: dict = {"base_dir": str(path.parent)}
    app_names = {f.name for f in dataclasses.fields(AppConfig)}
    for key, value in data.items():
        if key not in app_names or key == "base_dir":
            raise ConfigError(f"{key}: unknown setting")
        if key in _SECTION_TYPES:
            kwargs[key] = _build_section(_SECTION_TYPES[key], value, key)
        else:
            kwargs[key] = _coerce(value, _field_type(AppConfig, key), key)
    return AppConfig(**kwargs)


def override_flags() -> list[str]:
    """Every settable dotted name, for CLI registration."""
    names: list[str] = []
    for f in dataclasses.fields(AppConfig):
        if f.name == "base_dir":
            continue
        if f.name in _SECTION_TYPES:
            for sub in dataclasses.fields(_SECTION_TYPES[f.name]):
                names.append(f"{f.name}.{sub.name}")
        else:
            names.append(f.name)
    return names


def apply_overrides(config: AppConfig, overrides: dict[str, str]) -> AppConfig:
    """Apply ``{dotted_name: raw_string}`` overrides onto a config."""
    updates: dict = {}
    section_updates: dict[str, dict] = {}
    app_names = {f.name for f in dataclasses.fields(AppConfig)}
    for dotted, raw in overrides.items():
        if raw is None:
            continue
        if "." in dotted:
            section, leaf = dotted.split(".", 1)
            if section not in _SECTION_TYPES:
                raise ConfigError(f"unknown config section {section!r}")
            cls = _SECTION_TYPES[section]
            if leaf not in {f.name for f in dataclasses.fields(cls)}:
                raise ConfigError(f"unknown setting {dotted!r}")
            section_updates.setdefault(section, {})[leaf] = _coerce(
                raw, _field_type(cls, leaf), dotted
            )
        else:
            if dotted not in app_names or dotted == "base_dir":
                raise ConfigError(f"unknown setting {dotted!r}")
            updates[dotted] = _coerce(raw, _field_type(AppConfig, dotted), dotted)
    for section, changes in section_updates.items():
        current = getattr(config, section)
        updates[section] = dataclasses.replace(current, **changes)
    return dataclasses.replace(config, **updates)
