"""Runtime configuration and component factories.

Settings merge four layers, highest precedence first:

1. command-line flags (passed as ``overrides``)
2. a ``key=value`` config file
3. ``VERIDESK_*`` environment variables
4. built-in defaults

``deterministic`` mode swaps in a fixed clock, counter-based ids, and
inline (synchronous) operations so that identical inputs produce
byte-identical event logs and audit bundles.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from .gateway.context import Task
from .gateway.generate import DEFAULT_PARAMS, Gateway, GatewayConfig
from .gateway.providers import HttpProvider, MockProvider, Provider
from .runtime import (
    Clock,
    CounterIdSource,
    FixedClock,
    IdSource,
    RandomIdSource,
    SystemClock,
)
from .service.app import CaseService
from .service.operations import OperationRegistry
from .store.store import EventStore

ENV_PREFIX = "VERIDESK_"

_TRUTHY = {"1", "true", "yes", "on"}
_FALSY = {"0", "false", "no", "off"}


def parse_bool(raw: str | bool) -> bool:
    if isinstance(raw, bool):
        return raw
    lowered = raw.strip().lower()
    if lowered in _TRUTHY:
        return True
    if lowered in _FALSY:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


@dataclass
class Settings:
    store: str = ":memory:"
    host: str = "127.0.0.1"
    port: int = 8000
    provider: str = "mock"  # mock | http
    provider_url: str = ""
    provider_model: str = "default"
    provider_key: str = ""
    provider_timeout: float = 60.0
    max_attempts: int = 3
    concurrency: int = 4
    tokens: str = ""
    operations_mode: str = ""  # inline | thread; empty = pick by mode
    deterministic: bool = False
    script: str = ""

    def resolved_operations_mode(self) -> str:
        if self.operations_mode:
            return self.operations_mode
        return "inline" if self.deterministic else "thread"


_FIELD_TYPES = {f.name: f.type for f in fields(Settings)}


def _coerce(name: str, raw: object) -> object:
    """Convert a string from the environment or a config file to the
    field's declared type; values already typed pass through."""
    if not isinstance(raw, str):
        return raw
    kind = _FIELD_TYPES[name]
    if kind in ("int", int):
        return int(raw)
    if kind in ("float", float):
        return float(raw)
    if kind in ("bool", bool):
        return parse_bool(raw)
    return raw


def read_config_file(path: str | Path) -> dict:
    """Parse a ``key=value`` config file; ``#`` starts a comment line."""
    values: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown setting {key!r}")
        values[key] = value.strip()
    return values


def load_settings(
    config_path: str | Path | None = None,
    overrides: Mapping[str, object] | None = None,
    environ: Mapping[str, str] | None = None,
) -> Settings:
    env = os.environ if environ is None else environ
    merged: dict = {}
    for name in _FIELD_TYPES:
        env_value = env.get(ENV_PREFIX + name.upper())
        if env_value is not None:
            merged[name] = env_value
    if config_path is not None:
        merged.update(read_config_file(config_path))
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _FIELD_TYPES:
                raise ValueError(f"unknown setting {key!r}")
            merged[key] = value
    coerced = {name: _coerce(name, value) for name, value in merged.items()}
    return Settings(**coerced)


def load_script(path: str | Path) -> dict[str, list[str]]:
    """Load a scripted-provider file: a JSON object mapping task names to
    the list of raw responses the provider should return, in order.

    List entries may be strings (returned verbatim) or JSON objects
    (serialised for convenience when authoring fixtures by hand).
    """
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        raise ValueError(f"{path}: script must be a JSON object keyed by task")
    known = {task.value for task in Task}
    script: dict[str, list[str]] = {}
    for task_name, entries in document.items():
        if task_name not in known:
            raise ValueError(
                f"{path}: unknown task {task_name!r}; expected one of {sorted(known)}"
            )
        if not isinstance(entries, list):
            raise ValueError(f"{path}: responses for {task_name!r} must be a list")
        script[task_name] = [
            entry if isinstance(entry, str) else json.dumps(entry)
            for entry in entries
        ]
    return script


def build_clock(settings: Settings) -> Clock:
    return FixedClock() if settings.deterministic else SystemClock()


def build_ids(settings: Settings) -> IdSource:
    return CounterIdSource() if settings.deterministic else RandomIdSource()


def build_provider(
    settings: Settings, script: dict[str, list[str]] | None = None
) -> Provider:
    if settings.provider == "mock":
        if script is None and settings.script:
            script = load_script(settings.script)
        return MockProvider(script or {})
    if settings.provider == "http":
        if not settings.provider_url:
            raise ValueError("provider_url is required for the http provider")
        return HttpProvider(
            base_url=settings.provider_url,
            api_key=settings.provider_key,
            model=settings.provider_model,
            timeout_seconds=settings.provider_timeout,
        )
    raise ValueError(f"unknown provider {settings.provider!r}")


def build_gateway_config(settings: Settings) -> GatewayConfig:
    return GatewayConfig(
        max_attempts=settings.max_attempts,
        concurrency=settings.concurrency,
        params=dict(DEFAULT_PARAMS),
    )


def build_service(
    settings: Settings,
    *,
    store: EventStore | None = None,
    provider: Provider | None = None,
    script: dict[str, list[str]] | None = None,
) -> CaseService:
    clock = build_clock(settings)
    if store is None:
        store = EventStore(settings.store, clock=clock)
    if provider is None:
        provider = build_provider(settings, script=script)
    return CaseService(
        store=store,
        provider=provider,
        gateway_config=build_gateway_config(settings),
        clock=clock,
        ids=build_ids(settings),
    )


def build_registry(settings: Settings) -> OperationRegistry:
    return OperationRegistry(mode=settings.resolved_operations_mode())


__all__ = [
    "Settings",
    "load_settings",
    "read_config_file",
    "load_script",
    "parse_bool",
    "build_clock",
    "build_ids",
    "build_provider",
    "build_gateway_config",
    "build_service",
    "build_registry",
    "Gateway",
]
