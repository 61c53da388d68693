"""Service configuration: a JSON file plus ``BPB_ADAPTER_*`` env overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

ENV_PREFIX = "BPB_ADAPTER_"

_INT_FIELDS = frozenset({"max_batch", "port"})


@dataclass(frozen=True)
class AdapterConfig:
    """What to serve and how.

    Model ids are import specs ``"module:factory"``; the factory returns the
    runner object for its endpoint (see :mod:`bpb_adapter.runners`). At least
    one of the three models must be configured; endpoints without a model
    reply 404.
    """

    rc_model_id: str | None = None
    qg_model_id: str | None = None
    parser_model_id: str | None = None
    max_batch: int = 1
    port: int = 8601

    def __post_init__(self) -> None:
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        if not 0 < self.port < 65536:
            raise ValueError("port must be in 1..65535")
        if not (self.rc_model_id or self.qg_model_id or self.parser_model_id):
            raise ValueError(
                "configure at least one model "
                "(rc_model_id, qg_model_id, or parser_model_id)"
            )


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> AdapterConfig:
    """Build a config from an optional JSON file, then apply env overrides.

    Every field can be set as ``BPB_ADAPTER_<FIELD_NAME>`` (upper-cased); env
    values win over file values. Unknown file keys and non-integer counts are
    rejected.
    """
    env = os.environ if env is None else env
    names = [f.name for f in fields(AdapterConfig)]
    values: dict[str, object] = {}
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        unknown = sorted(set(raw) - set(names))
        if unknown:
            raise ValueError(f"{path}: unknown config keys: {', '.join(unknown)}")
        values.update(raw)
    for name in names:
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            values[name] = env[env_key]
    for name, value in values.items():
        if name in _INT_FIELDS:
            try:
                values[name] = int(value)  # type: ignore[call-overload]
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{name} must be an integer, got {value!r}") from exc
        elif value is not None and not isinstance(value, str):
            raise ValueError(f"{name} must be a string, got {value!r}")
    return AdapterConfig(**values)  # type: ignore[arg-type]
