"""Protocol parameters and the key=value config file.

Config values are overridden by explicit CLI flags; the file path comes
from --config or the CHRISIMOS_CONFIG environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

CONFIG_ENV = "CHRISIMOS_CONFIG"


@dataclass(frozen=True)
class ProtocolParams:
    lam: int = 256
    l: float = 2.0
    f: int = 6
    committee_keys: str | None = None
    t: int | None = None


def load_config(path) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def resolve_params(config_path=None, **overrides) -> ProtocolParams:
    """Defaults, then the config file, then explicit overrides."""
    path = config_path or os.environ.get(CONFIG_ENV)
    values: dict = {}
    if path:
        raw = load_config(path)
        if "lambda" in raw:
            values["lam"] = int(raw["lambda"])
        if "l" in raw:
            values["l"] = float(raw["l"])
        if "f" in raw:
            values["f"] = int(raw["f"])
        if "committee_keys" in raw:
            values["committee_keys"] = raw["committee_keys"]
        if "t" in raw:
            values["t"] = int(raw["t"])
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    return ProtocolParams(**values)
