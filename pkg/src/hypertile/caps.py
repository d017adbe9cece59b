"""Desk-scale resource caps.

Defaults can be overridden with the ``HYPERTILE_CAPS`` environment variable,
a comma-separated list such as ``oracle_n=60,clique_set=20``. Raising caps is
unsafe: the exhaustive searches behind them are exponential.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .errors import PreconditionError, ResourceCapError

ENV_VAR = "HYPERTILE_CAPS"


@dataclass(frozen=True)
class Caps:
    oracle_n: int = 40
    clique_set: int = 16
    local_search_n: int = 512
    design_ksets: int = 10**7
    independence_n: int = 40
    enumeration_sets: int = 5_000_000


def current_caps() -> Caps:
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return Caps()
    known = {f.name for f in dataclasses.fields(Caps)}
    values = {}
    for item in raw.split(","):
        if not item.strip():
            continue
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in known:
            raise PreconditionError(f"{ENV_VAR}: unknown cap {key!r}")
        try:
            values[key] = int(value)
        except ValueError:
            raise PreconditionError(f"{ENV_VAR}: cap {key!r} needs an integer") from None
    return Caps(**values)


def check_cap(name: str, value: int, cap: int | None = None) -> None:
    limit = getattr(current_caps(), name) if cap is None else cap
    if value > limit:
        raise ResourceCapError(f"{name}: {value} exceeds cap {limit} (see {ENV_VAR})")
