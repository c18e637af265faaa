"""Search caps and budgets, shared by the library and the CLI."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Caps:
    """Hard limits that guard the exhaustive searches.

    Every bound below is an honest cap: operations that hit one report it
    rather than silently truncating results.
    """

    radius: int = 8               # largest ball radius
    ball_size: int = 200_000      # largest ball cardinality
    max_len: int = 10             # relation falsifier word weight
    falsifier_nodes: int = 500_000
    table_size: int = 64          # largest finite multiplication table
    window: int = 8               # default index window for presentations
    max_degree: int = 12          # symmetric-group degree for the finite solver
    perms_per_degree: int = 250_000
    oracle_m: int = 4             # brute-force minimizer windows
    oracle_n: int = 8
    budget_ms: int = 600_000      # wall-clock budget for witness search

    def with_overrides(self, **kw) -> "Caps":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


DEFAULT_CAPS = Caps()

CONFIG_ENV_VAR = "GROUPEQ_CONFIG"


def load_caps(path: str | None = None) -> Caps:
    """Read caps from a JSON file, or from $GROUPEQ_CONFIG, or defaults."""
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if not path or not os.path.exists(path):
        return DEFAULT_CAPS
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    known = {k: data[k] for k in data if k in Caps.__dataclass_fields__}
    return DEFAULT_CAPS.with_overrides(**known)
