"""Validated solver parameters.

Defaults: population 30, slight tabu search cut off after 500
non-improving iterations, strong tabu search after 12500, alpha = dis/5
and beta = max(dis/10, 2) recomputed for every relinked pair.
"""

import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator


class TabuConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # None -> 10 + ceil((n_jobs + n_machines) / 2)
    tenure_base: int | None = Field(default=None, ge=0)
    tenure_spread: int = Field(default=6, ge=0)

    def base_for(self, n_jobs: int, n_machines: int) -> int:
        if self.tenure_base is not None:
            return self.tenure_base
        return 10 + math.ceil((n_jobs + n_machines) / 2)


class RelinkConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    si: int = Field(default=500, ge=1)
    li: int = Field(default=12500, ge=1)
    alpha: int | None = Field(default=None, ge=1)
    beta: int | None = Field(default=None, ge=1)
    alpha_divisor: int = Field(default=5, ge=1)
    beta_divisor: int = Field(default=10, ge=1)
    beta_floor: int = Field(default=2, ge=1)

    @model_validator(mode="after")
    def _strong_not_shorter(self) -> "RelinkConfig":
        if self.li < self.si:
            raise ValueError(f"li ({self.li}) must not be below si ({self.si})")
        return self


class EvolveConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    population_size: int = Field(default=30, ge=2)
    init_cutoff: int | None = Field(default=None, ge=1)  # None -> relink.li
    trace_interval: float = Field(default=1.0, gt=0)
    max_duplicate_draws: int = Field(default=50, ge=1)
    tabu: TabuConfig = Field(default_factory=TabuConfig)
    relink: RelinkConfig = Field(default_factory=RelinkConfig)

    @property
    def improver_cutoff(self) -> int:
        return self.init_cutoff if self.init_cutoff is not None else self.relink.li


def apply_overrides(config: EvolveConfig, overrides: dict[str, str]) -> EvolveConfig:
    """Return a copy of ``config`` with dotted ``key=value`` overrides applied.

    ``{"relink.si": "200", "population_size": "10"}`` touches the nested
    relinking settings and the population size; pydantic coerces the strings.
    """
    data: dict[str, Any] = config.model_dump()
    for dotted, raw in overrides.items():
        node = data
        *parents, leaf = dotted.split(".")
        for key in parents:
            if not isinstance(node.get(key), dict):
                raise ValueError(f"unknown parameter group {key!r} in {dotted!r}")
            node = node[key]
        if leaf not in node:
            raise ValueError(f"unknown parameter {dotted!r}")
        node[leaf] = None if raw.lower() in ("none", "null", "") else raw
    return EvolveConfig.model_validate(data)
