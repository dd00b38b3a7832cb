"""Exception types and size caps shared by every module."""

from __future__ import annotations

import os
from dataclasses import dataclass


class CapExceeded(ValueError):
    """A computation would exceed a configured size cap."""

    def __init__(self, cap: str, requested: int, limit: int):
        self.cap = cap
        self.requested = requested
        self.limit = limit
        super().__init__(f"{cap} exceeded: requested {requested}, limit {limit}")


class NumericError(ArithmeticError):
    """A numerical procedure failed (singular system, no convergence)."""


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Caps:
    """Size caps. Defaults can be overridden through ``GAMETREE_*`` environment variables."""

    max_leaves: int = 4**12
    max_exhaustive_n: int = 16
    max_pmf_support: int = 200_000
    max_population: int = 50_000_000

    @classmethod
    def from_env(cls) -> "Caps":
        d = cls()
        return cls(
            max_leaves=_env_int("GAMETREE_MAX_LEAVES", d.max_leaves),
            max_exhaustive_n=_env_int("GAMETREE_MAX_EXHAUSTIVE_N", d.max_exhaustive_n),
            max_pmf_support=_env_int("GAMETREE_MAX_PMF_SUPPORT", d.max_pmf_support),
            max_population=_env_int("GAMETREE_MAX_POPULATION", d.max_population),
        )

    def __post_init__(self):
        for name in ("max_leaves", "max_exhaustive_n", "max_pmf_support", "max_population"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_CAPS = Caps()
