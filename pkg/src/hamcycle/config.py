"""Numeric thresholds of the three solver stages.

Defaults are the asymptotic constants the algorithm is stated with. They
only make sense for very large graphs (the degree threshold alone exceeds
``n`` below a few thousand vertices), so small-graph work uses a scaled
preset such as :meth:`ConstantsConfig.desk`.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional


def icbrt_ceil(n: int) -> int:
    """Smallest integer ``k`` with ``k**3 >= n``."""
    if n <= 0:
        return 0
    k = round(n ** (1.0 / 3.0))
    while k ** 3 < n:
        k += 1
    while k > 0 and (k - 1) ** 3 >= n:
        k -= 1
    return k


@dataclass(frozen=True)
class ConstantsConfig:
    small_degree_coefficient: float = 40.0
    small_size_coefficient: float = 2.0
    min_p_coefficient: float = 70.0
    # None means the default function of n: ceil(sqrt(n) * ln n) and ceil(n^(1/3)).
    leftover_threshold: Optional[float] = None
    rotation_set_size: Optional[int] = None
    step5_cycle_fraction: float = 0.99
    step5_component_coefficient: float = 15.0
    patch_depth: int = 4
    exchange_size: int = 4
    exhaustive_fallback_max_n: int = 64

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is not None and not value > 0:
                raise ValueError(f"{f.name} must be positive, got {value!r}")
        if self.step5_cycle_fraction > 1:
            raise ValueError("step5_cycle_fraction must be at most 1")

    @classmethod
    def desk(cls, **overrides: Any) -> "ConstantsConfig":
        """Thresholds shrunk so that every stage is reachable on graphs with n <= 40."""
        values = dict(
            small_degree_coefficient=1.0,
            small_size_coefficient=2.0,
            step5_cycle_fraction=0.5,
            step5_component_coefficient=0.5,
        )
        values.update(overrides)
        return cls(**values)

    # -- derived thresholds ---------------------------------------------------

    def small_degree_threshold(self, n: int) -> float:
        return self.small_degree_coefficient * math.sqrt(n)

    def small_size_limit(self, n: int) -> float:
        return self.small_size_coefficient * math.sqrt(n)

    def min_p(self, n: int) -> float:
        return self.min_p_coefficient / math.sqrt(n) if n else math.inf

    def leftover_limit(self, n: int) -> int:
        if self.leftover_threshold is not None:
            return math.ceil(self.leftover_threshold)
        if n < 2:
            return 0
        return math.ceil(math.sqrt(n) * math.log(n))

    def rotation_size(self, n: int) -> int:
        if self.rotation_set_size is not None:
            return self.rotation_set_size
        return icbrt_ceil(n)

    def step5_component_limit(self, n: int) -> float:
        return self.step5_component_coefficient * math.sqrt(n)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ConstantsConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown constants: {', '.join(sorted(unknown))}")
        values = {}
        for key, value in data.items():
            if value is not None and key in ("rotation_set_size", "patch_depth",
                                             "exchange_size", "exhaustive_fallback_max_n"):
                if int(value) != value:
                    raise ValueError(f"{key} must be an integer")
                value = int(value)
            values[key] = value
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | Path) -> "ConstantsConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("constants file must hold a flat JSON object")
        return cls.from_dict(data)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]
