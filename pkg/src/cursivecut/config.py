"""Run configuration: tunable thresholds and I/O settings.

A RunConfig can come from defaults, a JSON file (``--config`` or the
CURSIVE_CUT_CONFIG environment variable), with explicit flags winning.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields

CONFIG_ENV = "CURSIVE_CUT_CONFIG"


@dataclass
class RunConfig:
    kappa_threshold: float = 0.15       # 1/dots, band decomposition
    fracture_thin_dots: float = 0.25
    fracture_extent_dots: float = 0.25
    entropy_bins: int = 16
    entropy_threshold: float = 1.5      # bits
    landmarks: int = 64
    seed: int = 0
    rules_path: str | None = None
    out_dir: str = "."

    def __post_init__(self):
        for name in ("kappa_threshold", "fracture_thin_dots",
                     "fracture_extent_dots", "entropy_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.landmarks < 3:
            raise ValueError(f"landmarks must be >= 3, got {self.landmarks}")
        if self.entropy_bins < 2:
            raise ValueError(f"entropy_bins must be >= 2, got {self.entropy_bins}")

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {"schema"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{k: v for k, v in data.items() if k in known})

    @classmethod
    def load(cls, explicit_path=None) -> "RunConfig":
        """Explicit path, else the environment variable, else defaults."""
        path = explicit_path or os.environ.get(CONFIG_ENV)
        return cls.from_file(path) if path else cls()
