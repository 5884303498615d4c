"""Run-time configuration shared by the CLI and the test suites."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class Config:
    n: int = 2
    hf_cap: int = 6
    size_cap: int = 7
    depth_cap: int = 12

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("level n must be at least 2")
        for name in ("hf_cap", "size_cap", "depth_cap"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def load(cls, path: str | Path | None = None, **overrides) -> "Config":
        data = {}
        if path is not None:
            data = json.loads(Path(path).read_text())
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT = Config()
