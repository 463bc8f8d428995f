"""JSON run configuration shared by the command-line tools."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .classifier import ClassifierParams
from .sli import OffsetTable, ScaleJob
from .spectral import SweepSettings

_SECTIONS = ("classifier", "offsets", "convention", "boundary", "sweep")


@dataclass(frozen=True)
class Config:
    classifier: ClassifierParams = field(default_factory=ClassifierParams)
    offsets: OffsetTable = field(default_factory=OffsetTable)
    convention: str = "origin"
    boundary: str = "replicate"
    sweep: SweepSettings = field(default_factory=SweepSettings)

    def __post_init__(self):
        # reuse the job validation for the convention and boundary names
        ScaleJob(1.0, self.offsets, self.convention, self.boundary)

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier.to_dict(),
            "offsets": self.offsets.to_dict(),
            "convention": self.convention,
            "boundary": self.boundary,
            "sweep": asdict(self.sweep),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        unknown = set(d) - set(_SECTIONS)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kw = {}
        if "classifier" in d:
            kw["classifier"] = ClassifierParams.from_dict(d["classifier"])
        if "offsets" in d:
            kw["offsets"] = OffsetTable.from_dict(d["offsets"])
        if "sweep" in d:
            kw["sweep"] = SweepSettings(**d["sweep"])
        for key in ("convention", "boundary"):
            if key in d:
                kw[key] = d[key]
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "Config":
        with open(Path(path)) as f:
            return cls.from_dict(json.load(f))

    def with_offsets(self, offsets: OffsetTable) -> "Config":
        return replace(self, offsets=offsets)
