"""Exact arithmetic tallies for the pixel-path of the scalers.

Numeric kernels accept an optional :class:`OpCounter` and report the
additions and multiplications they perform on sample data. Index and
coordinate arithmetic is not counted. Subtractions and comparisons count
as additions; taking an absolute value is free.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Dict, Optional

PHASES = ("classification", "prefilter", "interpolation")


@dataclass(frozen=True)
class OpCounts:
    additions: int
    multiplications: int
    phases: Dict[str, Dict[str, int]] = field(default_factory=dict)

    def phase(self, name: str) -> Dict[str, int]:
        return self.phases.get(name, {"additions": 0, "multiplications": 0})


class OpCounter:
    """Thread-safe accumulator of per-phase operation counts."""

    def __init__(self):
        self._lock = threading.Lock()
        self._adds: Dict[str, int] = {}
        self._muls: Dict[str, int] = {}

    def tally(self, phase: str, adds: int = 0, muls: int = 0) -> None:
        if adds < 0 or muls < 0:
            raise ValueError("operation counts must be non-negative")
        with self._lock:
            self._adds[phase] = self._adds.get(phase, 0) + int(adds)
            self._muls[phase] = self._muls.get(phase, 0) + int(muls)

    def counts(self) -> OpCounts:
        with self._lock:
            names = sorted(set(self._adds) | set(self._muls))
            phases = {
                n: {"additions": self._adds.get(n, 0), "multiplications": self._muls.get(n, 0)}
                for n in names
            }
        return OpCounts(
            additions=sum(p["additions"] for p in phases.values()),
            multiplications=sum(p["multiplications"] for p in phases.values()),
            phases=phases,
        )


def tally(counter: Optional[OpCounter], phase: str, adds: int = 0, muls: int = 0) -> None:
    if counter is not None:
        counter.tally(phase, adds, muls)
