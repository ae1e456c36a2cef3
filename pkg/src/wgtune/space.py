"""Workgroup-size parameter space, legality constraints and runtime arithmetic.

A workgroup size is a ``(columns, rows)`` pair. Legality of a size for a
scenario depends on the effective maximum (the smaller of the device and
kernel limits, applied to the area) and on the set of sizes the runtime is
known to refuse.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    EmptySpace,
    InvalidArgument,
    NoSafeParameter,
    UnknownScenario,
    UnknownTestCase,
    DuplicateTestCase,
)

_WG_RE = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")


@dataclass(frozen=True, order=True)
class WorkgroupSize:
    w_c: int
    w_r: int

    def __post_init__(self):
        for v in (self.w_c, self.w_r):
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidArgument(f"workgroup dimensions must be positive integers, got {self.w_c}x{self.w_r}")
        object.__setattr__(self, "w_c", int(self.w_c))
        object.__setattr__(self, "w_r", int(self.w_r))

    def area(self) -> int:
        return self.w_c * self.w_r

    def __str__(self):
        return f"{self.w_c}x{self.w_r}"

    @classmethod
    def parse(cls, text: str) -> "WorkgroupSize":
        m = _WG_RE.match(text)
        if not m:
            raise InvalidArgument(f"cannot parse workgroup size {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


def wg(w_c: int, w_r: int) -> WorkgroupSize:
    return WorkgroupSize(w_c, w_r)


class Probe(enum.Enum):
    """Outcome of trying a workgroup size on a scenario."""

    LEGAL = "legal"
    REFUSED = "refused"
    OVERSIZED = "oversized"


@dataclass(frozen=True)
class ConstraintContext:
    """Per-scenario limits: device and kernel maxima plus known refusals."""

    device_max: int
    kernel_max: int
    refused: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.device_max < 1 or self.kernel_max < 1:
            raise InvalidArgument("maximum workgroup sizes must be >= 1")
        object.__setattr__(self, "refused", frozenset(self.refused))
        limit = self.effective_max
        for w in self.refused:
            if w.area() > limit:
                raise InvalidArgument(f"refused size {w} exceeds the effective maximum {limit}; it is illegal, not refused")

    @property
    def effective_max(self) -> int:
        return min(self.device_max, self.kernel_max)

    def with_refused(self, extra: Iterable[WorkgroupSize]) -> "ConstraintContext":
        return ConstraintContext(self.device_max, self.kernel_max, self.refused | frozenset(extra))


def enumerate_space(effective_max: int) -> list[WorkgroupSize]:
    """All even ``(w_c, w_r)`` pairs whose area fits under ``effective_max``."""
    if effective_max < 4:
        raise EmptySpace(f"no even workgroup size fits under a maximum of {effective_max}")
    out = []
    for c in range(2, effective_max // 2 + 1, 2):
        for r in range(2, effective_max // c + 1, 2):
            out.append(WorkgroupSize(c, r))
    return out


def is_legal(w: WorkgroupSize, ctx: ConstraintContext) -> bool:
    return w.area() <= ctx.effective_max and w not in ctx.refused


def legal_set(space: Iterable[WorkgroupSize], ctx: ConstraintContext) -> list[WorkgroupSize]:
    return [w for w in space if is_legal(w, ctx)]


def safe_set(contexts, space) -> set[WorkgroupSize]:
    contexts = list(contexts)
    if not contexts:
        raise InvalidArgument("safe_set needs at least one constraint context")
    return {w for w in space if all(is_legal(w, ctx) for ctx in contexts)}


class SampleTable:
    """Observed runtimes (ms) keyed by ``(scenario_id, WorkgroupSize)``.

    Runtimes for a test case are stored as a read-only float array. The
    table is immutable once built; use :meth:`from_observations` to group
    one-observation-per-line data.
    """

    def __init__(self, rows: Iterable = ()):
        data: dict[tuple[str, WorkgroupSize], np.ndarray] = {}
        for sid, w, runtimes in rows:
            key = (str(sid), w)
            if key in data:
                raise DuplicateTestCase(f"duplicate test case {sid} {w}")
            arr = np.array(runtimes, dtype=float).reshape(-1)
            if arr.size == 0:
                raise InvalidArgument(f"test case {sid} {w} has no runtimes")
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise InvalidArgument(f"test case {sid} {w} has a non-positive or non-finite runtime")
            arr.setflags(write=False)
            data[key] = arr
        self._data = dict(sorted(data.items()))
        self._means = {k: float(np.mean(v)) for k, v in self._data.items()}
        by_scenario: dict[str, list[WorkgroupSize]] = {}
        for sid, w in self._data:
            by_scenario.setdefault(sid, []).append(w)
        self._by_scenario = by_scenario

    @classmethod
    def from_observations(cls, observations: Iterable) -> "SampleTable":
        grouped: dict[tuple[str, WorkgroupSize], list[float]] = {}
        for sid, w, t in observations:
            grouped.setdefault((sid, w), []).append(t)
        return cls((sid, w, ts) for (sid, w), ts in grouped.items())

    def __len__(self):
        return len(self._data)

    def __iter__(self) -> Iterator[tuple[str, WorkgroupSize, np.ndarray]]:
        for (sid, w), arr in self._data.items():
            yield sid, w, arr

    def __contains__(self, key):
        return key in self._data

    def __eq__(self, other):
        if not isinstance(other, SampleTable):
            return NotImplemented
        if self._data.keys() != other._data.keys():
            return False
        return all(np.array_equal(v, other._data[k]) for k, v in self._data.items())

    def __repr__(self):
        return f"SampleTable({len(self._by_scenario)} scenarios, {len(self)} test cases)"

    def scenario_ids(self) -> list[str]:
        return list(self._by_scenario)

    def sizes(self, scenario_id: str) -> list[WorkgroupSize]:
        try:
            return list(self._by_scenario[scenario_id])
        except KeyError:
            raise UnknownScenario(f"no samples for scenario {scenario_id!r}") from None

    def runtimes(self, scenario_id: str, w: WorkgroupSize) -> np.ndarray:
        try:
            return self._data[(scenario_id, w)]
        except KeyError:
            raise UnknownTestCase(f"no samples for {scenario_id!r} at {w}") from None

    def mean(self, scenario_id: str, w: WorkgroupSize) -> float:
        try:
            return self._means[(scenario_id, w)]
        except KeyError:
            raise UnknownTestCase(f"no samples for {scenario_id!r} at {w}") from None

    def n_observations(self) -> int:
        return sum(v.size for v in self._data.values())

    def subset(self, scenario_ids: Iterable[str]) -> "SampleTable":
        keep = set(scenario_ids)
        return SampleTable((sid, w, arr) for sid, w, arr in self if sid in keep)


def oracle(scenario_id: str, table: SampleTable) -> WorkgroupSize:
    """Size with the lowest mean runtime; ties go to the smallest ``(w_c, w_r)``."""
    best, best_t = None, math.inf
    for w in table.sizes(scenario_id):
        t = table.mean(scenario_id, w)
        if t < best_t:
            best, best_t = w, t
    return best


def performance(scenario_id: str, w: WorkgroupSize, table: SampleTable) -> float:
    return table.mean(scenario_id, oracle(scenario_id, table)) / table.mean(scenario_id, w)


def speedup(scenario_id: str, w: WorkgroupSize, base: WorkgroupSize, table: SampleTable) -> float:
    return table.mean(scenario_id, base) / table.mean(scenario_id, w)


def log_geomean_performance(training_scenarios, table: SampleTable, sizes) -> dict[WorkgroupSize, float]:
    """Mean log-performance of each size across the training scenarios."""
    training_scenarios = list(training_scenarios)
    if not training_scenarios:
        raise InvalidArgument("need at least one training scenario")
    best_means = {s: table.mean(s, oracle(s, table)) for s in training_scenarios}
    out = {}
    for w in sizes:
        out[w] = math.fsum(math.log(best_means[s] / table.mean(s, w)) for s in training_scenarios) / len(training_scenarios)
    return out


def rank_safe(training_scenarios, table: SampleTable, safe) -> list[WorkgroupSize]:
    """Safe sizes ordered best-first by geometric-mean performance."""
    if not safe:
        raise NoSafeParameter("the safe set is empty")
    scores = log_geomean_performance(training_scenarios, table, sorted(safe))
    return sorted(scores, key=lambda w: (-scores[w], w))


def baseline_param(training_scenarios, table: SampleTable, safe) -> WorkgroupSize:
    return rank_safe(training_scenarios, table, safe)[0]
