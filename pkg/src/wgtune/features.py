"""Feature vectors describing a scenario (schema ``fv1``, 29 features)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentCounts, InvalidArgument
from .scenario import INSTRUCTION_CATEGORIES, DeviceType, Scenario

SCHEMA_VERSION = "fv1"

DEVICE_FEATURES = (
    "compute_units",
    "frequency_mhz",
    "local_mem_kb",
    "global_cache_kb",
    "global_mem_mb",
    "device_max_wgsize",
    "simd_width",
    "is_cpu",
    "is_gpu",
    "vendor_class",
)
KERNEL_FEATURES = (
    "north",
    "south",
    "east",
    "west",
    "total_instructions",
    *(f"density_{c}" for c in INSTRUCTION_CATEGORIES),
    "complexity",
)
DATASET_FEATURES = ("width", "height", "in_type_size_bytes", "out_type_size_bytes", "element_count")

SCHEMA = DEVICE_FEATURES + KERNEL_FEATURES + DATASET_FEATURES


@dataclass(frozen=True)
class FeatureVector:
    names: tuple
    values: tuple

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise InvalidArgument("feature names and values differ in length")

    def __len__(self):
        return len(self.names)

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def items(self):
        return zip(self.names, self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def densities(counts: dict, total: int) -> dict:
    if total <= 0:
        raise InvalidArgument("total instruction count must be positive")
    if sum(counts.values()) != total:
        raise InconsistentCounts(f"counts sum to {sum(counts.values())}, expected {total}")
    return {c: counts.get(c, 0) / total for c in INSTRUCTION_CATEGORIES}


def extract(s: Scenario) -> FeatureVector:
    d, k, ds = s.device, s.kernel, s.dataset
    dens = densities(k.instr_counts, k.total_instructions)
    values = [
        d.compute_units,
        d.frequency_mhz,
        d.local_mem_kb,
        d.global_cache_kb,
        d.global_mem_mb,
        d.device_max_wgsize,
        d.simd_width,
        1 if d.device_type is DeviceType.CPU else 0,
        1 if d.device_type is DeviceType.GPU else 0,
        d.vendor_class.ordinal,
        k.north,
        k.south,
        k.east,
        k.west,
        k.total_instructions,
        *(dens[c] for c in INSTRUCTION_CATEGORIES),
        1 if k.complexity else 0,
        ds.width,
        ds.height,
        ds.in_type.size,
        ds.out_type.size,
        ds.element_count,
    ]
    return FeatureVector(SCHEMA, tuple(float(v) for v in values))
