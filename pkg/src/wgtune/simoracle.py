"""Simulated execution oracle: runtimes and refusals without OpenCL hardware.

The performance model is synthetic. It exists to produce a constrained,
device-dependent landscape with the qualitative features seen on real
hardware (vendor-specific refusals, SIMD alignment, local-memory limits),
not to predict real kernels. For a scenario ``s`` and size ``w`` the
noise-free runtime in milliseconds is::

    elements / (compute_units * frequency_mhz * 1000)
        * (mix_work + halo_work(w))          # per-element work
        * occupancy_penalty(w, simd_width)
        * scheduling_penalty(#workgroups)
        * spill_penalty(w)

``mix_work`` is the instruction count weighted by per-category cost, so the
runtime never decreases when any instruction count grows. ``halo_work``
charges each work-item for its share of the border region loaded into the
tile. Measured samples multiply that value by lognormal noise.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import IllegalWorkgroupSize, InvalidArgument, RefusedParameter
from .scenario import (
    INSTRUCTION_CATEGORIES,
    DatasetDescriptor,
    DeviceDescriptor,
    KernelDescriptor,
    Scenario,
    VendorClass,
)
from .space import (
    ConstraintContext,
    Probe,
    SampleTable,
    WorkgroupSize,
    enumerate_space,
)

INSTRUCTION_COST = {
    "load": 2.0,
    "store": 2.0,
    "int_arith": 1.0,
    "float_arith": 1.5,
    "branch": 2.0,
    "vector": 1.0,
    "call": 6.0,
    "other": 1.0,
}
# cost of fetching one 4-byte border element from global memory
HALO_COST = 6.0

# per vendor: base refusal rate, per-workgroup launch overhead (element
# equivalents), latency-hiding target (work-items), column-coalescing
# weight, large-workgroup pressure weight
_VENDOR = {
    VendorClass.INTEL_CPU: dict(refusal=0.10, overhead=48.0, latency=0.0, coalesce=0.0, pressure=0.25),
    VendorClass.NVIDIA_GPU: dict(refusal=0.03, overhead=2.0, latency=4.0, coalesce=0.25, pressure=0.6),
    VendorClass.AMD_GPU: dict(refusal=0.0, overhead=2.0, latency=4.0, coalesce=0.25, pressure=0.5),
    VendorClass.OTHER: dict(refusal=0.05, overhead=8.0, latency=2.0, coalesce=0.1, pressure=0.4),
}

# sizes this small are never refused by the hash rule
_ALWAYS_ACCEPTED_AREA = 16
_WIDEST_ELEMENT = 8


@dataclass(frozen=True)
class OracleConfig:
    noise_sigma: float = 0.05
    seed: int = 0
    min_samples: int = 30

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise InvalidArgument("noise_sigma must be >= 0")
        if self.min_samples < 1:
            raise InvalidArgument("min_samples must be >= 1")


def _unit_hash(*parts) -> float:
    h = hashlib.blake2b("|".join(str(p) for p in parts).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little") / 2.0**64


def _kernel_key(kernel: KernelDescriptor) -> str:
    return f"{kernel.name}:{kernel.north},{kernel.south},{kernel.east},{kernel.west}"


def tile_bytes(kernel: KernelDescriptor, w_c, w_r, elem_size: int):
    """Local-memory footprint of one workgroup's tile including its border."""
    return (w_c + kernel.east + kernel.west) * (w_r + kernel.north + kernel.south) * elem_size


def kernel_max_wgsize(device: DeviceDescriptor, kernel: KernelDescriptor) -> int:
    m = device.device_max_wgsize
    limit = m
    if kernel.total_instructions > 400:
        limit //= 2
    if tile_bytes(kernel, m, 1, _WIDEST_ELEMENT) > device.local_mem_kb * 1024:
        limit //= 2
    return max(64, limit)


def effective_max(s: Scenario) -> int:
    return min(s.device.device_max_wgsize, kernel_max_wgsize(s.device, s.kernel))


def refusal_probability(device: DeviceDescriptor, w: WorkgroupSize) -> float:
    """Chance that the hash rule refuses ``w`` (before the local-memory rule)."""
    if w.area() <= _ALWAYS_ACCEPTED_AREA:
        return 0.0
    p = _VENDOR[device.vendor_class]["refusal"]
    if w.w_c % 8 == 0 and w.w_r % 8 == 0:
        p /= 4
    return p


def is_refused(device: DeviceDescriptor, kernel: KernelDescriptor, w: WorkgroupSize, dataset: DatasetDescriptor | None = None) -> bool:
    """Deterministic refusal decision for ``w`` on ``(device, kernel)``.

    Most of the refusal mass is keyed on (device, size) so that a driver
    tends to reject the same sizes across kernels; the rest is kernel
    specific. Tiles that overflow local memory are refused outright, except
    on AMD devices which never refuse. Without a dataset, 4-byte elements
    are assumed for the tile.
    """
    if device.vendor_class is VendorClass.AMD_GPU:
        return False
    elem = dataset.out_type.size if dataset is not None else 4
    if tile_bytes(kernel, w.w_c, w.w_r, elem) > device.local_mem_kb * 1024:
        return True
    p = refusal_probability(device, w)
    if p == 0.0:
        return False
    return _unit_hash(device.id, w) < 0.7 * p or _unit_hash(device.id, _kernel_key(kernel), w) < 0.3 * p


def refused_set(s: Scenario, space=None) -> frozenset:
    if space is None:
        space = enumerate_space(effective_max(s))
    return frozenset(w for w in space if is_refused(s.device, s.kernel, w, s.dataset))


def constraint_context(s: Scenario, refused=()) -> ConstraintContext:
    return ConstraintContext(s.device.device_max_wgsize, kernel_max_wgsize(s.device, s.kernel), frozenset(refused))


def model_runtimes(s: Scenario, w_c, w_r) -> np.ndarray:
    """Noise-free runtime (ms) for arrays of column and row sizes.

    Defined for any positive size, legal or not, so it can serve as a
    perfect regressor in tests.
    """
    d, k, ds = s.device, s.kernel, s.dataset
    vp = _VENDOR[d.vendor_class]
    w_c = np.asarray(w_c, dtype=float)
    w_r = np.asarray(w_r, dtype=float)
    area = w_c * w_r
    scale = ds.element_count / float(d.compute_units * d.frequency_mhz * 1000)

    mix_work = float(sum(k.instr_counts[c] * INSTRUCTION_COST[c] for c in INSTRUCTION_CATEGORIES))
    halo_ratio = (w_c + k.east + k.west) * (w_r + k.north + k.south) / area
    halo_work = HALO_COST * (ds.in_type.size / 4) * (halo_ratio - 1.0)

    simd = d.simd_width
    if d.device_type.value == "CPU":
        # implicit vectorisation runs along the columns
        lanes = np.ceil(w_c / simd) * simd / w_c
        alignment = 1.0 + 0.5 * (lanes - 1.0)
    else:
        alignment = np.ceil(area / simd) * simd / area
    latency = 1.0 + vp["latency"] * simd / area
    coalesce = 1.0 + vp["coalesce"] * (simd / 2) / w_c
    kmax = kernel_max_wgsize(d, k)
    pressure = 1.0 + vp["pressure"] * (k.total_instructions / 200.0) * (area / kmax) ** 2
    occupancy = alignment * latency * coalesce * pressure

    n_groups = ds.element_count / area
    scheduling = 1.0 + vp["overhead"] * n_groups / ds.element_count

    tile = tile_bytes(k, w_c, w_r, ds.out_type.size)
    spill = 1.0 + np.maximum(0.0, tile / (d.local_mem_kb * 1024) - 1.0)

    return scale * (mix_work + halo_work) * occupancy * scheduling * spill


def model_runtime(s: Scenario, w: WorkgroupSize) -> float:
    return float(model_runtimes(s, w.w_c, w.w_r))


def _noise(s: Scenario, w: WorkgroupSize, cfg: OracleConfig) -> np.ndarray:
    if cfg.noise_sigma == 0:
        return np.ones(cfg.min_samples)
    key = int.from_bytes(hashlib.blake2b(s.id.encode(), digest_size=8).digest(), "little")
    rng = np.random.default_rng([cfg.seed & 0xFFFFFFFF, key & 0xFFFFFFFF, key >> 32, w.w_c, w.w_r])
    return np.exp(cfg.noise_sigma * rng.standard_normal(cfg.min_samples))


def probe(s: Scenario, w: WorkgroupSize) -> Probe:
    if w.area() > effective_max(s):
        return Probe.OVERSIZED
    if is_refused(s.device, s.kernel, w, s.dataset):
        return Probe.REFUSED
    return Probe.LEGAL


def run(s: Scenario, w: WorkgroupSize, cfg: OracleConfig) -> list[float]:
    """Simulate ``cfg.min_samples`` executions of ``s`` at ``w``."""
    outcome = probe(s, w)
    if outcome is Probe.OVERSIZED:
        raise IllegalWorkgroupSize(f"{w} exceeds the maximum workgroup size {effective_max(s)} of {s.id}")
    if outcome is Probe.REFUSED:
        raise RefusedParameter(w)
    return list(model_runtime(s, w) * _noise(s, w, cfg))


def collect(scenarios, cfg: OracleConfig) -> tuple[SampleTable, dict]:
    """Exhaustively enumerate every scenario's space.

    Returns the sample table and a mapping from scenario id to the frozenset
    of sizes the simulated runtime refused.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise InvalidArgument("collect needs at least one scenario")
    rows, refused = [], {}
    for s in sorted(scenarios, key=lambda s: s.id):
        space = enumerate_space(effective_max(s))
        rej = refused_set(s, space)
        refused[s.id] = rej
        legal = [w for w in space if w not in rej]
        base = model_runtimes(s, [w.w_c for w in legal], [w.w_r for w in legal])
        for w, t in zip(legal, base):
            rows.append((s.id, w, float(t) * _noise(s, w, cfg)))
    return SampleTable(rows), refused
