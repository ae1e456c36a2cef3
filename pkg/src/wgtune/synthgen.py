"""Synthetic and reference stencil descriptors, devices and scenario sets."""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .scenario import (
    INSTRUCTION_CATEGORIES,
    DataType,
    DatasetDescriptor,
    DeviceDescriptor,
    KernelDescriptor,
    make_scenario,
)

SYNTHETIC_PREFIX = "synthetic-"
BORDER_RANGE = (1, 30)
LIGHT_INSTRUCTIONS = (67, 137)
COMPLEX_INSTRUCTIONS = (592, 706)
DATASET_SIZES = (512, 1024, 2048, 4096)
TYPE_PAIRS = (
    (DataType.INT32, DataType.INT32),
    (DataType.FLOAT32, DataType.FLOAT32),
    (DataType.FLOAT64, DataType.FLOAT64),
)

# category weights for the instruction split, in INSTRUCTION_CATEGORIES order
_LIGHT_MIX = (0.32, 0.14, 0.24, 0.10, 0.08, 0.02, 0.02, 0.08)
_COMPLEX_MIX = (0.26, 0.04, 0.14, 0.38, 0.06, 0.04, 0.02, 0.06)


def generate_kernels(n: int, seed: int) -> list[KernelDescriptor]:
    """Draw ``n`` synthetic stencil kernels, reproducibly for a given seed."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        complexity = bool(rng.integers(0, 2))
        n_, s_, e_, w_ = (int(v) for v in rng.integers(BORDER_RANGE[0], BORDER_RANGE[1] + 1, size=4))
        lo, hi = COMPLEX_INSTRUCTIONS if complexity else LIGHT_INSTRUCTIONS
        total = int(rng.integers(lo, hi + 1))
        mix = _COMPLEX_MIX if complexity else _LIGHT_MIX
        split = rng.multinomial(total, mix)
        out.append(
            KernelDescriptor(
                name=f"{SYNTHETIC_PREFIX}{seed}-{k}",
                north=n_,
                south=s_,
                east=e_,
                west=w_,
                instr_counts={c: int(v) for c, v in zip(INSTRUCTION_CATEGORIES, split)},
                total_instructions=total,
                complexity=complexity,
            )
        )
    return out


def _counts(*values):
    return dict(zip(INSTRUCTION_CATEGORIES, values))


def reference_kernels(gaussian_border: int = 5) -> list[KernelDescriptor]:
    """The six hand-written stencil kernels.

    Borders and totals follow the reference benchmark table; the split of each
    total into instruction categories is a fixture choice.
    """
    if not 1 <= gaussian_border <= 10:
        raise InvalidArgument("gaussian border must be within 1..10")
    g = gaussian_border
    return [
        KernelDescriptor("gaussian", g, g, g, g, _counts(26, 2, 20, 22, 6, 0, 2, 4), 82),
        KernelDescriptor("gol", 1, 1, 1, 1, _counts(48, 2, 86, 0, 30, 0, 4, 20), 190),
        KernelDescriptor("he", 1, 1, 1, 1, _counts(30, 2, 36, 28, 8, 0, 2, 7), 113),
        KernelDescriptor("nms", 1, 1, 1, 1, _counts(52, 2, 70, 54, 26, 0, 4, 16), 224),
        KernelDescriptor("sobel", 1, 1, 1, 1, _counts(60, 2, 74, 70, 18, 0, 6, 16), 246),
        KernelDescriptor("threshold", 0, 0, 0, 0, _counts(8, 2, 14, 6, 6, 0, 2, 8), 46),
    ]


def generate_datasets() -> list[DatasetDescriptor]:
    return [DatasetDescriptor(n, n, i, o) for n in DATASET_SIZES for i, o in TYPE_PAIRS]


def reference_devices() -> list[DeviceDescriptor]:
    """Seven devices modelled on the experimental platforms.

    Frequencies are in MHz. Maximum workgroup sizes are scaled down for the
    CPUs (real drivers report 8192) to keep exhaustive enumeration cheap.
    """
    D = DeviceDescriptor
    return [
        D("i5-2430M", "CPU", "INTEL_CPU", 4, 2400, 32, 256, 7937, 1024, 8),
        D("i5-4570", "CPU", "INTEL_CPU", 4, 3200, 32, 256, 7901, 1024, 8),
        D("i7-3820", "CPU", "INTEL_CPU", 8, 1200, 32, 256, 7944, 1024, 8),
        D("tahiti-7970", "GPU", "AMD_GPU", 32, 1000, 32, 16, 2959, 256, 64),
        D("gtx-590", "GPU", "NVIDIA_GPU", 1, 1215, 48, 256, 1536, 1024, 32),
        D("gtx-690", "GPU", "NVIDIA_GPU", 8, 1019, 48, 128, 2048, 1024, 32),
        D("gtx-titan", "GPU", "NVIDIA_GPU", 14, 980, 48, 224, 6144, 1024, 32),
    ]


def is_synthetic(kernel: KernelDescriptor) -> bool:
    return kernel.name.startswith(SYNTHETIC_PREFIX)


def sample_scenarios(devices, kernels, datasets, n: int, seed: int):
    """Pick ``n`` distinct scenarios, cycling through devices so each appears."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    if n > len(devices) * len(kernels) * len(datasets):
        raise InvalidArgument("not enough distinct (device, kernel, dataset) combinations")
    rng = np.random.default_rng(seed)
    chosen, seen = [], set()
    i = 0
    while len(chosen) < n:
        d = devices[i % len(devices)]
        i += 1
        free = [(k, ds) for k in kernels for ds in datasets if (d.id, k.name, ds.key) not in seen]
        if not free:
            continue
        k, ds = free[int(rng.integers(len(free)))]
        seen.add((d.id, k.name, ds.key))
        chosen.append(make_scenario(d, k, ds))
    return chosen


def mixed_scenarios(synthetic_kernels, n_synthetic: int, n_real: int, seed: int):
    """Scenarios over the reference devices and datasets: ``n_synthetic`` using
    the given synthetic kernels, then ``n_real`` using the reference kernels."""
    devices = reference_devices()
    datasets = generate_datasets()
    out = []
    if n_synthetic:
        out += sample_scenarios(devices, list(synthetic_kernels), datasets, n_synthetic, seed)
    if n_real:
        out += sample_scenarios(devices, reference_kernels(), datasets, n_real, seed + 1)
    return out


def standard_scenarios(n_synthetic: int = 40, n_real: int = 10, seed: int = 0):
    """The default 50-scenario mix used by the tests and experiment scripts."""
    return mixed_scenarios(generate_kernels(max(1, n_synthetic // 2), seed), n_synthetic, n_real, seed)
