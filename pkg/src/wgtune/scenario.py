"""Device, kernel and dataset descriptors, and scenarios built from them."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import InvalidDescriptor

INSTRUCTION_CATEGORIES = ("load", "store", "int_arith", "float_arith", "branch", "vector", "call", "other")


class DeviceType(str, enum.Enum):
    CPU = "CPU"
    GPU = "GPU"


class VendorClass(str, enum.Enum):
    INTEL_CPU = "INTEL_CPU"
    AMD_GPU = "AMD_GPU"
    NVIDIA_GPU = "NVIDIA_GPU"
    OTHER = "OTHER"

    @property
    def ordinal(self) -> int:
        return list(VendorClass).index(self)


class DataType(str, enum.Enum):
    INT32 = "INT32"
    FLOAT32 = "FLOAT32"
    FLOAT64 = "FLOAT64"

    @property
    def size(self) -> int:
        return 8 if self is DataType.FLOAT64 else 4


def _positive_int(name, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise InvalidDescriptor(f"{name} must be an integer >= {minimum}, got {value!r}")


@dataclass(frozen=True)
class DeviceDescriptor:
    id: str
    device_type: DeviceType
    vendor_class: VendorClass
    compute_units: int
    frequency_mhz: int
    local_mem_kb: int
    global_cache_kb: int
    global_mem_mb: int
    device_max_wgsize: int
    simd_width: int

    def __post_init__(self):
        try:
            object.__setattr__(self, "device_type", DeviceType(self.device_type))
            object.__setattr__(self, "vendor_class", VendorClass(self.vendor_class))
        except ValueError as e:
            raise InvalidDescriptor(str(e)) from None
        if not self.id or "/" in self.id:
            raise InvalidDescriptor(f"device id must be non-empty and contain no '/': {self.id!r}")
        for name in ("compute_units", "frequency_mhz", "local_mem_kb", "global_mem_mb", "device_max_wgsize", "simd_width"):
            _positive_int(name, getattr(self, name))
        _positive_int("global_cache_kb", self.global_cache_kb, minimum=0)
        m = self.device_max_wgsize
        if m < 64 or m & (m - 1):
            raise InvalidDescriptor(f"device_max_wgsize must be a power of two >= 64, got {m}")
        if self.simd_width not in (8, 16, 32, 64):
            raise InvalidDescriptor(f"simd_width must be one of 8, 16, 32, 64, got {self.simd_width}")


@dataclass(frozen=True)
class KernelDescriptor:
    name: str
    north: int
    south: int
    east: int
    west: int
    instr_counts: dict = field(hash=False)
    total_instructions: int
    complexity: bool = False

    def __post_init__(self):
        if not self.name or "/" in self.name:
            raise InvalidDescriptor(f"kernel name must be non-empty and contain no '/': {self.name!r}")
        for name in ("north", "south", "east", "west"):
            v = getattr(self, name)
            _positive_int(name, v, minimum=0)
            if v > 64:
                raise InvalidDescriptor(f"border {name}={v} exceeds 64")
        counts = dict(self.instr_counts)
        unknown = set(counts) - set(INSTRUCTION_CATEGORIES)
        if unknown:
            raise InvalidDescriptor(f"unknown instruction categories: {sorted(unknown)}")
        counts = {c: counts.get(c, 0) for c in INSTRUCTION_CATEGORIES}
        for c, v in counts.items():
            _positive_int(f"instr_counts[{c}]", v, minimum=0)
        _positive_int("total_instructions", self.total_instructions)
        if sum(counts.values()) != self.total_instructions:
            raise InvalidDescriptor(
                f"instruction counts sum to {sum(counts.values())}, expected {self.total_instructions}"
            )
        object.__setattr__(self, "instr_counts", counts)
        object.__setattr__(self, "complexity", bool(self.complexity))

    @property
    def borders(self) -> tuple[int, int, int, int]:
        return (self.north, self.south, self.east, self.west)


@dataclass(frozen=True)
class DatasetDescriptor:
    width: int
    height: int
    in_type: DataType
    out_type: DataType

    def __post_init__(self):
        _positive_int("width", self.width)
        _positive_int("height", self.height)
        try:
            object.__setattr__(self, "in_type", DataType(self.in_type))
            object.__setattr__(self, "out_type", DataType(self.out_type))
        except ValueError as e:
            raise InvalidDescriptor(str(e)) from None

    @property
    def key(self) -> str:
        return f"{self.width}x{self.height}/{self.in_type.value}-{self.out_type.value}"

    @property
    def element_count(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class Scenario:
    device: DeviceDescriptor
    kernel: KernelDescriptor
    dataset: DatasetDescriptor
    id: str


def scenario_id(device: DeviceDescriptor, kernel: KernelDescriptor, dataset: DatasetDescriptor) -> str:
    return f"{device.id}/{kernel.name}/{dataset.key}"


def make_scenario(device, kernel, dataset) -> Scenario:
    if not isinstance(device, DeviceDescriptor):
        raise InvalidDescriptor(f"expected a DeviceDescriptor, got {type(device).__name__}")
    if not isinstance(kernel, KernelDescriptor):
        raise InvalidDescriptor(f"expected a KernelDescriptor, got {type(kernel).__name__}")
    if not isinstance(dataset, DatasetDescriptor):
        raise InvalidDescriptor(f"expected a DatasetDescriptor, got {type(dataset).__name__}")
    return Scenario(device, kernel, dataset, scenario_id(device, kernel, dataset))
