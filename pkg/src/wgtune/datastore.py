"""Reading and writing descriptors, sample tables and refused sets.

File formats
------------
samples CSV
    header ``scenario_id,w_c,w_r,runtime_ms``, one line per observation.
    Lines for the same test case are grouped into one row on load.
refused CSV
    header ``scenario_id,w_c,w_r``.
external measurements CSV
    header ``device_id,kernel,width,height,in_type,out_type,w_c,w_r,runtime_ms``.
    Device and kernel must be registered in a descriptor directory.
descriptor directory
    ``devices/<id>.json``, ``kernels/<name>.json``, ``datasets/<W>x<H>-<IN>-<OUT>.json``
    and ``scenarios.json``, a list of ``{"device", "kernel", "dataset"}``
    references (dataset given by its key ``<W>x<H>/<IN>-<OUT>``).
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .errors import DuplicateTestCase, InvalidDescriptor, ParseError, UnknownScenario
from .features import SCHEMA
from .scenario import (
    DataType,
    DatasetDescriptor,
    DeviceDescriptor,
    KernelDescriptor,
    Scenario,
    make_scenario,
)
from .space import SampleTable, WorkgroupSize

SAMPLES_HEADER = ["scenario_id", "w_c", "w_r", "runtime_ms"]
REFUSED_HEADER = ["scenario_id", "w_c", "w_r"]
EXTERNAL_HEADER = ["device_id", "kernel", "width", "height", "in_type", "out_type", "w_c", "w_r", "runtime_ms"]


def format_runtime(t: float) -> str:
    # repr is the shortest string that round-trips the double exactly
    return repr(float(t))


def save_samples(table: SampleTable, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(SAMPLES_HEADER)
        for sid, w, runtimes in table:
            for t in runtimes:
                out.writerow([sid, w.w_c, w.w_r, format_runtime(t)])


def _parse_int(text, what, line):
    try:
        v = int(text)
    except (TypeError, ValueError):
        raise ParseError(f"{what} {text!r} is not an integer", line) from None
    if v < 1:
        raise ParseError(f"{what} must be positive, got {v}", line)
    return v


def _parse_runtime(text, line):
    try:
        t = float(text)
    except (TypeError, ValueError):
        raise ParseError(f"runtime {text!r} is not a number", line) from None
    if not math.isfinite(t) or t <= 0:
        raise ParseError(f"runtime must be positive and finite, got {text!r}", line)
    return t


def _rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError("empty file, expected a header", 1) from None
        if first != header:
            raise ParseError(f"expected header {','.join(header)}, got {','.join(first)}", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
            yield lineno, row


def load_samples(path) -> SampleTable:
    """Load a samples CSV.

    Observations must be contiguous per test case; a test case that reappears
    after other rows is reported as a duplicate.
    """
    grouped: dict[tuple[str, WorkgroupSize], list[float]] = {}
    last = None
    for lineno, (sid, c, r, t) in _rows(path, SAMPLES_HEADER):
        if not sid:
            raise ParseError("empty scenario id", lineno)
        key = (sid, WorkgroupSize(_parse_int(c, "w_c", lineno), _parse_int(r, "w_r", lineno)))
        runtime = _parse_runtime(t, lineno)
        if key != last and key in grouped:
            raise DuplicateTestCase(f"line {lineno}: test case {sid} {key[1]} appears in two separate blocks")
        grouped.setdefault(key, []).append(runtime)
        last = key
    return SampleTable((sid, w, ts) for (sid, w), ts in grouped.items())


def save_refused(refused: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(REFUSED_HEADER)
        for sid in sorted(refused):
            for w in sorted(refused[sid]):
                out.writerow([sid, w.w_c, w.w_r])


def load_refused(path) -> dict:
    out: dict[str, set] = {}
    for lineno, (sid, c, r) in _rows(path, REFUSED_HEADER):
        out.setdefault(sid, set()).add(WorkgroupSize(_parse_int(c, "w_c", lineno), _parse_int(r, "w_r", lineno)))
    return {sid: frozenset(ws) for sid, ws in out.items()}


# descriptors


def device_to_json(d: DeviceDescriptor) -> dict:
    return {
        "kind": "device",
        "id": d.id,
        "device_type": d.device_type.value,
        "vendor_class": d.vendor_class.value,
        "compute_units": d.compute_units,
        "frequency_mhz": d.frequency_mhz,
        "local_mem_kb": d.local_mem_kb,
        "global_cache_kb": d.global_cache_kb,
        "global_mem_mb": d.global_mem_mb,
        "device_max_wgsize": d.device_max_wgsize,
        "simd_width": d.simd_width,
    }


def kernel_to_json(k: KernelDescriptor) -> dict:
    return {
        "kind": "kernel",
        "name": k.name,
        "north": k.north,
        "south": k.south,
        "east": k.east,
        "west": k.west,
        "instr_counts": dict(k.instr_counts),
        "total_instructions": k.total_instructions,
        "complexity": k.complexity,
    }


def dataset_to_json(ds: DatasetDescriptor) -> dict:
    return {
        "kind": "dataset",
        "width": ds.width,
        "height": ds.height,
        "in_type": ds.in_type.value,
        "out_type": ds.out_type.value,
    }


def _build(cls, doc: dict, kind: str):
    if not isinstance(doc, dict):
        raise InvalidDescriptor(f"{kind} descriptor must be a JSON object")
    doc = dict(doc)
    if doc.pop("kind", kind) != kind:
        raise InvalidDescriptor(f"expected a {kind} descriptor")
    try:
        return cls(**doc)
    except TypeError as e:
        raise InvalidDescriptor(f"bad {kind} descriptor: {e}") from None


def device_from_json(doc) -> DeviceDescriptor:
    return _build(DeviceDescriptor, doc, "device")


def kernel_from_json(doc) -> KernelDescriptor:
    return _build(KernelDescriptor, doc, "kernel")


def dataset_from_json(doc) -> DatasetDescriptor:
    return _build(DatasetDescriptor, doc, "dataset")


def scenario_to_json(s: Scenario) -> dict:
    return {"device": device_to_json(s.device), "kernel": kernel_to_json(s.kernel), "dataset": dataset_to_json(s.dataset)}


def scenario_from_json(doc) -> Scenario:
    if not isinstance(doc, dict) or not {"device", "kernel", "dataset"} <= set(doc):
        raise InvalidDescriptor("scenario needs device, kernel and dataset objects")
    return make_scenario(device_from_json(doc["device"]), kernel_from_json(doc["kernel"]), dataset_from_json(doc["dataset"]))


def _dump(doc, path: Path):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_descriptors(root, devices, kernels, datasets, scenarios=()) -> None:
    root = Path(root)
    for sub in ("devices", "kernels", "datasets"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    for d in devices:
        _dump(device_to_json(d), root / "devices" / f"{d.id}.json")
    for k in kernels:
        _dump(kernel_to_json(k), root / "kernels" / f"{k.name}.json")
    for ds in datasets:
        _dump(dataset_to_json(ds), root / "datasets" / f"{ds.key.replace('/', '-')}.json")
    refs = [{"device": s.device.id, "kernel": s.kernel.name, "dataset": s.dataset.key} for s in scenarios]
    _dump(refs, root / "scenarios.json")


class Registry:
    """Descriptors loaded from a descriptor directory."""

    def __init__(self, devices, kernels, datasets, scenarios=()):
        self.devices = {d.id: d for d in devices}
        self.kernels = {k.name: k for k in kernels}
        self.datasets = {ds.key: ds for ds in datasets}
        self.scenarios = {s.id: s for s in scenarios}

    @classmethod
    def load(cls, root) -> "Registry":
        root = Path(root)
        if not root.is_dir():
            raise FileNotFoundError(f"descriptor directory {root} does not exist")

        def load_all(sub, fn):
            out = []
            for p in sorted((root / sub).glob("*.json")):
                try:
                    out.append(fn(json.loads(p.read_text())))
                except json.JSONDecodeError as e:
                    raise ParseError(f"{p}: {e.msg}", e.lineno) from None
            return out

        reg = cls(load_all("devices", device_from_json), load_all("kernels", kernel_from_json), load_all("datasets", dataset_from_json))
        manifest = root / "scenarios.json"
        if manifest.exists():
            for ref in json.loads(manifest.read_text()):
                s = reg.resolve(ref["device"], ref["kernel"], ref["dataset"])
                reg.scenarios[s.id] = s
        return reg

    def resolve(self, device_id: str, kernel_name: str, dataset) -> Scenario:
        try:
            device = self.devices[device_id]
            kernel = self.kernels[kernel_name]
        except KeyError as e:
            raise UnknownScenario(f"unregistered descriptor {e.args[0]!r}") from None
        if isinstance(dataset, str):
            try:
                dataset = self.datasets[dataset]
            except KeyError:
                raise UnknownScenario(f"unregistered dataset {dataset!r}") from None
        return make_scenario(device, kernel, dataset)

    def resolve_id(self, sid: str) -> Scenario:
        """Resolve a ``device/kernel/WxH/IN-OUT`` scenario id."""
        if sid in self.scenarios:
            return self.scenarios[sid]
        parts = sid.split("/")
        if len(parts) != 4:
            raise UnknownScenario(f"malformed scenario id {sid!r}")
        return self.resolve(parts[0], parts[1], "/".join(parts[2:]))


def import_external(path, descriptor_dir) -> SampleTable:
    """Import externally measured runtimes.

    ``descriptor_dir`` is a path or an already loaded :class:`Registry`; every
    scenario the file references is added to the registry's scenarios.
    Repeated lines for one (scenario, size) are merged into a single sample.
    """
    reg = descriptor_dir if isinstance(descriptor_dir, Registry) else Registry.load(descriptor_dir)
    observations = []
    for lineno, (dev, kern, width, height, in_t, out_t, c, r, t) in _rows(path, EXTERNAL_HEADER):
        try:
            ds = DatasetDescriptor(_parse_int(width, "width", lineno), _parse_int(height, "height", lineno), DataType(in_t), DataType(out_t))
        except ValueError as e:
            raise ParseError(str(e), lineno) from None
        try:
            s = reg.resolve(dev, kern, ds)
        except UnknownScenario as e:
            raise UnknownScenario(f"line {lineno}: {e}") from None
        reg.scenarios.setdefault(s.id, s)
        w = WorkgroupSize(_parse_int(c, "w_c", lineno), _parse_int(r, "w_r", lineno))
        observations.append((s.id, w, _parse_runtime(t, lineno)))
    return SampleTable.from_observations(observations)


def load_table_for(path, scenarios: dict) -> SampleTable:
    table = load_samples(path)
    unknown = set(table.scenario_ids()) - set(scenarios)
    if unknown:
        raise UnknownScenario(f"samples reference unregistered scenarios: {sorted(unknown)[:3]}")
    return table


def save_features(rows, path) -> None:
    """Write ``(scenario_id, FeatureVector)`` pairs as CSV, one column per feature."""
    rows = list(rows)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["scenario_id", *(rows[0][1].names if rows else SCHEMA)])
        for sid, f in rows:
            out.writerow([sid, *(repr(v) for v in f.values)])
