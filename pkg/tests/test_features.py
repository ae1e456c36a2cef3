import math

import pytest
from hypothesis import given, strategies as st

from wgtune.errors import InconsistentCounts, InvalidArgument
from wgtune.features import SCHEMA, SCHEMA_VERSION, densities, extract
from wgtune.scenario import INSTRUCTION_CATEGORIES, DatasetDescriptor, KernelDescriptor, make_scenario
from wgtune.synthgen import generate_datasets, generate_kernels, reference_devices, reference_kernels


def test_schema_shape():
    assert SCHEMA_VERSION == "fv1"
    assert len(SCHEMA) == 29 and len(set(SCHEMA)) == 29


def test_density_one_category():
    d = densities({"load": 1}, 1)
    assert d["load"] == 1.0 and sum(d.values()) == 1.0


def test_density_symmetric():
    d = densities({c: 1 for c in INSTRUCTION_CATEGORIES}, 8)
    assert set(d.values()) == {0.125}


def test_gol_densities():
    k = next(k for k in reference_kernels() if k.name == "gol")
    d = densities(k.instr_counts, 190)
    for c in INSTRUCTION_CATEGORIES:
        assert d[c] == k.instr_counts[c] / 190
    assert abs(sum(d.values()) - 1) < 1e-9


def test_density_errors():
    with pytest.raises(InvalidArgument):
        densities({}, 0)
    with pytest.raises(InconsistentCounts):
        densities({"load": 2}, 3)


def test_extract_values():
    k = KernelDescriptor("k", 1, 2, 3, 4, {"load": 20, "other": 80}, 100)
    s = make_scenario(reference_devices()[0], k, DatasetDescriptor(1024, 1024, "INT32", "FLOAT64"))
    f = extract(s)
    assert f.names == SCHEMA
    assert f["density_load"] == 0.20
    assert f["element_count"] == 1048576
    assert (f["north"], f["west"]) == (1, 4)
    assert (f["in_type_size_bytes"], f["out_type_size_bytes"]) == (4, 8)
    assert (f["is_cpu"], f["is_gpu"]) == (1, 0)
    assert extract(s) == f


@given(
    st.sampled_from(reference_devices()),
    st.sampled_from(generate_kernels(30, 7) + reference_kernels()),
    st.sampled_from(generate_datasets()),
)
def test_extract_invariants(d, k, ds):
    f = extract(make_scenario(d, k, ds))
    assert len(f) == 29
    assert all(math.isfinite(v) for v in f.values)
    dens = [f[f"density_{c}"] for c in INSTRUCTION_CATEGORIES]
    assert all(0 <= v <= 1 for v in dens)
    assert abs(sum(dens) - 1) < 1e-9
