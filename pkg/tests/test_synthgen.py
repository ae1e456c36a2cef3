import pytest
from hypothesis import given, settings, strategies as st

from wgtune.errors import InvalidArgument
from wgtune.scenario import DataType, VendorClass
from wgtune.synthgen import (
    generate_datasets,
    generate_kernels,
    is_synthetic,
    reference_devices,
    reference_kernels,
    standard_scenarios,
)


def test_deterministic():
    assert generate_kernels(5, 42) == generate_kernels(5, 42)


def test_bad_n():
    with pytest.raises(InvalidArgument):
        generate_kernels(0, 1)


def test_ranges_over_1000_draws():
    ks = generate_kernels(1000, 3)
    for k in ks:
        assert all(1 <= b <= 30 for b in k.borders)
        lo, hi = (592, 706) if k.complexity else (67, 137)
        assert lo <= k.total_instructions <= hi
        assert sum(k.instr_counts.values()) == k.total_instructions
        assert is_synthetic(k)
    assert [k.name for k in ks[:2]] == ["synthetic-3-0", "synthetic-3-1"]
    # both classes appear
    assert {k.complexity for k in ks} == {True, False}


def test_complex_kernels_lean_on_float():
    ks = generate_kernels(400, 9)
    heavy = [k.instr_counts["float_arith"] / k.total_instructions for k in ks if k.complexity]
    light = [k.instr_counts["float_arith"] / k.total_instructions for k in ks if not k.complexity]
    assert sum(heavy) / len(heavy) > sum(light) / len(light)


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_distinct_seeds_distinct_names(a, b):
    if a != b:
        assert {k.name for k in generate_kernels(3, a)}.isdisjoint(k.name for k in generate_kernels(3, b))


def test_reference_kernels():
    ks = {k.name: k for k in reference_kernels()}
    assert len(ks) == 6
    assert ks["gol"].borders == (1, 1, 1, 1) and ks["gol"].total_instructions == 190
    assert ks["threshold"].borders == (0, 0, 0, 0) and ks["threshold"].total_instructions == 46
    assert ks["gaussian"].borders == (5, 5, 5, 5) and ks["gaussian"].total_instructions == 82
    assert {n: k.total_instructions for n, k in ks.items()} == {"gaussian": 82, "gol": 190, "he": 113, "nms": 224, "sobel": 246, "threshold": 46}
    assert reference_kernels(gaussian_border=9)[0].borders == (9, 9, 9, 9)
    assert not any(is_synthetic(k) for k in ks.values())


def test_datasets():
    ds = generate_datasets()
    assert len(ds) == 12
    assert all(d.width == d.height for d in ds)
    assert any(d.width == 512 and d.in_type is DataType.FLOAT32 and d.out_type is DataType.FLOAT32 for d in ds)


def test_devices():
    ds = reference_devices()
    assert len(ds) == 7
    assert sum(d.vendor_class is VendorClass.AMD_GPU for d in ds) == 1


def test_standard_scenarios():
    sc = standard_scenarios()
    assert len(sc) == 50 and len({s.id for s in sc}) == 50
    assert sum(is_synthetic(s.kernel) for s in sc) == 40
    assert len({s.device.id for s in sc}) == 7
    assert [s.id for s in sc] == [s.id for s in standard_scenarios()]
