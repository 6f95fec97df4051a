import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiraltrap.geometry import (
    DisorderSpec,
    LatticeGeometry,
    NearZeroSpacingWarning,
    ZoneSpec,
    apply_disorder,
    build_lattice,
    positive_spacing,
    three_zone,
)


def test_two_zone_phases_and_interface():
    lat = build_lattice([(3, math.pi), (3, math.pi / 2)])
    assert lat.n_atoms == 7
    assert lat.zone_boundaries == (4,)
    np.testing.assert_allclose(lat.bonds, [math.pi] * 3 + [math.pi / 2] * 3)
    assert lat.phases[0] == 0.0
    assert lat.zone_sites(0) == (1, 4)
    assert lat.zone_sites(1) == (4, 7)


def test_hundred_atom_array_probes_at_30_and_70():
    lat = build_lattice([(29, math.pi / 2), (40, math.pi), (30, math.pi / 2)])
    assert lat.n_atoms == 100
    assert lat.zone_boundaries == (30, 70)
    # interface atoms sit between two different bonds
    b = lat.bonds
    assert b[28] != b[29] and b[68] != b[69]


def test_three_zone_counts():
    lat = three_zone(3, 1, math.pi / 2, math.pi)
    assert lat.n_atoms == 7
    assert lat.zone_boundaries == (3, 5)
    np.testing.assert_allclose(lat.bonds, [math.pi / 2] * 2 + [math.pi] * 2 + [math.pi / 2] * 2)
    homog = three_zone(1, 4, math.pi / 2, math.pi)
    assert homog.n_atoms == 6
    np.testing.assert_allclose(homog.bonds, math.pi)


def test_single_atom_and_single_zone_have_no_interfaces():
    lat = build_lattice([(1, 1.0)])
    assert lat.zone_boundaries == ()
    solo = LatticeGeometry([0.0])
    assert solo.n_atoms == 1 and solo.bonds.size == 0


@pytest.mark.parametrize("xi", [0.0, -1.0, float("nan"), float("inf")])
def test_invalid_spacing_rejected(xi):
    with pytest.raises(ValueError):
        ZoneSpec(2, xi)


@pytest.mark.parametrize("count", [0, -1, 1.5])
def test_invalid_bond_count_rejected(count):
    with pytest.raises(ValueError):
        ZoneSpec(count, 1.0)


def test_near_zero_spacing_warns():
    with pytest.warns(NearZeroSpacingWarning):
        ZoneSpec(2, 0.01)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ZoneSpec(2, 0.5)


def test_phases_read_only_and_ordered():
    lat = build_lattice([(2, 1.0)])
    with pytest.raises(ValueError):
        lat.phases[0] = 5.0
    with pytest.raises(ValueError):
        LatticeGeometry([0.0, 1.0, 1.0])


def test_positive_spacing_preserves_phase_factor():
    for xi in np.linspace(-math.pi, math.pi, 41):
        w = positive_spacing(xi)
        assert w >= 0.05
        assert abs(np.exp(1j * w) - np.exp(1j * xi)) < 1e-12


def test_disorder_zero_fraction_is_identity():
    lat = build_lattice([(5, 1.0)])
    out = apply_disorder(lat, DisorderSpec(0.0, seed=3, realizations=5), 2)
    np.testing.assert_array_equal(out.phases, lat.phases)
    assert out.info["rejections"] == 0


def test_disorder_reproducible_and_distinct_per_realization():
    lat = build_lattice([(20, math.pi)])
    spec = DisorderSpec(0.01, seed=7, realizations=10)
    a = apply_disorder(lat, spec, 3).phases
    b = apply_disorder(lat, spec, 3).phases
    c = apply_disorder(lat, spec, 4).phases
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    other_seed = apply_disorder(lat, DisorderSpec(0.01, seed=8, realizations=10), 3).phases
    assert not np.array_equal(a, other_seed)


def test_disorder_statistics_match_requested_width():
    lat = build_lattice([(199, math.pi)])
    spec = DisorderSpec(0.01, seed=1, realizations=50)
    shifts = np.concatenate([apply_disorder(lat, spec, r).phases - lat.phases for r in range(50)])
    target = 2 * math.pi * 0.01
    assert abs(shifts.mean()) < 4 * target / math.sqrt(shifts.size)
    assert abs(shifts.std() / target - 1) < 0.03


def test_spacing_scaled_disorder_width():
    lat = build_lattice([(3, 2.0), (3, 1.0)])
    np.testing.assert_allclose(DisorderSpec(0.1, scale="spacing").sigma(lat), [0.2] * 3 + [0.1] * 4)


def test_disorder_rejects_bad_arguments():
    with pytest.raises(ValueError):
        DisorderSpec(-0.1)
    with pytest.raises(ValueError):
        DisorderSpec(0.1, scale="furlong")
    with pytest.raises(ValueError):
        apply_disorder(build_lattice([(2, 1.0)]), DisorderSpec(0.1, realizations=2), 2)


def test_large_disorder_redraws_to_keep_order():
    lat = build_lattice([(9, 0.2)])
    out = apply_disorder(lat, DisorderSpec(0.01, seed=0, realizations=20), 5)
    assert np.all(np.diff(out.phases) > 0)
    assert out.info["rejections"] >= 0


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.tuples(st.integers(1, 6), st.floats(0.1, 6.0)), min_size=1, max_size=4),
)
def test_build_lattice_bond_bookkeeping(zones):
    lat = build_lattice(zones)
    assert lat.n_atoms == 1 + sum(b for b, _ in zones)
    np.testing.assert_allclose(lat.bonds, np.concatenate([[xi] * b for b, xi in zones]))
    assert len(lat.zone_boundaries) == len(zones) - 1
