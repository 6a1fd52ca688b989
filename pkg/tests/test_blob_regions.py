"""
Unit tests for Grunsky disks, residue pairings and cylinder blob estimates
Location: tests/test_blob_regions.py
"""

import math

import numpy as np
import pytest

from geometry.blob_regions import (
    EXCLUDED,
    UNDECIDED,
    ResiduePole,
    RoundDisk,
    conformal_center,
    cylinder_blob_estimate,
    disk_ray_path,
    el_exclusion_test,
    grunsky_disk,
    koebe_boundary_value,
    koebe_function,
    pairing_quadrature_check,
    residue_pairing,
    residue_sector_scan,
    sample_class_S_check,
    sample_path,
    vertical_direction,
)
from geometry.errors import PreconditionError


# ============= TEST 1: GRUNSKY DISK =============

def test_grunsky_disk_at_one_half():
    disk = grunsky_disk(0.5)
    assert disk.center == pytest.approx(math.log(4 / 3))
    assert disk.radius == pytest.approx(math.log(3))


def test_koebe_value_lies_on_the_rim():
    disk = grunsky_disk(0.5)
    assert koebe_boundary_value(0.5) == pytest.approx(math.log(4))
    assert abs(disk.excess(koebe_boundary_value(0.5))) < 1e-12


@pytest.mark.parametrize("z", [0.5, 0.3j, -0.6 + 0.2j, 0.95])
def test_koebe_family_stays_in_disk(z, rng):
    check = sample_class_S_check(z, 10_000, rng)
    assert check.passed
    assert check.samples >= 10_000
    assert check.max_excess <= 1e-9


def test_default_sampling_is_seeded():
    first = sample_class_S_check(0.5, 300)
    second = sample_class_S_check(0.5, 300)
    assert first.samples == second.samples
    assert first.max_excess == second.max_excess


def test_grunsky_needs_interior_point():
    with pytest.raises(PreconditionError) as exc:
        grunsky_disk(1.0)
    assert exc.value.hypothesis == "|z|<1"


# ============= TEST 2: RESIDUE PAIRING =============

def test_residue_pairing_is_bilinear():
    pole = ResiduePole(0j, 1 + 1j)
    assert residue_pairing(pole, 1j) == -1 + 1j
    with pytest.raises(PreconditionError):
        residue_pairing(pole, 0)


@pytest.mark.parametrize("c", [1.0, 2j, -0.5 + 0.3j])
def test_vertical_direction_makes_pairing_negative(c):
    pole = ResiduePole(0j, c)
    v = vertical_direction(pole)
    value = residue_pairing(pole, v)
    assert abs(v) == pytest.approx(1.0)
    assert value.imag == pytest.approx(0.0, abs=1e-12)
    assert value.real == pytest.approx(-abs(c))


def test_sector_scan_is_negative_on_a_half_circle():
    scan = residue_sector_scan(ResiduePole(0j, 1.5), 720)
    step = 2 * math.pi / 720
    assert len(scan.sign_changes) == 2
    assert sorted(abs(abs(a) - math.pi / 2) <= step for a in scan.sign_changes) == [True, True]
    negative = scan.angles[scan.values < 0]
    assert np.all(np.abs(negative) <= math.pi / 2 + step)


def test_quadrature_matches_predicted_value():
    pole = ResiduePole(0.2 + 0.1j, 1.0 - 0.5j)
    report = pairing_quadrature_check(pole, -1.0, 0.1, 0.5, resolution=256)
    assert report.predicted == pytest.approx(-math.pi * (pole.c_minus1 * -1.0).real)
    assert report.relative_error < 0.01


def test_quadrature_ignores_holomorphic_part():
    pole = ResiduePole(0j, 1.0)
    plain = pairing_quadrature_check(pole, 1j, 0.1, 0.5, resolution=128)
    shifted = pairing_quadrature_check(pole, 1j, 0.1, 0.5, resolution=128, holomorphic=lambda z: 3 + z ** 2)
    assert shifted.numeric == pytest.approx(plain.numeric, abs=1e-9)


def test_quadrature_needs_ordered_radii():
    with pytest.raises(PreconditionError):
        pairing_quadrature_check(ResiduePole(0j, 1.0), 1.0, 0.5, 0.1)


# ============= TEST 3: CYLINDER BLOBS =============

def test_cylinder_blob_estimates():
    """
    Validates:
    - the inner estimate is the translation family's band
    - the outer estimate contains it, is connected, and excludes the extremes
    """
    estimate = cylinder_blob_estimate(1.0, 2.0, 0.5, samples=8, grid_h=1 / 32)
    assert estimate.inner == pytest.approx((0.5, 1.5))
    assert estimate.inner_in_outer
    assert estimate.outer_connected
    assert estimate.outer[0] <= 0.5 and estimate.outer[1] >= 1.5
    assert estimate.outer[0] > 0.125 and estimate.outer[1] < 1.875
    assert set(estimate.region_polygons()) == {"inner", "outer"}


def test_exclusion_outside_the_cylinder():
    verdict = el_exclusion_test(1.0, 2.0, 0.5, 2.5)
    assert verdict.verdict == EXCLUDED


def test_inner_height_is_never_excluded():
    verdict = el_exclusion_test(1.0, 2.0, 0.5, 1.0, grid_h=1 / 32)
    assert verdict.verdict == UNDECIDED
    assert verdict.available_above > verdict.needed_above


def test_blob_needs_point_inside_domain():
    with pytest.raises(PreconditionError) as exc:
        cylinder_blob_estimate(1.0, 2.0, 1.5)
    assert exc.value.hypothesis == "0<x<hX"


# ============= TEST 4: DISK RAY PATH =============

def test_disk_ray_path_waits_then_moves_to_center():
    gamma = disk_ray_path(RoundDisk(0j, 1.0), 0.5)
    assert gamma(0.0) == 0.5
    assert gamma(0.5) == 0.5
    assert gamma(0.75) == pytest.approx(0.25)
    assert gamma(1.0) == pytest.approx(0.0)
    assert len(sample_path(gamma, 11)) == 11


def test_disk_ray_path_rejects_outside_point():
    with pytest.raises(PreconditionError):
        disk_ray_path(RoundDisk(0j, 1.0), 2.0)
    with pytest.raises(PreconditionError):
        disk_ray_path(RoundDisk(0j, 1.0), 0.5)(1.5)


@pytest.mark.parametrize("z", [0.5, 0.2 + 0.3j, -0.7j])
def test_koebe_boundary_value_is_log_ratio(z):
    assert koebe_boundary_value(z) == pytest.approx(np.log(koebe_function(1.0, z) / z))


def test_round_disk_center_is_conformal_center():
    assert conformal_center(RoundDisk(0.3 + 0.1j, 0.5)) == 0.3 + 0.1j
