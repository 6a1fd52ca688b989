"""
Blob Regions - Grunsky disks, residue pairings and cylinder blob estimates
Location: geometry/blob_regions.py

The blob of a marked point x is the set of positions its image can take over
all embeddings in a fixed homotopy class. This module provides:
- the Grunsky region-of-values disk for log(f(z)/z) over schlicht maps
- residue pairings that give the first-order change of extremal length
- inner and outer estimates of blobs for flat cylinders
- the ray path from a point of a round disk to its conformal center
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from shapely.geometry import LineString, MultiLineString, box

from config import BLOB_CONFIG, CLI_CONFIG, MODULUS_CONFIG, TOLERANCE_CONFIG
from geometry.errors import PreconditionError
from geometry.foliation_el import ConductorDomain, annulus_modulus_numeric
from utils.logger import get_logger

logger = get_logger("blob_regions")

SLACK = TOLERANCE_CONFIG["exact"]
EXCLUDED = "excluded"
UNDECIDED = "undecided"


# ============= GRUNSKY DISK =============

@dataclass(frozen=True)
class GrunskyDisk:
    """Closed disk of possible values of log(f(z)/z) for f univalent on the unit disk."""

    z: complex
    center: complex
    radius: float

    def contains(self, w: complex, slack: float = SLACK) -> bool:
        return abs(w - self.center) <= self.radius + slack

    def excess(self, w: complex) -> float:
        return abs(w - self.center) - self.radius

    def to_dict(self) -> Dict:
        return {
            "z": [self.z.real, self.z.imag],
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
        }


@dataclass(frozen=True)
class RoundDisk:
    center: complex
    radius: float


@dataclass
class GrunskyCheck:
    disk: GrunskyDisk
    samples: int
    violations: int
    max_excess: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> Dict:
        return {
            "disk": self.disk.to_dict(),
            "samples": self.samples,
            "violations": self.violations,
            "max_excess": self.max_excess,
            "passed": self.passed,
        }


def grunsky_disk(z: complex) -> GrunskyDisk:
    """
    Disk that holds log(f(z)/z) for every f in class S.

    Args:
        z: Point of the open unit disk

    Returns:
        GrunskyDisk: center log(1/(1-|z|^2)) and radius log((1+|z|)/(1-|z|))
    """
    z = complex(z)
    r = abs(z)
    if r >= 1.0:
        raise PreconditionError(f"|z| = {r:.6g} is not inside the unit disk", hypothesis="|z|<1")
    center = math.log(1.0 / (1.0 - r * r))
    radius = math.log((1.0 + r) / (1.0 - r))
    return GrunskyDisk(z, complex(center, 0.0), radius)


def koebe_function(a: complex, w: complex) -> complex:
    """w / (1 - a w)^2; univalent on the unit disk for |a| <= 1."""
    return w / (1.0 - a * w) ** 2


def koebe_log_ratio(a: complex, z: complex) -> complex:
    # principal branch is the continuous one since Re(1 - a z) > 0
    return -2.0 * cmath.log(1.0 - a * z)


def koebe_boundary_value(z: complex) -> complex:
    """log(k(z)/z) for the Koebe function k(w) = w/(1-w)^2."""
    return koebe_log_ratio(1.0, z)


def _koebe_parameters(samples: int, rng: np.random.Generator) -> np.ndarray:
    ring = np.exp(2j * np.pi * np.arange(64) / 64)
    fixed = np.concatenate([[0.0, 0.5, -0.5, 0.7j, -0.7j], ring])
    count = max(0, samples - len(fixed))
    radius = np.sqrt(rng.uniform(0.0, 1.0, count))
    angle = rng.uniform(0.0, 2 * np.pi, count)
    return np.concatenate([fixed, radius * np.exp(1j * angle)])


def sample_class_S_check(
    z: complex,
    samples: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> GrunskyCheck:
    """
    Sample rotated Koebe functions and count values outside the Grunsky disk at z.

    Args:
        z: Point of the open unit disk
        samples: Number of Koebe parameters; BLOB_CONFIG grunsky_samples when None
        rng: Parameter source; seeded from CLI_CONFIG when None

    Returns:
        GrunskyCheck: sample count, violations and the largest excess over the radius
    """
    disk = grunsky_disk(z)
    if samples is None:
        samples = BLOB_CONFIG["grunsky_samples"]
    if rng is None:
        rng = np.random.default_rng(CLI_CONFIG["default_seed"])
    params = _koebe_parameters(samples, rng)
    values = -2.0 * np.log(1.0 - params * disk.z)
    excess = np.abs(values - disk.center) - disk.radius
    violations = int(np.count_nonzero(excess > SLACK))
    if violations:
        logger.warning("%d Koebe samples left the Grunsky disk at z=%s", violations, disk.z)
    return GrunskyCheck(disk, len(params), violations, float(excess.max()))


# ============= RESIDUE PAIRING =============

@dataclass(frozen=True)
class ResiduePole:
    """Simple pole of a quadratic differential, q ~ c_minus1 / (z - location) dz^2."""

    location: complex
    c_minus1: complex

    def q(self, z):
        return self.c_minus1 / (z - self.location)


@dataclass
class QuadratureReport:
    numeric: float
    predicted: float
    error: float
    resolution: int
    rho1: float
    rho2: float

    @property
    def relative_error(self) -> float:
        return self.error / abs(self.predicted) if self.predicted else self.error

    def to_dict(self) -> Dict:
        d = dict(self.__dict__)
        d["relative_error"] = self.relative_error
        return d


@dataclass
class SectorScan:
    angles: np.ndarray
    values: np.ndarray
    negative_arc: Tuple[float, float]
    sign_changes: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "angles": self.angles.tolist(),
            "values": self.values.tolist(),
            "negative_arc": list(self.negative_arc),
            "sign_changes": self.sign_changes,
        }


def residue_pairing(pole: ResiduePole, v: complex) -> complex:
    """Residue of q·v at the pole, the first-order change of EL when the pole moves by v."""
    if v == 0:
        raise PreconditionError("displacement vector must be non-zero", hypothesis="v != 0")
    return pole.c_minus1 * complex(v)


def vertical_direction(pole: ResiduePole) -> complex:
    """Unit v with c·v real and negative: the direction in which EL decreases fastest."""
    c = complex(pole.c_minus1)
    if c == 0:
        raise PreconditionError("pole has zero residue coefficient", hypothesis="c_-1 != 0")
    return -c.conjugate() / abs(c)


def residue_sector_scan(pole: ResiduePole, n: Optional[int] = None) -> SectorScan:
    """Re(res(q · e^{iθ} v)) around the circle, with v the vertical direction."""
    if n is None:
        n = BLOB_CONFIG["sector_scan_angles"]
    v = vertical_direction(pole)
    angles = np.linspace(-np.pi, np.pi, n, endpoint=False)
    values = np.real(pole.c_minus1 * v * np.exp(1j * angles))
    negative = values < 0
    flips = np.nonzero(negative != np.roll(negative, -1))[0]
    changes = [float(0.5 * (angles[k] + angles[(k + 1) % n] + (2 * np.pi if k == n - 1 else 0.0))) for k in flips]
    return SectorScan(angles, values, (-math.pi / 2, math.pi / 2), changes)


def _bump(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Smooth step from 1 at s=0 to 0 at s=1, and its derivative."""
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        a = np.exp(-1.0 / s)
        b = np.exp(-1.0 / (1.0 - s))
        total = a + b
        phi = 1.0 - a / total
        dphi = -a * b * (1.0 / s**2 + 1.0 / (1.0 - s) ** 2) / total**2
    return phi, np.nan_to_num(dphi)


def pairing_quadrature_check(
    pole: ResiduePole,
    v: complex,
    rho1: float,
    rho2: float,
    resolution: Optional[int] = None,
    holomorphic: Optional[Callable] = None,
) -> QuadratureReport:
    """Re ∫ q ∂̄(φ v) dA over rho1 < |z - p| < rho2 against -π Re(c v).

    φ is a radial bump equal to 1 inside rho1 and 0 outside rho2. Adding a
    holomorphic part to q leaves the integral unchanged.
    """
    if not 0 < rho1 < rho2:
        raise PreconditionError("need 0 < rho1 < rho2", hypothesis="0<rho1<rho2")
    if resolution is None:
        resolution = BLOB_CONFIG["quadrature_resolution"]
    n = int(resolution)
    dr = (rho2 - rho1) / n
    r = rho1 + (np.arange(n) + 0.5) * dr
    alpha = (np.arange(n) + 0.5) * (2 * np.pi / n)
    R, A = np.meshgrid(r, alpha, indexing="ij")
    z = pole.location + R * np.exp(1j * A)

    _, dphi = _bump((R - rho1) / (rho2 - rho1))
    dbar_phi = 0.5 * dphi / (rho2 - rho1) * np.exp(1j * A)
    q = pole.q(z)
    if holomorphic is not None:
        q = q + holomorphic(z)
    integrand = q * complex(v) * dbar_phi * R
    numeric = float(np.real(integrand.sum() * dr * (2 * np.pi / n)))
    predicted = float(-math.pi * np.real(pole.c_minus1 * complex(v)))
    return QuadratureReport(numeric, predicted, abs(numeric - predicted), n, rho1, rho2)


# ============= CYLINDER BLOBS =============

@dataclass
class ExclusionVerdict:
    """One-sided test: `excluded` is certified, `undecided` claims nothing."""

    candidate_height: float
    verdict: str
    needed_below: float
    needed_above: float
    available_below: Optional[float] = None
    available_above: Optional[float] = None
    reason: str = ""

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


@dataclass
class BlobEstimate:
    hX: float
    hY: float
    x_height: float
    inner: Tuple[float, float]
    outer: Tuple[float, float]
    sampled: List[ExclusionVerdict]

    @property
    def inner_in_outer(self) -> bool:
        lo, hi = self.inner
        return all(v.verdict == UNDECIDED for v in self.sampled if lo <= v.candidate_height <= hi)

    @property
    def outer_connected(self) -> bool:
        kept = [v.verdict == UNDECIDED for v in self.sampled]
        if not any(kept):
            return False
        first, last = kept.index(True), len(kept) - 1 - kept[::-1].index(True)
        return all(kept[first: last + 1])

    def region_polygons(self, circumference: float = 1.0) -> Dict[str, List[List[float]]]:
        """Both estimates are unions of full horizontal circles, drawn as bands."""
        bands = {}
        for name, (lo, hi) in (("inner", self.inner), ("outer", self.outer)):
            bands[name] = [[0.0, lo], [circumference, lo], [circumference, hi], [0.0, hi]]
        return bands

    def to_dict(self) -> Dict:
        return {
            "hX": self.hX,
            "hY": self.hY,
            "x_height": self.x_height,
            "inner": list(self.inner),
            "outer": list(self.outer),
            "inner_in_outer": self.inner_in_outer,
            "outer_connected": self.outer_connected,
            "rotation_invariant": True,
            "regions": self.region_polygons(),
            "sampled": [v.to_dict() for v in self.sampled],
        }


def _check_cylinders(hX: float, hY: float, x_height: float):
    if not 0 < hX <= hY:
        raise PreconditionError(f"need 0 < hX <= hY, got hX={hX}, hY={hY}", hypothesis="hX<=hY")
    if not 0 < x_height < hX:
        raise PreconditionError(f"marked point height {x_height} is not inside C({hX})", hypothesis="0<x<hX")


def slit_ring(hY: float, height: float, from_bottom: bool, circumference: float = 1.0) -> ConductorDomain:
    """C(hY) with a vertical slit joining one boundary circle to the point at `height`.

    Among rings in C(hY) minus the point that separate it from the other
    boundary circle, this one has the largest modulus (Grötzsch-type extremal
    domain), so its modulus bounds what can fit on that side of the point.
    """
    x0 = 0.5 * circumference
    bottom = LineString([(0.0, 0.0), (circumference, 0.0)])
    top = LineString([(0.0, hY), (circumference, hY)])
    if from_bottom:
        zero = MultiLineString([list(bottom.coords), [(x0, 0.0), (x0, height)]])
        one = top
    else:
        zero = bottom
        one = MultiLineString([list(top.coords), [(x0, height), (x0, hY)]])
    side = "above" if from_bottom else "below"
    return ConductorDomain(box(0.0, 0.0, circumference, hY), zero, one, circumference, f"C({hY}) {side} {height}")


def el_exclusion_test(
    hX: float,
    hY: float,
    x_height: float,
    candidate_height: float,
    grid_h: Optional[float] = None,
    tolerance: Optional[float] = None,
) -> ExclusionVerdict:
    """Can an embedding C(hX) -> C(hY) homotopic to inclusion send x to height `candidate_height`?

    The part of C(hX) above x is an annulus of modulus hX - x_height that must
    land in a ring of C(hY) separating the image point from the top circle, and
    likewise below. Extremal length of the core curves is monotone under
    embeddings, so a ring needing more modulus than the extremal slit ring
    offers is certified impossible.
    """
    _check_cylinders(hX, hY, x_height)
    if tolerance is None:
        tolerance = BLOB_CONFIG["exclusion_tolerance"]
    need_below, need_above = x_height, hX - x_height
    verdict = ExclusionVerdict(candidate_height, UNDECIDED, need_below, need_above)
    if not 0 < candidate_height < hY:
        verdict.verdict = EXCLUDED
        verdict.reason = "candidate is not an interior point of C(hY)"
        return verdict
    if grid_h is None:
        grid_h = hY / MODULUS_CONFIG["grid_divisions"]

    try:
        above = annulus_modulus_numeric(slit_ring(hY, candidate_height, from_bottom=True), grid_h).modulus
        below = annulus_modulus_numeric(slit_ring(hY, candidate_height, from_bottom=False), grid_h).modulus
    except PreconditionError as exc:
        verdict.reason = f"solver could not resolve the candidate: {exc}"
        return verdict
    verdict.available_above, verdict.available_below = above, below

    if need_above > above * (1.0 + tolerance):
        verdict.verdict = EXCLUDED
        verdict.reason = f"upper annulus needs modulus {need_above:.6g} but at most {above:.6g} fits"
    elif need_below > below * (1.0 + tolerance):
        verdict.verdict = EXCLUDED
        verdict.reason = f"lower annulus needs modulus {need_below:.6g} but at most {below:.6g} fits"
    return verdict


def cylinder_blob_estimate(
    hX: float,
    hY: float,
    x_height: float,
    samples: Optional[int] = None,
    grid_h: Optional[float] = None,
) -> BlobEstimate:
    """
    Bracket the heights a conformal embedding C(hX) -> C(hY) can send the point x to.

    The inner estimate comes from the translation family, the outer one from exclusion tests.

    Args:
        hX: Height of the domain cylinder
        hY: Height of the target cylinder
        x_height: Height of x in C(hX)
        samples: Target heights tested; BLOB_CONFIG outer_height_samples when None
        grid_h: Grid spacing for the modulus solves behind each exclusion test

    Returns:
        BlobEstimate: inner and outer intervals with every sampled verdict
    """
    _check_cylinders(hX, hY, x_height)
    if samples is None:
        samples = BLOB_CONFIG["outer_height_samples"]

    # embeddings t + (inclusion) for 0 <= t <= hY - hX reach these heights
    inner = (x_height, x_height + hY - hX)

    heights = sorted(set(((np.arange(samples) + 0.5) * hY / samples).tolist()) | {inner[0], inner[1]})
    sampled = [el_exclusion_test(hX, hY, x_height, h, grid_h) for h in heights]
    kept = [v.candidate_height for v in sampled if v.verdict == UNDECIDED]
    outer = (min(kept), max(kept)) if kept else inner

    estimate = BlobEstimate(hX, hY, x_height, inner, outer, sampled)
    logger.info(
        "blob of C(%g) point at %g in C(%g): inner [%g, %g], outer [%g, %g]",
        hX, x_height, hY, inner[0], inner[1], outer[0], outer[1],
    )
    if not estimate.inner_in_outer:
        logger.warning("an inner-estimate height was excluded; solver tolerance is too tight")
    return estimate


# ============= DISK RAY PATH =============

def conformal_center(disk) -> complex:
    """For a round disk the Riemann map from the unit disk sending 0 to the center is affine."""
    return complex(disk.center)


def disk_ray_path(disk, w: complex) -> Callable[[float], complex]:
    """γ(0) = w, γ(t) = w on [0, 1/2], then the straight segment to the center.

    Works for any round disk (GrunskyDisk or RoundDisk).
    """
    c = conformal_center(disk)
    w = complex(w)
    if abs(w - c) > disk.radius + TOLERANCE_CONFIG["exact"]:
        raise PreconditionError(f"point {w} is outside the disk", hypothesis="w in disk")

    def gamma(t: float) -> complex:
        if not 0.0 <= t <= 1.0:
            raise PreconditionError(f"path parameter {t} outside [0, 1]", hypothesis="0<=t<=1")
        if t <= 0.5:
            return w
        return w + (2.0 * t - 1.0) * (c - w)

    return gamma


def sample_path(gamma: Callable[[float], complex], count: int = 65) -> List[complex]:
    return [gamma(t) for t in np.linspace(0.0, 1.0, count)]


if __name__ == "__main__":
    d = grunsky_disk(0.5)
    print(f"Grunsky disk at 0.5: center {d.center.real:.6f}, radius {d.radius:.6f}")
    print(f"Koebe boundary value at 0.5: {koebe_boundary_value(0.5).real:.6f}")
    print(f"sample check: {sample_class_S_check(0.5, 2000, np.random.default_rng(0)).to_dict()}")
    pole = ResiduePole(0j, 1.0)
    print(f"quadrature: {pairing_quadrature_check(pole, -1.0, 0.1, 0.5, 128).to_dict()}")
