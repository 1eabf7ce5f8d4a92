"""Plane geometry of one inductive step: ellipses, hyperbola regions, the map F.

Coordinates follow the step's natural frame: ``x`` runs along w_nu (lattice
spacing q inside a row) and ``y`` is measured in units of the row spacing d,
so a point is passed as ``(x, y_over_d)``.  The two-dimensional lattice is
{(n*a0 + l*q, n)} in these coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .exact import (
    DomainError,
    RationalInterval,
    TWO_OVER_SQRT3_SQ,
    as_fraction,
    floor_sqrt,
    sqrt_interval,
    two_over_sqrt3,
)
from .lattice import RefusalError

CASE1, CASE2 = "case1", "case2"

DEFAULT_ROW_LIMIT = 10 ** 6


class ConfigurationError(ValueError):
    """Parameters violate an inequality the geometry depends on."""


@dataclass(frozen=True)
class EllipseSpec:
    q: Fraction
    x2: Fraction
    y2_over_d: Fraction
    d_sq: Fraction
    dilation: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("q", "x2", "y2_over_d", "d_sq", "dilation"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.q <= 0 or self.y2_over_d <= 0 or self.d_sq <= 0:
            raise DomainError("ellipse needs q, y2 and d_sq positive")
        if self.dilation < 1:
            raise DomainError("dilation must be >= 1")

    def dilated(self, t) -> "EllipseSpec":
        return EllipseSpec(self.q, self.x2, self.y2_over_d, self.d_sq, as_fraction(t))


@dataclass(frozen=True)
class HyperbolaRegionSpec:
    q: Fraction
    a: Fraction
    d_sq: Fraction

    def __post_init__(self):
        for name in ("q", "a", "d_sq"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.q <= 0 or self.d_sq <= 0:
            raise DomainError("hyperbola region needs q, d_sq positive")


@dataclass(frozen=True)
class SegmentUV:
    case_tag: str
    v: RationalInterval
    y_lo_over_d: RationalInterval
    y_hi_over_d: RationalInterval


@dataclass(frozen=True)
class LambdaWindow:
    alpha: Fraction
    omega: Fraction
    lambda_enclosure: RationalInterval

    def __post_init__(self):
        if not self.alpha < self.omega:
            raise DomainError("window needs alpha < omega")
        if not (self.alpha <= self.lambda_enclosure.lo and self.lambda_enclosure.hi <= self.omega):
            raise DomainError("lambda enclosure leaves the window")


def _iv(x) -> RationalInterval:
    return x if isinstance(x, RationalInterval) else RationalInterval.point(x)


def ellipse_contains(e: EllipseSpec, x, y_over_d) -> bool:
    # (x*y2 - y*x2)**2 + (q*y)**2 <= t**2 (q*y2)**2, divided through by d**2
    x, y = as_fraction(x), as_fraction(y_over_d)
    lhs = (x * e.y2_over_d - y * e.x2) ** 2 + (e.q * y) ** 2
    return lhs <= (e.dilation * e.q * e.y2_over_d) ** 2


def hyperbola_region_contains(h: HyperbolaRegionSpec, x, y_over_d) -> bool:
    y = as_fraction(y_over_d)
    if y < 0:
        raise DomainError("the region is only defined for y >= 0")
    x = as_fraction(x)
    return (h.a * y - x) ** 2 + h.q ** 2 >= (h.q * y) ** 2


def hyperbola_intersection_x_sq(q, d_sq) -> Fraction:
    """Squared row-direction coordinate of the meeting point of the two branches.

    The branches through (a, d) and (a+q, d) cross where y**2 = 4 d**2 / 3,
    whatever a and q are.
    """
    q, d_sq = as_fraction(q), as_fraction(d_sq)
    if q <= 0 or d_sq <= 0:
        raise DomainError("q and d_sq must be positive")
    return TWO_OVER_SQRT3_SQ * d_sq


def hyperbola_intersection_point(q, a, d_sq) -> Tuple[Fraction, Fraction]:
    """(x, y**2) of the crossing point; x is rational once y**2 is known, x = (2a+q) y / (2d).

    Returned as (x**2, y**2) so that everything stays rational.
    """
    y_sq = hyperbola_intersection_x_sq(q, d_sq)
    x_sq = (2 * as_fraction(a) + q) ** 2 * y_sq / (4 * as_fraction(d_sq))
    return x_sq, y_sq


def _check_lambda_domain(lam: RationalInterval):
    if lam.lo < 1 or lam.hi ** 2 >= TWO_OVER_SQRT3_SQ:
        raise DomainError(f"lambda {lam!r} must lie in [1, 2/sqrt(3))")


def _sqrt_lam_sq_minus_1(lam: RationalInterval, bits) -> RationalInterval:
    return sqrt_interval(RationalInterval(lam.lo ** 2 - 1, lam.hi ** 2 - 1), bits)


def epsilon_lambda(lam, bits: int = 96) -> RationalInterval:
    """Enclosure of lambda - 2 sqrt(lambda**2 - 1); decreasing in lambda."""
    lam = _iv(lam)
    _check_lambda_domain(lam)
    lo_root = _sqrt_lam_sq_minus_1(RationalInterval.point(lam.hi), bits)
    hi_root = _sqrt_lam_sq_minus_1(RationalInterval.point(lam.lo), bits)
    return RationalInterval(lam.hi - 2 * lo_root.hi, lam.lo - 2 * hi_root.lo)


def segment_endpoints_rs(lam, q, a, bits: int = 96) -> Tuple[RationalInterval, RationalInterval]:
    lam = _iv(lam)
    _check_lambda_domain(lam)
    q, a = as_fraction(q), as_fraction(a)
    root = _sqrt_lam_sq_minus_1(lam, bits)
    r = a * lam + q * root
    s = (a + q) * lam - q * root
    return r, s


def segment_uv(case_tag: str, *, q, a0, k: int, alpha, omega, d_sq,
               lam=None, v=None, bits: int = 96) -> SegmentUV:
    """The vertical segment [U, V] in the plane z=0 (y in units of d).

    case1: abscissa ``v`` given (or derived from ``lam``), y from alpha to omega.
    case2: lambda-dependent segment from the star-body argument; a = a0 + k q.
    """
    alpha, omega = as_fraction(alpha), as_fraction(omega)
    q, a0 = as_fraction(q), as_fraction(a0)
    if case_tag == CASE1:
        if not (0 < alpha < omega < 1):
            raise ConfigurationError("case1 needs 0 < alpha < omega < 1")
        if v is None:
            if lam is None:
                raise ConfigurationError("case1 needs v or lambda")
            v = (a0 + (k + Fraction(1, 2)) * q) * _iv(lam)
        return SegmentUV(CASE1, _iv(v), RationalInterval.point(alpha), RationalInterval.point(omega))
    if case_tag != CASE2:
        raise ConfigurationError(f"unknown case {case_tag!r}")
    if not (1 < alpha < omega) or omega ** 2 >= TWO_OVER_SQRT3_SQ:
        raise ConfigurationError("case2 needs 1 < alpha < omega < 2/sqrt(3)")
    if a0 < 0 or k < 2:
        raise ConfigurationError("case2 needs a0 >= 0 and k >= 2")
    if lam is None:
        raise ConfigurationError("case2 needs lambda")
    lam = _iv(lam)
    a = a0 + k * q
    _, s = segment_endpoints_rs(lam, q, a, bits)
    v_iv = (a + q / 2) * lam
    u_over_d = v_iv * lam / s
    return SegmentUV(CASE2, v_iv, u_over_d, lam)


def segment_inside(inner: SegmentUV, outer: SegmentUV) -> bool:
    """Certified containment of the y-ranges (same abscissa assumed)."""
    return outer.y_lo_over_d.hi <= inner.y_lo_over_d.lo and inner.y_hi_over_d.hi <= outer.y_hi_over_d.lo


def map_F(frame_q, h_sq, d_sq, x2, y2_over_d) -> Tuple[Fraction, Fraction]:
    """Tangency point (x2, y2) in z=0  ->  facet centre (x1, y1) in z=h."""
    q, d_sq, x2, y2 = (as_fraction(t) for t in (frame_q, d_sq, x2, y2_over_d))
    if y2 <= 0:
        raise DomainError("y2 must be positive")
    _check_unic(q, h_sq, d_sq)
    x1 = (x2 * x2 + q * q) / (y2 * q * q * d_sq)
    y1 = x2 / (q * q * d_sq)
    return x1, y1


def map_F_inverse(frame_q, h_sq, d_sq, x1, y1_over_d) -> Tuple[Fraction, Fraction]:
    q, d_sq, x1, y1 = (as_fraction(t) for t in (frame_q, d_sq, x1, y1_over_d))
    if x1 <= 0:
        raise DomainError("x1 must be positive")
    _check_unic(q, h_sq, d_sq)
    x2 = y1 * q * q * d_sq
    y2 = (x2 * x2 + q * q) / (x1 * q * q * d_sq)
    return x2, y2


def _check_unic(q, h_sq, d_sq):
    if h_sq is not None and q * q * d_sq * as_fraction(h_sq) != 1:
        raise DomainError("frame data violate q**2 d**2 h**2 = 1")


def dilation_coefficient(case_tag: str, omega, bits: int = 64) -> Fraction:
    omega = as_fraction(omega)
    if case_tag == CASE1:
        if not 0 < omega < 1:
            raise ConfigurationError("case1 dilation needs 0 < omega < 1")
        return 1 / omega
    if case_tag == CASE2:
        if omega <= 0 or omega ** 2 >= TWO_OVER_SQRT3_SQ:
            raise ConfigurationError("case2 dilation needs omega < 2/sqrt(3)")
        return 1 + two_over_sqrt3(bits).lo - omega
    raise ConfigurationError(f"unknown case {case_tag!r}")


def dangerous_point_excluded(t, lam) -> bool:
    """Row +-1 points at half a lattice step from the chord centre stay outside t*E.

    Exact form of (lam/2)**2 + 1 > (t lam)**2.
    """
    t, lam = as_fraction(t), as_fraction(lam)
    return (lam / 2) ** 2 + 1 > (t * lam) ** 2


def _int_range_sq_le(center: Fraction, half_sq: Fraction) -> Optional[Tuple[int, int]]:
    """Integers l with (l - center)**2 <= half_sq, as (lo, hi) or None."""
    if half_sq < 0:
        return None
    root = floor_sqrt(half_sq)
    lo = (center - root).__floor__() - 1
    while (lo - center) ** 2 > half_sq and lo <= center:
        lo += 1
    hi = (center + root).__ceil__() + 1
    while (hi - center) ** 2 > half_sq and hi >= center:
        hi -= 1
    if lo > hi:
        return None
    return lo, hi


def ellipse_lattice_points(e: EllipseSpec, lattice_q, lattice_a0,
                           enum_limit: int = DEFAULT_ROW_LIMIT) -> List[Tuple[Fraction, int]]:
    """All points (n*a0 + l*q, n) of the lattice inside the closed ellipse e."""
    q, a0 = as_fraction(lattice_q), as_fraction(lattice_a0)
    t = e.dilation
    top_sq = (t * e.y2_over_d) ** 2
    n_max = floor_sqrt(top_sq)
    if 2 * n_max + 1 > enum_limit:
        raise RefusalError(f"{2 * n_max + 1} lattice rows exceed enum_limit={enum_limit}")
    pts = []
    c1 = q * e.y2_over_d
    for n in range(-n_max, n_max + 1):
        rhs = e.q ** 2 * (top_sq - n * n)
        # (l*c1 + c0)**2 <= rhs with c0 from the row offset
        c0 = n * a0 * e.y2_over_d - n * e.x2
        rng = _int_range_sq_le(-c0 / c1, rhs / (c1 * c1))
        if rng is None:
            continue
        for l in range(rng[0], rng[1] + 1):
            pts.append((n * a0 + l * q, n))
    return pts


def lemma5_empty(e: EllipseSpec, lattice_q, lattice_a0,
                 enum_limit: int = DEFAULT_ROW_LIMIT) -> bool:
    """True iff the closed ellipse meets the lattice only in 0 and +-(q, 0)."""
    q = as_fraction(lattice_q)
    allowed = {(Fraction(0), 0), (q, 0), (-q, 0)}
    return all((as_fraction(x), n) in allowed
               for x, n in ellipse_lattice_points(e, lattice_q, lattice_a0, enum_limit))


# -- lower bounds on image segment lengths ---------------------------------


def lemma6_hypothesis(q, d_sq, v, alpha, omega) -> bool:
    # v**2 > q**2 (alpha omega/(omega-alpha) * d/h - 1), with d/h = q d**2
    q, d_sq, v, alpha, omega = (as_fraction(t) for t in (q, d_sq, v, alpha, omega))
    return v * v > q * q * (alpha * omega / (omega - alpha) * q * d_sq - 1)


def lemma6_length(q, d_sq, v, alpha, omega) -> Fraction:
    """Exact length of F([U1, V1]) along x."""
    q, d_sq, v, alpha, omega = (as_fraction(t) for t in (q, d_sq, v, alpha, omega))
    return (v * v + q * q) / (q * q * d_sq) * (1 / alpha - 1 / omega)


def lemma7_length(q, d_sq, a, lam, bits: int = 96) -> RationalInterval:
    """Enclosure of the length of F([U2(lam), V2(lam)]) along x."""
    q, d_sq, a = as_fraction(q), as_fraction(d_sq), as_fraction(a)
    lam = _iv(lam)
    _, s = segment_endpoints_rs(lam, q, a, bits)
    v = (a + q / 2) * lam
    base = (v.square() + q * q) / (q * q * d_sq * lam)
    return base * (s / v - 1)


def lemma7_hypothesis(q, d_sq, a, omega, bits: int = 96) -> bool:
    """a > 3 sqrt(3)/(2 eps_omega) q and h/d >= sqrt(3)/2, certified."""
    q, d_sq, a = as_fraction(q), as_fraction(d_sq), as_fraction(a)
    eps_w = epsilon_lambda(omega, bits)
    three_root3_over_2 = sqrt_interval(RationalInterval.point(Fraction(27, 4)), bits)
    ke = a > (three_root3_over_2 / eps_w).hi * q
    ke1 = (q * d_sq) ** 2 <= TWO_OVER_SQRT3_SQ
    return ke and ke1
