"""Integer vectors, natural-coordinate frames, cylinders and lattice enumeration.

All membership predicates are exact.  numpy appears only as a float prefilter
inside the enumeration routines; every reported point is re-checked with
Fractions before it is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .exact import DomainError, RationalInterval, as_fraction, ceil_sqrt, floor_sqrt

DEFAULT_Q_LIMIT = 10 ** 7


class RefusalError(RuntimeError):
    """A scan would exceed its configured limit."""


class InsufficientPrecision(RuntimeError):
    def __init__(self, q: int, msg: str = ""):
        self.q = q
        super().__init__(f"insufficient precision to decide q={q}" + (f": {msg}" if msg else ""))


class IntVec3(NamedTuple):
    q: int
    p1: int
    p2: int

    def __add__(self, other):  # type: ignore[override]
        return IntVec3(self.q + other.q, self.p1 + other.p1, self.p2 + other.p2)

    def __sub__(self, other):
        return IntVec3(self.q - other.q, self.p1 - other.p1, self.p2 - other.p2)

    def __neg__(self):
        return IntVec3(-self.q, -self.p1, -self.p2)

    def scale(self, m: int) -> "IntVec3":
        return IntVec3(m * self.q, m * self.p1, m * self.p2)

    def ratio_point(self) -> "RatVec2":
        return RatVec2(Fraction(self.p1, self.q), Fraction(self.p2, self.q))


class RatVec2(NamedTuple):
    v1: Fraction
    v2: Fraction


ZERO = IntVec3(0, 0, 0)


def det3(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> int:
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def is_unimodular(w1: Sequence[int], w2: Sequence[int], w3: Sequence[int]) -> bool:
    return abs(det3(w1, w2, w3)) == 1


def deviation(w: IntVec3, axis: RatVec2) -> Tuple[Fraction, Fraction]:
    """The vector p - q*axis, i.e. the offset of w from the axis line at height w.q."""
    return (w.p1 - w.q * axis.v1, w.p2 - w.q * axis.v2)


def deviation_sq(w: IntVec3, axis: RatVec2) -> Fraction:
    e1, e2 = deviation(w, axis)
    return e1 * e1 + e2 * e2


# ---------------------------------------------------------------------------
# natural coordinates


@dataclass(frozen=True)
class NaturalPoint:
    x: Fraction
    y_over_d: Fraction
    z_level: int


@dataclass(frozen=True)
class Frame:
    """Natural-coordinate data of a basis (w_nu, w_{nu-1}, w_{nu-2}).

    Only squared or ratio quantities are stored: d**2, h**2 and f/d.
    """
    q: int
    a0: int
    g: int
    d_sq: Fraction
    h_sq: Fraction
    f_over_d: Fraction
    basis: Tuple[IntVec3, IntVec3, IntVec3]
    orientation: int  # det(w_nu, w_{nu-1}, w_{nu-2}), +1 or -1

    @property
    def axis(self) -> RatVec2:
        return self.basis[0].ratio_point()

    @property
    def lambda_minus(self) -> Fraction:
        """q * d**2, the normalized volume of the cylinder of this step."""
        return self.q * self.d_sq

    def y_over_d(self, w: IntVec3) -> Fraction:
        e1, e2 = deviation(w, self.axis)
        u1, u2 = deviation(self.basis[1], self.axis)
        return (e1 * u1 + e2 * u2) / self.d_sq

    def z_level(self, w: IntVec3) -> int:
        return self.orientation * det3(self.basis[0], self.basis[1], w)


def build_frame(w_nu, w_nu_minus_1, w_nu_minus_2) -> Frame:
    w0, w1, w2 = IntVec3(*w_nu), IntVec3(*w_nu_minus_1), IntVec3(*w_nu_minus_2)
    if w0.q <= 0:
        raise DomainError("the leading basis vector needs a positive q component")
    det = det3(w0, w1, w2)
    if abs(det) != 1:
        raise DomainError(f"basis is not unimodular (det={det})")
    axis = w0.ratio_point()
    d_sq = deviation_sq(w1, axis)
    if d_sq == 0:
        raise DomainError("degenerate basis: w_{nu-1} lies on the axis of w_nu")
    h_sq = 1 / (w0.q * w0.q * d_sq)
    frame = Frame(q=w0.q, a0=w1.q, g=w2.q, d_sq=d_sq, h_sq=h_sq, f_over_d=Fraction(0),
                  basis=(w0, w1, w2), orientation=det)
    return Frame(q=w0.q, a0=w1.q, g=w2.q, d_sq=d_sq, h_sq=h_sq,
                 f_over_d=frame.y_over_d(w2), basis=(w0, w1, w2), orientation=det)


def natural_coords(frame: Frame, w) -> NaturalPoint:
    w = IntVec3(*w)
    return NaturalPoint(Fraction(w.q), frame.y_over_d(w), frame.z_level(w))


# ---------------------------------------------------------------------------
# cylinders


@dataclass(frozen=True)
class Cylinder:
    axis: RatVec2
    height_Q: Fraction
    radius_sq: Fraction

    def __post_init__(self):
        object.__setattr__(self, "axis", RatVec2(as_fraction(self.axis[0]), as_fraction(self.axis[1])))
        object.__setattr__(self, "height_Q", as_fraction(self.height_Q))
        object.__setattr__(self, "radius_sq", as_fraction(self.radius_sq))
        if self.height_Q <= 0:
            raise DomainError("cylinder height must be positive")
        if self.radius_sq < 0:
            raise DomainError("cylinder radius_sq must be nonnegative")

    def dilated(self, dilation_sq) -> "Cylinder":
        return Cylinder(self.axis, self.height_Q, self.radius_sq * as_fraction(dilation_sq))


def cylinder_contains(c: Cylinder, w, dilation_sq=1) -> bool:
    w = IntVec3(*w)
    if not 0 <= w.q <= c.height_Q:
        return False
    return deviation_sq(w, c.axis) <= c.radius_sq * dilation_sq


def _fits_int64(*vals: int) -> bool:
    return all(abs(v) < (1 << 62) for v in vals)


def enumerate_cylinder_points(c: Cylinder, q_limit: int = DEFAULT_Q_LIMIT,
                              max_points: Optional[int] = None) -> List[IntVec3]:
    """All integer points of the closed cylinder, sorted by (q, p1, p2).

    With ``max_points`` the scan stops once more than that many points are
    found; the result then has max_points + 1 entries and is not complete.
    """
    if c.height_Q > q_limit:
        raise RefusalError(f"cylinder height {c.height_Q} exceeds q_limit={q_limit}")
    Q = math.floor(c.height_Q)
    reach = ceil_sqrt(c.radius_sq) + 1
    a1, b1 = c.axis.v1.numerator, c.axis.v1.denominator
    a2, b2 = c.axis.v2.numerator, c.axis.v2.denominator
    if max_points is not None and 2 * c.radius_sq >= 1:
        # a disc of radius >= 1/sqrt2 holds a lattice point in every slice
        candidates = _scan_python(min(Q, max_points + 1), c.axis, reach, c.radius_sq)
    elif _fits_int64(Q * a1, Q * a2, b1 * (reach + 2), b2 * (reach + 2)) and Q > 256:
        candidates = _scan_numpy(Q, a1, b1, a2, b2, reach, float(c.radius_sq))
    else:
        candidates = _scan_python(Q, c.axis, reach, c.radius_sq)
    pts = set()
    for w in candidates:
        if cylinder_contains(c, w):
            pts.add(w)
            if max_points is not None and len(pts) > max_points:
                break
    return sorted(pts)


def _scan_python(Q, axis, reach, radius_sq):
    r = floor_sqrt(radius_sq) + 1
    for x in range(Q + 1):
        c1, c2 = x * axis.v1, x * axis.v2
        for p1 in range(math.floor(c1) - r, math.floor(c1) + r + 2):
            e1 = (p1 - c1) ** 2
            if e1 > radius_sq:
                continue
            for p2 in range(math.floor(c2) - r, math.floor(c2) + r + 2):
                if e1 + (p2 - c2) ** 2 <= radius_sq:
                    yield IntVec3(x, p1, p2)


def _scan_numpy(Q, a1, b1, a2, b2, reach, radius_sq_f, block=1 << 20):
    # float prefilter only; the caller re-checks every survivor exactly
    thr = radius_sq_f * (1 + 1e-9) + 1e-300
    offsets = range(-reach, reach + 1)
    for start in range(0, Q + 1, block):
        x = np.arange(start, min(Q + 1, start + block), dtype=np.int64)
        r1 = (x * a1) % b1
        r2 = (x * a2) % b2
        e1 = {j: (r1 - j * b1).astype(np.float64) / b1 for j in offsets}
        e2 = {j: (r2 - j * b2).astype(np.float64) / b2 for j in offsets}
        for j1 in offsets:
            s1 = e1[j1] * e1[j1]
            if not (s1 <= thr).any():
                continue
            for j2 in offsets:
                hit = np.nonzero(s1 + e2[j2] * e2[j2] <= thr)[0]
                for i in hit:
                    xi = int(x[i])
                    p1 = (xi * a1 - int(r1[i])) // b1 + j1
                    p2 = (xi * a2 - int(r2[i])) // b2 + j2
                    yield IntVec3(xi, p1, p2)


# ---------------------------------------------------------------------------
# best approximations


@dataclass(frozen=True)
class ThetaEnclosure:
    """Rational boxes for (theta1, theta2)."""
    theta1: RationalInterval
    theta2: RationalInterval
    center: Optional[RatVec2] = None
    radius: Optional[Fraction] = None

    def contains(self, point: RatVec2) -> bool:
        return self.theta1.contains(point[0]) and self.theta2.contains(point[1])

    def issubset(self, other: "ThetaEnclosure") -> bool:
        return self.theta1.issubset(other.theta1) and self.theta2.issubset(other.theta2)


@dataclass(frozen=True)
class BestApproximation:
    q: int
    p1: int
    p2: int
    psi_sq: Union[Fraction, RationalInterval]
    tied: bool = False

    @property
    def w(self) -> IntVec3:
        return IntVec3(self.q, self.p1, self.p2)


def _as_boxes(theta) -> Tuple[RationalInterval, RationalInterval, bool]:
    if isinstance(theta, ThetaEnclosure):
        return theta.theta1, theta.theta2, False
    t1, t2 = as_fraction(theta[0]), as_fraction(theta[1])
    return RationalInterval.point(t1), RationalInterval.point(t2), True


def _nearest(q: int, box: RationalInterval, exact: bool):
    """Nearest integer to q*theta over the whole box, with its residual interval."""
    lo, hi = q * box.lo, q * box.hi
    p = math.floor(lo + Fraction(1, 2))
    tied = False
    if exact:
        tied = (lo - math.floor(lo)) == Fraction(1, 2)
        return p, RationalInterval.point(lo - p), tied
    if not (p - Fraction(1, 2) < lo and hi < p + Fraction(1, 2)):
        raise InsufficientPrecision(q, "nearest integer not unique over the enclosure")
    return p, RationalInterval(lo - p, hi - p), tied


def _psi_exact(q, b1, b2, exact):
    p1, e1, t1 = _nearest(q, b1, exact)
    p2, e2, t2 = _nearest(q, b2, exact)
    psi = e1.square() + e2.square()
    return p1, p2, (psi.lo if exact else psi), t1 or t2


def _candidate_qs(b1, b2, T, block=1 << 20):
    """Denominators that could start a new record; float prefilter with a sound margin."""
    th1, th2 = float(b1.mid), float(b2.mid)
    halfw = float(max(b1.width, b2.width))
    err = T * ((abs(th1) + abs(th2) + 1) * 2.0 ** -50 + halfw) + 1e-300
    running = math.inf
    out = []
    for start in range(1, T + 1, block):
        q = np.arange(start, min(T + 1, start + block), dtype=np.float64)
        f1 = q * th1
        f2 = q * th2
        f1 -= np.round(f1)
        f2 -= np.round(f2)
        psi = np.sqrt(f1 * f1 + f2 * f2)
        prev = np.minimum.accumulate(np.concatenate(([running], psi[:-1])))
        idx = np.nonzero(psi <= prev + 2 * err)[0]
        out.extend(int(start + i) for i in idx)
        running = min(running, float(psi.min()))
    return out


def best_approx_oracle(theta, T: int, vectorize_above: int = 20000) -> List[BestApproximation]:
    """Brute-force list of best-approximation denominators q <= T.

    ``theta`` is either an exact rational pair or a ThetaEnclosure.  For
    enclosures every comparison must be certified by interval separation,
    otherwise InsufficientPrecision names the first undecidable q.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    b1, b2, exact = _as_boxes(theta)
    qs: Iterable[int]
    qs = _candidate_qs(b1, b2, T) if T > vectorize_above else range(1, T + 1)
    out: List[BestApproximation] = []
    best = None
    for q in qs:
        p1, p2, psi, tied = _psi_exact(q, b1, b2, exact)
        if best is None:
            is_record = True
        elif exact:
            is_record = psi < best
        elif psi.hi < best.lo:
            is_record = True
        elif psi.lo >= best.hi:
            is_record = False
        else:
            raise InsufficientPrecision(q, "psi interval overlaps the running minimum")
        if is_record:
            out.append(BestApproximation(q, p1, p2, psi, tied))
            best = psi
            if exact and psi == 0:
                break
    return out
