import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from dirichlet_spectrum.conics import (
    CASE1,
    CASE2,
    ConfigurationError,
    EllipseSpec,
    HyperbolaRegionSpec,
    dangerous_point_excluded,
    dilation_coefficient,
    ellipse_contains,
    ellipse_lattice_points,
    epsilon_lambda,
    hyperbola_intersection_point,
    hyperbola_intersection_x_sq,
    hyperbola_region_contains,
    lemma5_empty,
    lemma6_hypothesis,
    lemma6_length,
    lemma7_hypothesis,
    lemma7_length,
    map_F,
    map_F_inverse,
    segment_endpoints_rs,
    segment_inside,
    segment_uv,
)
from dirichlet_spectrum.exact import DomainError, RationalInterval, sqrt_enclosure, two_over_sqrt3
from dirichlet_spectrum.lattice import RefusalError

getcontext().prec = 60

# lambda strictly inside (1, 2/sqrt3)
case2_lambdas = st.fractions(min_value=Fraction(1001, 1000), max_value=Fraction(115, 100), max_denominator=10 ** 4)


def exact_rational_sqrt(r: Fraction) -> Fraction:
    n, d = math.isqrt(r.numerator), math.isqrt(r.denominator)
    assert n * n == r.numerator and d * d == r.denominator, "not a perfect square"
    return Fraction(n, d)


# -- ellipses and hyperbolas --------------------------------------------------------


def test_ellipse_passes_through_W_and_Z2():
    e = EllipseSpec(7, Fraction(23, 2), Fraction(9, 10), Fraction(1, 49))
    assert ellipse_contains(e, 7, 0)
    assert ellipse_contains(e, e.x2, e.y2_over_d)
    # both are on the boundary: a slight shrink loses them
    lhs = (e.x2 * e.y2_over_d - e.y2_over_d * e.x2) ** 2 + (e.q * e.y2_over_d) ** 2
    assert lhs == (e.q * e.y2_over_d) ** 2


def test_ellipse_unit_circle():
    e = EllipseSpec(1, 0, 1, 1)
    assert not ellipse_contains(e, 0, 2)
    assert ellipse_contains(e, 0, 1)


def test_ellipse_rejects_shrinking():
    with pytest.raises(DomainError):
        EllipseSpec(1, 0, 1, 1, Fraction(1, 2))


def test_hyperbola_region_examples():
    h = HyperbolaRegionSpec(5, 12, Fraction(1, 4))
    for x in (-100, 0, 3, 10 ** 6):
        assert hyperbola_region_contains(h, x, 0)
    assert hyperbola_region_contains(h, 12, 1)  # the point A itself
    assert hyperbola_region_contains(HyperbolaRegionSpec(1, 0, 1), 0, Fraction(1, 2))
    with pytest.raises(DomainError):
        hyperbola_region_contains(h, 0, -1)


def test_hyperbola_intersection_examples():
    assert hyperbola_intersection_x_sq(1, 3) == 4
    assert hyperbola_intersection_x_sq(1, 1) == Fraction(4, 3)
    assert hyperbola_intersection_x_sq(5, Fraction(3, 4)) == 1


def check_branch_crossing(q, a, d_sq):
    """Substitute the crossing point into (a y - d x)^2 + (q d)^2 = (q y)^2 for a and a+q."""
    x_sq, y_sq = hyperbola_intersection_point(q, a, d_sq)
    assert y_sq == Fraction(4, 3) * d_sq
    # d x / y is rational at the crossing; recover it from the squares
    dx_over_y = exact_rational_sqrt(d_sq * x_sq / y_sq)
    for a_i in (a, a + q):
        assert (a_i - dx_over_y) ** 2 * y_sq + q * q * d_sq == q * q * y_sq


def test_branch_crossing_worked_example():
    check_branch_crossing(Fraction(3), Fraction(2), Fraction(1, 9))


@given(st.fractions(Fraction(1, 100), 1000, max_denominator=1000),
       st.fractions(0, 1000, max_denominator=1000),
       st.fractions(Fraction(1, 10 ** 3), 100, max_denominator=1000))
def test_branch_crossing_property(q, a, d_sq):
    check_branch_crossing(q, a, d_sq)


# -- epsilon_lambda and the segment endpoints ----------------------------------------


def test_epsilon_lambda_examples():
    assert epsilon_lambda(1) == RationalInterval(1, 1)
    e = epsilon_lambda(Fraction(11, 10))
    ref = Decimal(11) / 10 - 2 * (Decimal(121) / 100 - 1).sqrt()
    assert abs(float(e.mid) - float(ref)) < 1e-20
    assert e.lo > 3 * (two_over_sqrt3(96).hi - Fraction(11, 10))
    # near the top of the range it collapses to 0
    near = epsilon_lambda(Fraction(11547, 10000))
    assert near.hi < Fraction(1, 100)


def test_epsilon_lambda_domain():
    with pytest.raises(DomainError):
        epsilon_lambda(Fraction(9, 10))
    with pytest.raises(DomainError):
        epsilon_lambda(Fraction(6, 5))


@settings(max_examples=200)
@given(case2_lambdas)
def test_epsilon_lambda_bounds(lam):
    e = epsilon_lambda(lam)
    assert 3 * (two_over_sqrt3(96).hi - lam) < e.lo
    assert e.hi <= 1


def test_segment_endpoints_examples():
    r, s = segment_endpoints_rs(1, 4, 7)
    assert (r, s) == (RationalInterval(7, 7), RationalInterval(11, 11))
    r, s = segment_endpoints_rs(Fraction(11, 10), 1, 0)
    ref = (Decimal(121) / 100 - 1).sqrt()
    assert abs(float(r.mid) - float(ref)) < 1e-20
    assert abs(float(s.mid) - float(Decimal(11) / 10 - ref)) < 1e-20


@given(case2_lambdas, st.integers(1, 10 ** 6), st.integers(0, 10 ** 6))
def test_segment_length_is_q_eps(lam, q, a):
    r, s = segment_endpoints_rs(lam, q, a)
    e = epsilon_lambda(lam)
    # s - r = q eps_lambda; enclosures overlap with the exact value
    diff = s - r
    assert diff.lo <= q * e.hi and q * e.lo <= diff.hi


# -- segments [U, V] --------------------------------------------------------------


def test_segment_uv_case1():
    seg = segment_uv(CASE1, q=3, a0=1, k=5, alpha=Fraction(1, 4), omega=Fraction(1, 2), d_sq=1, v=100)
    assert seg.v == RationalInterval(100, 100)
    assert seg.y_lo_over_d == RationalInterval.point(Fraction(1, 4))
    assert seg.y_hi_over_d == RationalInterval.point(Fraction(1, 2))


@given(case2_lambdas, st.integers(2, 10 ** 4), st.integers(1, 10 ** 5), st.integers(0, 10 ** 5))
def test_case2_length_bound(lam, k, q, a0):
    assume(lam * lam < Fraction(4, 3))
    seg = segment_uv(CASE2, q=q, a0=a0, k=k, alpha=Fraction(1001, 1000), omega=Fraction(1151, 1000),
                     d_sq=1, lam=lam)
    assert (lam - seg.y_lo_over_d.lo) <= lam / (2 * k) + seg.y_lo_over_d.width


@settings(max_examples=50)
@given(case2_lambdas, st.integers(2, 500), st.integers(1, 10 ** 4), st.integers(0, 10 ** 4))
def test_star_body_containment(lam, k, q, a0):
    """Points of [U2, V2] lie in both regions B(a, d) and B(a+q, d)."""
    seg = segment_uv(CASE2, q=q, a0=a0, k=k, alpha=Fraction(1001, 1000), omega=Fraction(1151, 1000),
                     d_sq=1, lam=lam)
    a = a0 + k * q
    x = seg.v.lo
    lo = seg.y_lo_over_d.hi
    for j in range(5):
        y = lo + (lam - lo) * j / 4
        for a_i in (a, a + q):
            assert hyperbola_region_contains(HyperbolaRegionSpec(q, a_i, 1), x, y)


def test_case2_segment_containment_needs_margin():
    alpha, omega, k, q, a0 = Fraction(105, 100), Fraction(110, 100), 40, 97, 13
    eps = omega - alpha
    assert 1 / Fraction(4 * k) < eps  # the printed proviso holds
    # lambda at alpha: the lower end u < lambda = alpha leaves the case-1 segment
    at_alpha = segment_uv(CASE2, q=q, a0=a0, k=k, alpha=alpha, omega=omega, d_sq=1, lam=alpha)
    assert at_alpha.y_lo_over_d.hi < alpha
    # with lambda - alpha >= lambda/(2k) the lower end clears alpha
    lam = alpha + Fraction(3, 100)
    assert lam - alpha >= lam / (2 * k)
    seg = segment_uv(CASE2, q=q, a0=a0, k=k, alpha=alpha, omega=omega, d_sq=1, lam=lam)
    assert seg.y_lo_over_d.lo >= alpha and lam <= omega


def test_segment_inside():
    from dirichlet_spectrum.conics import SegmentUV
    P = RationalInterval.point
    outer = SegmentUV(CASE1, P(5), P(Fraction(1, 4)), P(Fraction(1, 2)))
    inner = SegmentUV(CASE2, P(5), P(Fraction(1, 3)), P(Fraction(2, 5)))
    assert segment_inside(inner, outer)
    assert not segment_inside(outer, inner)


def test_segment_uv_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        segment_uv(CASE1, q=1, a0=0, k=2, alpha=Fraction(1, 2), omega=Fraction(1, 4), d_sq=1, v=1)
    with pytest.raises(ConfigurationError):
        segment_uv(CASE2, q=1, a0=0, k=2, alpha=Fraction(11, 10), omega=Fraction(6, 5), d_sq=1, lam=1)


# -- the map F ---------------------------------------------------------------------


def test_map_F_examples():
    assert map_F(1, 1, 1, 0, 1) == (1, 0)
    assert map_F(2, Fraction(1, 4), 1, 2, 1) == (2, Fraction(1, 2))
    assert map_F_inverse(1, 1, 1, 1, 0) == (0, 1)
    assert map_F_inverse(2, Fraction(1, 4), 1, 2, Fraction(1, 2)) == (2, 1)


def test_map_F_checks_frame_identity():
    with pytest.raises(DomainError):
        map_F(2, 1, 1, 2, 1)


pos = st.fractions(Fraction(1, 10 ** 3), 10 ** 3, max_denominator=10 ** 3)


@given(pos, pos, st.fractions(-10 ** 3, 10 ** 3, max_denominator=10 ** 3), pos)
def test_map_F_round_trip(q, d_sq, x2, y2):
    h_sq = 1 / (q * q * d_sq)
    x1, y1 = map_F(q, h_sq, d_sq, x2, y2)
    assert map_F_inverse(q, h_sq, d_sq, x1, y1) == (x2, y2)


@given(pos, pos, pos, st.fractions(-10 ** 3, 10 ** 3, max_denominator=10 ** 3))
def test_map_F_inverse_round_trip(q, d_sq, x1, y1):
    h_sq = 1 / (q * q * d_sq)
    assert map_F(q, h_sq, d_sq, *map_F_inverse(q, h_sq, d_sq, x1, y1)) == (x1, y1)


# -- dilations and Lemma 5 -----------------------------------------------------------


def test_dilation_coefficient_examples():
    assert dilation_coefficient(CASE1, Fraction(1, 2)) == 2
    assert dilation_coefficient(CASE1, Fraction(9, 10)) == Fraction(10, 9)
    t = dilation_coefficient(CASE2, Fraction(11, 10))
    assert Fraction("1.15470") - Fraction(1, 10) < t < Fraction("1.15471") - Fraction(1, 10)


def test_printed_case2_dilation_lets_dangerous_points_in():
    # t2 = 1 + 2/sqrt3 - omega fails the exclusion test for every case-2 window
    for omega in (Fraction(1001, 1000), Fraction(21, 20), Fraction(11, 10), Fraction(115, 100)):
        t2 = dilation_coefficient(CASE2, omega)
        assert not dangerous_point_excluded(t2, omega)
        assert dangerous_point_excluded(1 + Fraction(1, 400), omega)


def case2_ellipse(q, a0, k, lam, t):
    """Ellipse through W = (q, 0) and V2 = (v, lambda): centre of row 1 midway between lattice points."""
    v = (a0 + (k + Fraction(1, 2)) * q) * lam
    return EllipseSpec(q, v, lam, 1, t)


@settings(max_examples=60, deadline=None)
@given(case2_lambdas, st.integers(2, 10 ** 4), st.integers(1, 10 ** 6), st.integers(0, 10 ** 6),
       st.sampled_from([Fraction(1, 100), Fraction(1, 400), Fraction(1, 10 ** 4)]))
def test_lemma5_case2(lam, k, q, a0, eps):
    t = 1 + eps
    assume(dangerous_point_excluded(t, lam))
    a0 = a0 % q
    assert lemma5_empty(case2_ellipse(q, a0, k, lam, t), q, a0)
    assert not lemma5_empty(case2_ellipse(q, a0, k, lam, 2 * t), q, a0)


@settings(max_examples=60, deadline=None)
@given(st.fractions(Fraction(1, 100), Fraction(98, 100), max_denominator=10 ** 4),
       st.integers(1, 10 ** 6), st.integers(0, 10 ** 6), st.integers(-10 ** 9, 10 ** 9))
def test_lemma5_case1(y2, q, a0, x2):
    eps = Fraction(1, 100)
    assume(y2 * (1 + eps) < 1)
    a0 = a0 % q
    assert lemma5_empty(EllipseSpec(q, x2, y2, 1, 1 + eps), q, a0)
    assert not lemma5_empty(EllipseSpec(q, x2, y2, 1, 2 * (1 + eps)), q, a0)


def test_lemma5_printed_case1_dilation_too_large():
    # t1 = 1/omega = 2 puts +-2q on the boundary of the dilated ellipse
    e = EllipseSpec(5, 3, Fraction(1, 2), 1, dilation_coefficient(CASE1, Fraction(1, 2)))
    assert not lemma5_empty(e, 5, 2)


def test_ellipse_lattice_points_refusal():
    e = EllipseSpec(1, 0, 10 ** 4, 1)
    with pytest.raises(RefusalError):
        ellipse_lattice_points(e, 1, 0, enum_limit=100)


# -- Lemmas 6 and 7 ------------------------------------------------------------------


@settings(max_examples=100)
@given(st.integers(1, 10 ** 5), st.fractions(Fraction(1, 10 ** 6), 1, max_denominator=10 ** 6),
       st.integers(1, 10 ** 7), st.fractions(Fraction(1, 100), Fraction(9, 10), max_denominator=1000),
       st.fractions(Fraction(1, 1000), Fraction(1, 10), max_denominator=1000))
def test_lemma6_length_exceeds_q(q, d_sq, v, alpha, eps):
    omega = alpha + eps
    assume(lemma6_hypothesis(q, d_sq, v, alpha, omega))
    assert lemma6_length(q, d_sq, v, alpha, omega) > q


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10 ** 4), st.fractions(Fraction(3, 4), Fraction(113, 100), max_denominator=1000),
       st.integers(1, 10 ** 3), case2_lambdas)
def test_lemma7_length_exceeds_q(q, lam_minus, mult, lam):
    d_sq = lam_minus / q  # q d^2 = lambda_minus, so h/d >= sqrt(3)/2
    omega = lam
    eps_w = epsilon_lambda(omega)
    a = int(sqrt_enclosure(Fraction(27, 4)).hi / eps_w.lo * q) + 1 + mult * q
    assert lemma7_hypothesis(q, d_sq, a, omega)
    assert lemma7_length(q, d_sq, a, lam).lo > q
