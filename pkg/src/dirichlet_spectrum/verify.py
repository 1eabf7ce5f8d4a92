"""Exact checks of the six per-step conditions on a list of integer vectors.

Everything here works from the vectors w_1..w_N and the schedule alone, so a
stored run can be re-checked without any object produced by the construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .conics import EllipseSpec, lemma5_empty, map_F_inverse
from .exact import DomainError, TWO_OVER_SQRT3_SQ, frac_str, sum_sqrt_le
from .lattice import (
    DEFAULT_Q_LIMIT,
    Cylinder,
    IntVec3,
    RefusalError,
    build_frame,
    cylinder_contains,
    deviation_sq,
    enumerate_cylinder_points,
    is_unimodular,
)
from .schedule import ParameterSchedule

EXACT, ENUMERATED, CERTIFIED, VACUOUS = "exact", "enumerated", "certified", "vacuous"

# Virtual predecessors of w_1 = (1, 0, 0): w_{-1}, w_0.  They only serve as a
# plane basis for the step-2 certificate; no condition is stated about them.
PRELUDE = (IntVec3(0, 0, 1), IntVec3(0, 1, 0))
FIRST_VECTOR = IntVec3(1, 0, 0)


@dataclass(frozen=True)
class ConditionResult:
    passed: Optional[bool]  # None when the condition is vacuous at this step
    mode: str
    detail: str = ""
    witness: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ConditionReport:
    nu: int
    results: Dict[int, ConditionResult]

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.results.values())

    @property
    def first_failure(self) -> Optional[int]:
        for i in sorted(self.results):
            if self.results[i].passed is False:
                return i
        return None

    @property
    def cert_mode(self) -> str:
        modes = {self.results[i].mode for i in (4, 5) if i in self.results} - {VACUOUS}
        if not modes:
            return VACUOUS
        return "+".join(sorted(modes))


def _w(ws: Sequence[IntVec3], j: int, prelude=PRELUDE) -> Optional[IntVec3]:
    if j >= 1:
        return IntVec3(*ws[j - 1])
    if j in (0, -1) and prelude is not None:
        return prelude[j + 1]
    return None


def radius_sq(ws, nu) -> Fraction:
    """R_nu**2 = |q_{nu-1} v_nu - w_{nu-1}|**2."""
    return deviation_sq(_w(ws, nu - 1), _w(ws, nu).ratio_point())


def radius_minus_sq(ws, nu) -> Fraction:
    return deviation_sq(_w(ws, nu - 2), _w(ws, nu).ratio_point())


def volume_over_pi(ws, nu) -> Fraction:
    return _w(ws, nu).q * radius_sq(ws, nu)


def _vac():
    return ConditionResult(None, VACUOUS, "refers to a step before the first")


def _fail(mode, msg, **wit):
    return ConditionResult(False, mode, msg, {k: str(v) for k, v in wit.items()})


def _ok(mode, msg="", **wit):
    return ConditionResult(True, mode, msg, {k: str(v) for k, v in wit.items()})


# -- conditions 1, 2, 3, 6 ---------------------------------------------------


def check_condition1(ws, sched, nu):
    if nu < 3:
        return _vac()
    a, b, c = _w(ws, nu - 2), _w(ws, nu - 1), _w(ws, nu)
    if is_unimodular(a, b, c):
        return _ok(EXACT)
    return _fail(EXACT, "w_{nu-2}, w_{nu-1}, w_nu do not form a basis of Z^3")


def check_condition2(ws, sched, nu):
    if nu < 2:
        return _vac()
    q0, q1 = _w(ws, nu - 1).q, _w(ws, nu).q
    if q0 <= 0 or q1 <= q0:
        return _fail(EXACT, "q must be positive and strictly increasing", q_prev=q0, q=q1)
    ratio = Fraction(q1, q0)
    k = sched.at(nu).k
    lo, hi = sched.B_minus(nu) * k * k, sched.B_plus(nu) * k * k
    wit = dict(ratio=frac_str(ratio), lo=frac_str(lo), hi=frac_str(hi))
    if lo <= ratio <= hi:
        return _ok(EXACT, **wit)
    return _fail(EXACT, "q_nu/q_{nu-1} outside [B^- k^2, B^+ k^2]", **wit)


def check_condition3(ws, sched, nu):
    if nu < 3:
        return _vac()
    r, r_prev = radius_sq(ws, nu), radius_sq(ws, nu - 1)
    k = sched.at(nu).k
    lo = sched.H_minus(nu) ** 2 * r_prev / (k * k)
    hi = sched.H_plus_sq(nu) * r_prev / (k * k)
    wit = dict(R_sq=frac_str(r), lo=frac_str(lo), hi=frac_str(hi))
    if lo <= r <= hi:
        return _ok(EXACT, **wit)
    return _fail(EXACT, "R_nu outside [H^- R_{nu-1}/k, H^+ R_{nu-1}/k]", **wit)


def check_condition6(ws, sched, nu):
    if nu < 2:
        return _vac()
    v = volume_over_pi(ws, nu)
    s = sched.at(nu)
    wit = dict(V_over_pi=frac_str(v), alpha=frac_str(s.alpha), omega=frac_str(s.omega))
    if v * v > TWO_OVER_SQRT3_SQ:
        return _fail(EXACT, "V/pi above 2/sqrt(3)", **wit)
    if s.alpha < v < s.omega:
        return _ok(EXACT, **wit)
    return _fail(EXACT, "V_nu/pi outside (alpha_nu, omega_nu)", **wit)


# -- condition 4 ---------------------------------------------------------------


def _cyl(ws, nu, minus=False) -> Cylinder:
    w = _w(ws, nu)
    if minus:
        return Cylinder(w.ratio_point(), _w(ws, nu - 1).q, radius_minus_sq(ws, nu))
    return Cylinder(w.ratio_point(), w.q, radius_sq(ws, nu))


def _enumerated(ws, nu, minus, dilation, expected, enum_limit):
    c = _cyl(ws, nu, minus)
    expected = set(expected)
    cap = len(expected) + 4  # any overflow is already a failure
    got_plain = set(enumerate_cylinder_points(c, enum_limit, cap))
    got_ext = set(enumerate_cylinder_points(c.dilated(dilation ** 2), enum_limit, cap))
    wit = dict(points=len(got_ext), height=c.height_Q)
    if got_plain == expected and got_ext == expected:
        return _ok(ENUMERATED, **wit)
    extra = sorted(got_ext - expected)[:3]
    missing = sorted(expected - got_plain)[:3]
    return _fail(ENUMERATED, f"integer points differ: extra {extra}, missing {missing}", **wit)


def certify_condition4(ws, sched, nu, prelude=PRELUDE):
    """Plane-section certificate for Condition 4 at step nu (nu >= 2).

    With u = w_{nu-2} the planes spanned by (w_{nu-1}, u) slice Z^3 into
    layers a distance h apart.  If the extended cylinder is thinner than h,
    only the layers through 0 and through w_nu can meet it, and both
    sections are the same ellipse, so one lattice check settles the count.
    """
    w_prev, u, w = _w(ws, nu - 1), _w(ws, nu - 2, prelude), _w(ws, nu)
    eps = sched.at(nu).epsilon
    try:
        frame = build_frame(w_prev, u, w)
    except DomainError as exc:
        return _fail(CERTIFIED, f"no plane basis: {exc}")
    r_sq = radius_sq(ws, nu)
    t = 1 + eps
    if not r_sq * t * t < frame.h_sq:
        return _fail(CERTIFIED, "extended cylinder reaches a second layer",
                     R_sq=frac_str(r_sq), h_sq=frac_str(frame.h_sq))
    x2, y2 = map_F_inverse(frame.q, frame.h_sq, frame.d_sq, w.q, frame.f_over_d)
    e = EllipseSpec(frame.q, x2, y2, frame.d_sq, t)
    try:
        empty = lemma5_empty(e, frame.q, frame.a0)
    except RefusalError as exc:
        return _fail(CERTIFIED, str(exc))
    if not empty:
        return _fail(CERTIFIED, "section ellipse meets the plane lattice off 0, +-w_{nu-1}")
    c = _cyl(ws, nu)
    for p in (IntVec3(0, 0, 0), w_prev, w, w - w_prev):
        if not cylinder_contains(c, p):
            return _fail(CERTIFIED, f"{tuple(p)} is not in Pi_nu")
    return _ok(CERTIFIED, R_sq=frac_str(r_sq), h_sq=frac_str(frame.h_sq))


def check_condition4(ws, sched, nu, enum_limit=DEFAULT_Q_LIMIT, prelude=PRELUDE, mode="auto"):
    if nu < 2:
        return _vac()
    w, w_prev = _w(ws, nu), _w(ws, nu - 1)
    if w.q <= 0 or w_prev.q < 0 or radius_sq(ws, nu) == 0:
        return _fail(EXACT, "degenerate cylinder")
    if mode == ENUMERATED or (mode == "auto" and w.q <= enum_limit):
        expected = [IntVec3(0, 0, 0), w_prev, w, w - w_prev]
        return _enumerated(ws, nu, False, 1 + sched.at(nu).epsilon, expected, max(enum_limit, w.q))
    return certify_condition4(ws, sched, nu, prelude)


# -- condition 5 ---------------------------------------------------------------


def certify_condition5(ws, sched, nu, prelude=PRELUDE):
    """Pi-bar^-_nu sits inside Pi-bar_{nu-1}, whose integer points are known."""
    cond4_prev = certify_condition4(ws, sched, nu - 1, prelude) if nu - 1 >= 2 else None
    if cond4_prev is None or not cond4_prev.passed:
        return _fail(CERTIFIED, "Condition 4 at the previous step is not certified")
    r, rm, r_prev = radius_sq(ws, nu), radius_minus_sq(ws, nu), radius_sq(ws, nu - 1)
    t_minus = 1 + sched.eps_minus(nu)
    t_prev = 1 + sched.at(nu - 1).epsilon
    # R_nu + R^-_nu (1+eps^-) <= R_{nu-1} (1+eps_{nu-1}), on squares
    if not sum_sqrt_le(r, rm * t_minus ** 2, r_prev * t_prev ** 2):
        return _fail(CERTIFIED, "extended cylinder Pi-bar^- not inside Pi-bar_{nu-1}")
    c = _cyl(ws, nu, minus=True)
    a, b = _w(ws, nu - 2), _w(ws, nu - 1)
    for p in (IntVec3(0, 0, 0), a, b):
        if not cylinder_contains(c, p):
            return _fail(CERTIFIED, f"{tuple(p)} is not in Pi^-_nu")
    if cylinder_contains(c, b - a, t_minus ** 2):
        return _fail(CERTIFIED, "w_{nu-1} - w_{nu-2} lies in Pi-bar^-_nu")
    return _ok(CERTIFIED, R_minus_sq=frac_str(rm))


def check_condition5(ws, sched, nu, enum_limit=DEFAULT_Q_LIMIT, prelude=PRELUDE, mode="auto"):
    if nu < 3:
        return _vac()
    height = _w(ws, nu - 1).q
    if height <= 0 or radius_minus_sq(ws, nu) == 0:
        return _fail(EXACT, "degenerate cylinder")
    if mode == ENUMERATED or (mode == "auto" and height <= enum_limit):
        expected = [IntVec3(0, 0, 0), _w(ws, nu - 2), _w(ws, nu - 1)]
        return _enumerated(ws, nu, True, 1 + sched.eps_minus(nu), expected, max(enum_limit, height))
    return certify_condition5(ws, sched, nu, prelude)


# -- whole step / whole run ------------------------------------------------------


def verify_conditions(ws: Sequence, sched: ParameterSchedule, nu: int,
                      enum_limit: int = DEFAULT_Q_LIMIT, prelude=PRELUDE,
                      mode: str = "auto") -> ConditionReport:
    """Report for step nu; mode is "auto", "enumerated" or "certified" for Conditions 4-5."""
    ws = [IntVec3(*w) for w in ws]
    if not 1 <= nu <= len(ws):
        raise IndexError(f"step {nu} not in 1..{len(ws)}")
    res = {
        1: check_condition1(ws, sched, nu),
        2: check_condition2(ws, sched, nu),
        3: check_condition3(ws, sched, nu),
    }
    try:
        res[6] = check_condition6(ws, sched, nu)
    except (ZeroDivisionError, DomainError) as exc:
        res[6] = _fail(EXACT, str(exc))
    for i, fn in ((4, check_condition4), (5, check_condition5)):
        try:
            res[i] = fn(ws, sched, nu, enum_limit, prelude, mode)
        except (ZeroDivisionError, DomainError) as exc:
            res[i] = _fail(EXACT, str(exc))
    return ConditionReport(nu, dict(sorted(res.items())))


def verify_history(ws: Sequence, sched: ParameterSchedule, enum_limit: int = DEFAULT_Q_LIMIT,
                   prelude=PRELUDE) -> List[ConditionReport]:
    return [verify_conditions(ws, sched, nu, enum_limit, prelude) for nu in range(1, len(ws) + 1)]
