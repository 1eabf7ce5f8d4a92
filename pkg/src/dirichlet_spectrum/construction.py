"""The inductive engine: seed, step-by-step search, and theta enclosures.

Each new vector has the form w_{nu+1} = w_{nu-2} + m w_{nu-1} + l w_nu.  In
the natural frame of step nu it sits in the layer z = h at height
y = f + m d and abscissa x = g + m a0 + l q.  Rows m are tried around the
row predicted by the star-body argument, abscissas from the middle of the
admissible interval outwards, and the first candidate passing the exact
checks of all six conditions is kept.  Floating point is never used to
accept anything.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .conics import EllipseSpec, lemma5_empty, map_F_inverse
from .exact import RationalInterval, ceil_sqrt, floor_sqrt, sqrt_enclosure
from .lattice import DEFAULT_Q_LIMIT, Frame, IntVec3, ThetaEnclosure, build_frame
from .schedule import ParameterSchedule
from .verify import (
    FIRST_VECTOR,
    PRELUDE,
    ConditionReport,
    check_condition5,
    radius_minus_sq,
    radius_sq,
    verify_conditions,
)

log = logging.getLogger(__name__)

ROW_RADIUS = 3
ROW_WIDENINGS = 6  # the row window grows by doubling up to 2**6 times
MAX_PER_ROW = 2048
MAX_CANDIDATES = 20000


class SeedingError(RuntimeError):
    pass


class WindowExhausted(RuntimeError):
    """No candidate in the search window passed every condition."""

    def __init__(self, nu: int, window: Dict[str, object], reasons: Dict[str, int]):
        self.nu, self.window, self.reasons = nu, window, reasons
        super().__init__(f"step {nu}: existence window exhausted; window={window}; rejections={reasons}")


@dataclass(frozen=True)
class StepRecord:
    nu: int
    w: IntVec3
    R_sq: Optional[Fraction]
    R_minus_sq: Optional[Fraction]
    V_over_pi: Optional[Fraction]
    ratio: Optional[Fraction]
    cond_report: ConditionReport
    search: Dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class ConstructionState:
    schedule: ParameterSchedule
    history: Tuple[StepRecord, ...] = ()

    @property
    def ws(self) -> List[IntVec3]:
        return [r.w for r in self.history]

    @property
    def nu(self) -> int:
        return len(self.history)

    def chain(self) -> List[IntVec3]:
        """w_{-1}, w_0, w_1, ..., so that chain()[j + 1] is w_j."""
        return list(PRELUDE) + self.ws

    def last_three(self) -> Tuple[IntVec3, IntVec3, IntVec3]:
        c = self.chain()
        return c[-1], c[-2], c[-3]

    @property
    def frame(self) -> Frame:
        return build_frame(*self.last_three())

    @property
    def all_passed(self) -> bool:
        return all(r.cond_report.passed for r in self.history)


def step_record(ws: Sequence[IntVec3], sched, nu, report, search=None) -> StepRecord:
    w = ws[nu - 1]
    if nu == 1:
        return StepRecord(1, w, None, None, None, None, report, search or {})
    r = radius_sq(ws, nu)
    rm = radius_minus_sq(ws, nu) if nu >= 3 else None
    return StepRecord(nu, w, r, rm, w.q * r, Fraction(w.q, ws[nu - 2].q), report, search or {})


def _row_order(center: int, lo: int, hi: int) -> Iterator[int]:
    seen = set()
    radius = ROW_RADIUS
    for _ in range(ROW_WIDENINGS + 1):
        for off in range(radius + 1):
            for m in ((center + off, center - off) if off else (center,)):
                if lo <= m <= hi and m not in seen:
                    seen.add(m)
                    yield m
        radius *= 2


def _middle_out(lo: int, hi: int, mid: int) -> Iterator[int]:
    mid = min(max(mid, lo), hi)
    yield mid
    for off in range(1, max(mid - lo, hi - mid) + 1):
        if mid + off <= hi:
            yield mid + off
        if mid - off >= lo:
            yield mid - off


def _gap_order(l_lo, l_hi, l_mid, base, q, a0, x2, s2, t, omega) -> Iterator[int]:
    """Candidate abscissas ordered so the section ellipse misses rows +-1 first.

    In row n = 1 the section ellipse covers the x with
    |x y2 - x2| <= q sqrt(t^2 y2^2 - 1); its centre x2/y2 = x2 x1/(q^2 s2)
    moves linearly in l, so the l whose centre sits in a gap between the
    lattice points a0 + l'q form runs of consecutive integers.  Runs are
    visited from the middle outwards, each from its own middle.  Floats only
    steer the order; acceptance is decided exactly later.
    """
    reach_sq = t * t * omega * omega - 1
    if reach_sq <= 0:  # rows +-1 are out of reach for every window value
        yield from _middle_out(l_lo, l_hi, l_mid)
        return
    half = math.sqrt(float(reach_sq)) / float(omega)  # half-width / q, upper bound
    if half >= 0.5:
        yield from _middle_out(l_lo, l_hi, l_mid)
        return
    step = x2 / (q * s2 * q)  # centre shift per unit of l, in units of q
    if not 0 < step < Fraction(1, 4):
        yield from _middle_out(l_lo, l_hi, l_mid)
        return
    # phase of the centre at l = l_mid, relative to the lattice point a0
    ph = ((base + l_mid * q) * x2 / (q * q * s2) - a0) / q
    ph0 = float(ph - math.floor(ph))
    st = float(step)
    runs = []
    span_lo = math.floor(ph0 + (l_lo - l_mid) * st) - 1
    span_hi = math.ceil(ph0 + (l_hi - l_mid) * st) + 1
    for j in range(span_lo, span_hi + 1):
        a = l_mid + math.ceil((j + half - ph0) / st)
        b = l_mid + math.floor((j + 1 - half - ph0) / st)
        a, b = max(a, l_lo), min(b, l_hi)
        if a <= b:
            runs.append((a, b))
    runs.sort(key=lambda r: (abs((r[0] + r[1]) // 2 - l_mid), r[0]))
    for a, b in runs:
        yield from _middle_out(a, b, (a + b) // 2)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def inductive_step(state: ConstructionState, schedule: ParameterSchedule, nu_plus_1: int,
                   enum_limit: int = DEFAULT_Q_LIMIT,
                   max_candidates: int = MAX_CANDIDATES) -> ConstructionState:
    n = nu_plus_1
    if n != state.nu + 1 or n < 2:
        raise ValueError(f"next step must be {state.nu + 1} (>= 2), got {n}")
    chain = state.chain()
    w_nu, w_m1, w_m2 = chain[n], chain[n - 1], chain[n - 2]
    frame = build_frame(w_nu, w_m1, w_m2)
    p = schedule.at(n)
    k, eps = p.k, p.epsilon
    q, a0, g = frame.q, frame.a0, frame.g
    d_sq, h_sq, fod = frame.d_sq, frame.h_sq, frame.f_over_d
    bm, bp = schedule.B_minus(n) * k * k, schedule.B_plus(n) * k * k
    if n >= 3:
        hm_sq, hp_sq = schedule.H_minus(n) ** 2, schedule.H_plus_sq(n)

    # rows whose abscissa window can meet Condition 2 at all
    y_lo_sq = max(Fraction(0), (p.alpha * bm / q - h_sq) / d_sq)
    y_hi_sq = (p.omega * bp / q - h_sq) / d_sq
    window = dict(alpha=str(p.alpha), omega=str(p.omega), k=k)
    if y_hi_sq < 0:
        raise WindowExhausted(n, window, {"no feasible row": 1})
    m_lo = max(floor_sqrt(y_lo_sq) - 1 - _floor(fod), _floor(-fod) + 1)
    m_hi = floor_sqrt(y_hi_sq) + 1 - _floor(fod)
    lam_star = (p.alpha + p.omega) / 2
    y_star = (Fraction(a0, q) + k + Fraction(1, 2)) * lam_star / frame.lambda_minus
    m_star = min(max(round(y_star - fod), m_lo), m_hi)
    window.update(m_predicted=m_star, m_range=f"[{m_lo}, {m_hi}]")

    reasons: Dict[str, int] = {}
    tried = 0
    t = 1 + eps
    for row_i, m in enumerate(_row_order(m_star, m_lo, m_hi)):
        y0 = fod + m
        s2 = y0 * y0 * d_sq + h_sq
        base = g + m * a0
        xlo = max(q * q * s2 / p.omega, bm * q)
        xhi = min(q * q * s2 / p.alpha, bp * q)
        if n >= 3:
            xlo = max(xlo, Fraction(ceil_sqrt(q * q * s2 * k * k / (hp_sq * d_sq))))
            xhi = min(xhi, Fraction(floor_sqrt(q * q * s2 * k * k / (hm_sq * d_sq))))
        l_lo, l_hi = _ceil((xlo - base) / q), _floor((xhi - base) / q)
        if l_lo > l_hi:
            reasons["empty row"] = reasons.get("empty row", 0) + 1
            continue
        l_mid = round(((xlo + xhi) / 2 - base) / q)
        x2_row = y0 * q * q * d_sq
        order = _gap_order(l_lo, l_hi, l_mid, base, q, a0, x2_row, s2, t, p.omega)
        for j, l in enumerate(order):
            if j >= MAX_PER_ROW or tried >= max_candidates:
                break
            tried += 1
            x1 = base + l * q
            v = q * q * s2 / x1
            if not p.alpha < v < p.omega:
                reasons["volume"] = reasons.get("volume", 0) + 1
                continue
            r_new = q * q * s2 / (x1 * x1)
            if not r_new * t * t < h_sq:
                reasons["layer"] = reasons.get("layer", 0) + 1
                continue
            x2, y2 = map_F_inverse(q, h_sq, d_sq, x1, y0)
            if not lemma5_empty(EllipseSpec(q, x2, y2, d_sq, t), q, a0):
                reasons["section lattice"] = reasons.get("section lattice", 0) + 1
                continue
            w = w_m2 + w_m1.scale(m) + w_nu.scale(l)
            ws = state.ws + [w]
            if n >= 3 and not check_condition5(ws, schedule, n, mode="certified").passed:
                reasons["condition 5"] = reasons.get("condition 5", 0) + 1
                continue
            report = verify_conditions(ws, schedule, n, enum_limit)
            if not report.passed:
                key = f"verifier condition {report.first_failure}"
                reasons[key] = reasons.get(key, 0) + 1
                continue
            search = dict(m=m, l=l, row_offset=m - m_star, candidates=tried)
            log.debug("step %d accepted after %d candidates (row offset %d)", n, tried, m - m_star)
            rec = step_record(ws, schedule, n, report, search)
            return ConstructionState(schedule, state.history + (rec,))
        if tried >= max_candidates:
            break
    window["candidates"] = tried
    raise WindowExhausted(n, window, reasons)


def seed_construction(schedule: ParameterSchedule, enum_limit: int = DEFAULT_Q_LIMIT,
                      max_candidates: int = MAX_CANDIDATES) -> ConstructionState:
    """w_1 = (1, 0, 0); w_2, w_3 come from the ordinary step over the virtual prelude."""
    state = ConstructionState(schedule)
    if len(schedule) == 0:
        return state
    ws = [FIRST_VECTOR]
    state = ConstructionState(schedule, (step_record(ws, schedule, 1, verify_conditions(ws, schedule, 1)),))
    for n in range(2, min(3, len(schedule)) + 1):
        try:
            state = inductive_step(state, schedule, n, enum_limit, max_candidates)
        except WindowExhausted as exc:
            raise SeedingError(f"seed search failed: {exc}") from exc
    return state


def construct(schedule: ParameterSchedule, steps: Optional[int] = None,
              enum_limit: int = DEFAULT_Q_LIMIT, max_candidates: int = MAX_CANDIDATES) -> ConstructionState:
    steps = len(schedule) if steps is None else steps
    if steps > len(schedule):
        raise ValueError(f"schedule has only {len(schedule)} steps, {steps} requested")
    state = seed_construction(schedule if steps >= len(schedule) else _truncate(schedule, steps),
                              enum_limit, max_candidates)
    for n in range(state.nu + 1, steps + 1):
        state = inductive_step(state, schedule, n, enum_limit, max_candidates)
    return ConstructionState(schedule, state.history)


def _truncate(schedule: ParameterSchedule, steps: int) -> ParameterSchedule:
    return dataclasses.replace(schedule, steps=schedule.steps[:steps],
                               phi_values=schedule.phi_values[:steps] if schedule.phi_values else ())


def theta_enclosure(state: ConstructionState, nu: Optional[int] = None, extra_bits: int = 64) -> ThetaEnclosure:
    """Boxes around v_nu of half-width eps_nu R_nu/(2 q_nu), rounded outward."""
    nu = state.nu if nu is None else nu
    if not 2 <= nu <= state.nu:
        raise ValueError(f"an enclosure needs a step in 2..{state.nu}")
    rec = state.history[nu - 1]
    eps = state.schedule.at(nu).epsilon
    r_hi = sqrt_enclosure(rec.R_sq, 64 + extra_bits).hi
    rad = eps * r_hi / (2 * rec.w.q)
    c = rec.w.ratio_point()
    return ThetaEnclosure(RationalInterval(c.v1 - rad, c.v1 + rad),
                          RationalInterval(c.v2 - rad, c.v2 + rad), c, rad)
