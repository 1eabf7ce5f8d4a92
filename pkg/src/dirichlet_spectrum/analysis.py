"""Prefix estimates of d(theta) and m(theta) from a constructed run.

d(theta) and m(theta) are limsups, so everything here is a statement about
the computed prefix only.  Values are exact rationals or rational intervals.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

from .exact import TWO_OVER_SQRT3_SQ, RationalInterval, frac_str
from .lattice import BestApproximation, IntVec3, ThetaEnclosure
from .schedule import THEOREM1, THEOREM2, ParameterSchedule

DEFAULT_TAIL_START = 4  # the first three steps are dropped

TABLE_COLUMNS = ["nu", "q", "ratio", "R_sq", "V_over_pi", "approx_lo", "approx_hi",
                 "cond_1", "cond_2", "cond_3", "cond_4", "cond_5", "cond_6", "cert_mode"]


@dataclass(frozen=True)
class DirichletEstimate:
    approximants: Tuple[Tuple[int, RationalInterval], ...]
    running_sup: Optional[RationalInterval]
    steps_used: int
    direct: Tuple[Tuple[int, RationalInterval], ...] = ()

    label = "prefix estimate"


@dataclass(frozen=True)
class RatioStats:
    ratios: Tuple[Tuple[int, Fraction], ...]
    max_ratio: Optional[Fraction]
    m_estimate: Optional[Fraction]
    checks: Dict[str, bool] = field(default_factory=dict)


def _box_dist_sq(q: int, p1: int, p2: int, theta: ThetaEnclosure) -> RationalInterval:
    return (q * theta.theta1 - p1).square() + (q * theta.theta2 - p2).square()


def dirichlet_estimate(state, N: Optional[int] = None,
                       theta: Optional[ThetaEnclosure] = None) -> DirichletEstimate:
    """Per-step V_nu/pi widened by eps_nu^2 V_nu/(30 pi), and their running sup.

    With ``theta`` given, also the direct interval evaluation of
    q_nu R_nu(theta)^2 for comparison.
    """
    hist = state.history
    N = len(hist) if N is None else min(N, len(hist))
    sched = state.schedule
    approx, direct = [], []
    for rec in hist[1:N]:
        nu, v = rec.nu, rec.V_over_pi
        rad = sched.at(nu).epsilon ** 2 * v / 30
        approx.append((nu, RationalInterval(v - rad, v + rad)))
        if theta is not None:
            w_prev = hist[nu - 2].w
            direct.append((nu, rec.w.q * _box_dist_sq(w_prev.q, w_prev.p1, w_prev.p2, theta)))
    sup = None
    if approx:
        sup = RationalInterval(max(a.lo for _, a in approx), max(a.hi for _, a in approx))
    return DirichletEstimate(tuple(approx), sup, N, tuple(direct))


def ratio_stats(state, tail_start: int = DEFAULT_TAIL_START) -> RatioStats:
    sched: ParameterSchedule = state.schedule
    ratios = tuple((r.nu, r.ratio) for r in state.history[1:])
    checks: Dict[str, bool] = {}
    if not ratios:
        return RatioStats((), None, None, checks)
    tail = [x for nu, x in ratios if nu >= tail_start] or [x for _, x in ratios]
    checks["ratio_floor"] = all(x >= 45 / sched.at(nu).epsilon for nu, x in ratios)
    if sched.mode == THEOREM2 and sched.epsilon is not None:
        eps = sched.epsilon
        checks["ratio_ceiling"] = all(x < Fraction(10 ** 6) / eps ** 2 for _, x in ratios)
        checks["k_budget"] = all(
            sched.B_plus(nu) * sched.at(nu).k ** 2 <= 6 * 10 ** 4 / sched.at(nu).epsilon ** 2
            for nu, _ in ratios)
    if sched.mode == THEOREM1:
        checks["phi"] = all(x >= sched.phi(nu) for nu, x in ratios)
    return RatioStats(ratios, max(x for _, x in ratios), max(tail), checks)


def proposition3_check(d_hi, m_lo) -> bool:
    """m_lo >= 1/(36 d_hi^2): the audit direction of the m-versus-d inequality."""
    d_hi, m_lo = Fraction(d_hi), Fraction(m_lo)
    if d_hi <= 0:
        raise ValueError("d_hi must be positive")
    return m_lo * 36 * d_hi * d_hi >= 1


def proposition3_audit(state) -> Dict[str, object]:
    est, rs = dirichlet_estimate(state), ratio_stats(state)
    if est.running_sup is None or rs.m_estimate is None:
        return {"status": "not applicable"}
    ok = proposition3_check(est.running_sup.hi, rs.m_estimate)
    return {"status": "ok" if ok else "warning", "d_hi": frac_str(est.running_sup.hi),
            "m_lo": frac_str(rs.m_estimate)}


def best_approximations_from_state(state, theta: ThetaEnclosure) -> List[BestApproximation]:
    """w_1..w_{N-1} with psi^2 = |q theta - p|^2 as certified intervals."""
    out = []
    for rec in state.history[:-1]:
        w = rec.w
        out.append(BestApproximation(w.q, w.p1, w.p2, _box_dist_sq(w.q, w.p1, w.p2, theta)))
    return out


def _psi_lo(b: BestApproximation) -> Fraction:
    return b.psi_sq.lo if isinstance(b.psi_sq, RationalInterval) else b.psi_sq


def _psi_hi(b: BestApproximation) -> Fraction:
    return b.psi_sq.hi if isinstance(b.psi_sq, RationalInterval) else b.psi_sq


def proposition1_report(entries: Sequence[BestApproximation], gamma_grid: Iterable) -> List[Dict[str, object]]:
    """For each gamma: did |q theta - p| > gamma / sqrt(q) hold at every tested q?

    Checking the best approximations suffices, since psi is constant between
    them while gamma/sqrt(q) decreases.  held is None when an interval
    straddles the threshold.
    """
    if not entries:
        raise ValueError("need at least one best approximation")
    qs = [b.q for b in entries]
    max_ratio = max((Fraction(b, a) for a, b in zip(qs, qs[1:])), default=None)
    rows = []
    for gamma in gamma_grid:
        g2 = Fraction(gamma) ** 2
        held, first_fail = True, None
        for b in entries:
            if b.q * _psi_hi(b) <= g2:
                held, first_fail = False, b.q
                break
            if b.q * _psi_lo(b) <= g2:
                held = None
        rows.append({"gamma": Fraction(gamma), "held": held, "first_failure_q": first_fail,
                     "max_ratio": max_ratio})
    return rows


def table_rows(state, reports=None) -> List[Dict[str, str]]:
    est = dict(dirichlet_estimate(state).approximants)
    rows = []
    for rec in state.history:
        rep = (reports or {}).get(rec.nu, rec.cond_report)
        row = {"nu": str(rec.nu), "q": str(rec.w.q),
               "ratio": frac_str(rec.ratio) if rec.ratio is not None else "",
               "R_sq": frac_str(rec.R_sq) if rec.R_sq is not None else "",
               "V_over_pi": frac_str(rec.V_over_pi) if rec.V_over_pi is not None else ""}
        a = est.get(rec.nu)
        row["approx_lo"] = frac_str(a.lo) if a else ""
        row["approx_hi"] = frac_str(a.hi) if a else ""
        for i in range(1, 7):
            r = rep.results.get(i)
            row[f"cond_{i}"] = "vacuous" if r is None or r.passed is None else ("pass" if r.passed else "fail")
        row["cert_mode"] = rep.cert_mode
        rows.append(row)
    return rows


def export_table(state, out: Union[str, TextIO, None] = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(table_rows(state))
    text = buf.getvalue()
    if isinstance(out, str):
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif out is not None:
        out.write(text)
    return text


def summary(state) -> Dict[str, object]:
    sched = state.schedule
    est, rs = dirichlet_estimate(state), ratio_stats(state)
    out: Dict[str, object] = {"mode": sched.mode, "steps": state.nu, "label": DirichletEstimate.label}
    if est.running_sup is not None:
        sup = est.running_sup
        out["prefix_sup"] = [frac_str(sup.lo), frac_str(sup.hi)]
        out["below_mahler"] = sup.hi * sup.hi <= TWO_OVER_SQRT3_SQ
        if sched.mode == THEOREM2:
            lam, eps = sched.lam, sched.epsilon
            out["in_window"] = all(lam - eps < a.lo and a.hi <= lam for _, a in est.approximants)
    if rs.max_ratio is not None:
        out["max_ratio"] = frac_str(rs.max_ratio)
        out["m_tail_estimate"] = frac_str(rs.m_estimate)
        out["ratio_checks"] = rs.checks
    out["proposition3"] = proposition3_audit(state)
    return out
