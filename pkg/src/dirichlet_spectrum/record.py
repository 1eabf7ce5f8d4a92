"""Versioned JSON run records.

Integers are written as decimal strings and rationals as "num/den", never
as floats, so a record re-verifies bit for bit on any platform.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .construction import ConstructionState, step_record, theta_enclosure
from .exact import RationalInterval, frac_str
from .lattice import IntVec3, RatVec2, ThetaEnclosure
from .schedule import THEOREM1, THEOREM2, ParameterSchedule, StepParams
from .verify import PRELUDE, ConditionReport, ConditionResult

SCHEMA_VERSION = 1


class RecordError(ValueError):
    """Malformed, truncated or unsupported record."""


def _vec(w: Sequence[int]) -> List[str]:
    return [str(int(x)) for x in w]


def _opt(x) -> Optional[str]:
    return None if x is None else frac_str(x)


def _report_json(rep: ConditionReport) -> Dict[str, Any]:
    return {
        "passed": rep.passed,
        "cert_mode": rep.cert_mode,
        "conditions": {str(i): {"passed": r.passed, "mode": r.mode, "detail": r.detail}
                       for i, r in rep.results.items()},
    }


def _theta_json(th: ThetaEnclosure) -> Dict[str, Any]:
    return {"theta1": [frac_str(th.theta1.lo), frac_str(th.theta1.hi)],
            "theta2": [frac_str(th.theta2.lo), frac_str(th.theta2.hi)],
            "center": [frac_str(th.center.v1), frac_str(th.center.v2)],
            "radius": frac_str(th.radius)}


def schedule_json(s: ParameterSchedule) -> Dict[str, Any]:
    return {
        "mode": s.mode,
        "lambda": frac_str(s.lam),
        "epsilon": _opt(s.epsilon),
        "phi": [frac_str(v) for v in s.phi_values],
        "steps": [{"nu": p.nu, "case": p.case_tag, "epsilon": frac_str(p.epsilon),
                   "alpha": frac_str(p.alpha), "omega": frac_str(p.omega), "k": str(p.k)}
                  for p in s.steps],
    }


def build_record(state: ConstructionState, enum_limit: int, config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    steps = []
    for rec in state.history:
        steps.append({
            "nu": rec.nu, "w": _vec(rec.w),
            "R_sq": _opt(rec.R_sq), "R_minus_sq": _opt(rec.R_minus_sq),
            "V_over_pi": _opt(rec.V_over_pi), "ratio": _opt(rec.ratio),
            "report": _report_json(rec.cond_report),
        })
    theta = _theta_json(theta_enclosure(state)) if state.nu >= 2 else None
    return {
        "schema_version": SCHEMA_VERSION,
        "config": dict(config or {}),
        "enum_limit": str(enum_limit),
        "schedule": schedule_json(state.schedule),
        "prelude": [_vec(w) for w in PRELUDE],
        "n_steps": state.nu,
        "steps": steps,
        "theta": theta,
    }


def dumps(record: Dict[str, Any]) -> str:
    return json.dumps(record, indent=1, sort_keys=True) + "\n"


def write_record(record: Dict[str, Any], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(record))


# -- loading --------------------------------------------------------------------


def _frac(x, what: str) -> Fraction:
    if not isinstance(x, str):
        raise RecordError(f"{what}: expected a 'num/den' string, got {type(x).__name__}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise RecordError(f"{what}: bad rational {x!r}") from exc


def _int(x, what: str) -> int:
    if not isinstance(x, str) or not x.lstrip("-").isdigit():
        raise RecordError(f"{what}: expected a decimal integer string, got {x!r}")
    return int(x)


def _need(d: Dict[str, Any], key: str, what: str):
    if not isinstance(d, dict) or key not in d:
        raise RecordError(f"{what}: missing field {key!r}")
    return d[key]


def parse_vec(x, what: str) -> IntVec3:
    if not isinstance(x, list) or len(x) != 3:
        raise RecordError(f"{what}: expected three integers")
    return IntVec3(*(_int(c, what) for c in x))


def parse_schedule(d: Dict[str, Any]) -> ParameterSchedule:
    mode = _need(d, "mode", "schedule")
    if mode not in (THEOREM1, THEOREM2):
        raise RecordError(f"schedule: unknown mode {mode!r}")
    eps = d.get("epsilon")
    steps = []
    for i, s in enumerate(_need(d, "steps", "schedule")):
        what = f"schedule step {i + 1}"
        if _need(s, "nu", what) != i + 1:
            raise RecordError(f"{what}: steps out of order")
        steps.append(StepParams(i + 1, _need(s, "case", what), _frac(_need(s, "epsilon", what), what),
                                _frac(_need(s, "alpha", what), what), _frac(_need(s, "omega", what), what),
                                _int(_need(s, "k", what), what)))
    phi = tuple(_frac(v, "schedule phi") for v in d.get("phi", []))
    return ParameterSchedule(mode, _frac(_need(d, "lambda", "schedule"), "schedule"), tuple(steps),
                             None if eps is None else _frac(eps, "schedule epsilon"), phi)


def parse_theta(d) -> Optional[ThetaEnclosure]:
    if d is None:
        return None
    b = [[_frac(v, "theta") for v in _need(d, k, "theta")] for k in ("theta1", "theta2", "center")]
    return ThetaEnclosure(RationalInterval(*b[0]), RationalInterval(*b[1]), RatVec2(*b[2]),
                          _frac(_need(d, "radius", "theta"), "theta"))


class LoadedRecord:
    """Plain data parsed from a record; nothing is trusted until re-verified."""

    def __init__(self, raw: Dict[str, Any]):
        self.raw = raw
        ver = _need(raw, "schema_version", "record")
        if ver != SCHEMA_VERSION:
            raise RecordError(f"unsupported schema_version {ver!r}")
        self.schedule = parse_schedule(_need(raw, "schedule", "record"))
        self.enum_limit = _int(_need(raw, "enum_limit", "record"), "enum_limit")
        self.prelude = tuple(parse_vec(w, "prelude") for w in _need(raw, "prelude", "record"))
        if len(self.prelude) != 2:
            raise RecordError("prelude: expected two vectors")
        n = _need(raw, "n_steps", "record")
        steps = _need(raw, "steps", "record")
        if not isinstance(n, int) or not isinstance(steps, list):
            raise RecordError("record: bad n_steps or steps")
        if len(steps) != n:
            raise RecordError(f"truncated history: {len(steps)} steps present, {n} declared")
        if n > len(self.schedule):
            raise RecordError(f"history has {n} steps but the schedule only {len(self.schedule)}")
        self.ws: List[IntVec3] = []
        self.stored: List[Dict[str, Optional[Fraction]]] = []
        self.reports: List[ConditionReport] = []
        for i, s in enumerate(steps):
            what = f"step {i + 1}"
            if _need(s, "nu", what) != i + 1:
                raise RecordError(f"{what}: steps out of order")
            self.ws.append(parse_vec(_need(s, "w", what), what))
            vals = {}
            for key in ("R_sq", "R_minus_sq", "V_over_pi", "ratio"):
                v = _need(s, key, what)
                vals[key] = None if v is None else _frac(v, f"{what} {key}")
            self.stored.append(vals)
            self.reports.append(_parse_report(i + 1, _need(s, "report", what)))
        self.theta = parse_theta(raw.get("theta"))
        if n >= 2 and self.theta is None:
            raise RecordError("record: missing theta enclosure")

    @property
    def n_steps(self) -> int:
        return len(self.ws)

    def state(self, reports: Optional[Sequence[ConditionReport]] = None) -> ConstructionState:
        """A state rebuilt from the integer vectors; derived values are recomputed."""
        reports = self.reports if reports is None else reports
        hist = tuple(step_record(self.ws, self.schedule, nu, reports[nu - 1])
                     for nu in range(1, self.n_steps + 1))
        return ConstructionState(self.schedule, hist)


def _parse_report(nu: int, d) -> ConditionReport:
    conds = _need(d, "conditions", f"step {nu} report")
    res = {}
    for key, c in conds.items():
        passed = _need(c, "passed", f"step {nu} condition {key}")
        if passed not in (True, False, None):
            raise RecordError(f"step {nu} condition {key}: bad passed flag")
        res[int(key)] = ConditionResult(passed, str(_need(c, "mode", f"step {nu}")), str(c.get("detail", "")))
    return ConditionReport(nu, dict(sorted(res.items())))


def loads(text: str) -> LoadedRecord:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise RecordError("record must be a JSON object")
    try:
        return LoadedRecord(raw)
    except (TypeError, AttributeError) as exc:
        raise RecordError(f"malformed record: {exc}") from exc


def read_record(path: str) -> LoadedRecord:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise RecordError(f"cannot read {path}: {exc}") from exc
    return loads(text)
