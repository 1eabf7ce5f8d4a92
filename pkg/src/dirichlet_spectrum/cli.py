"""Command line: construct | verify | analyze | plot.

Exit codes
  construct  0 all steps accepted, 2 configuration error, 3 window exhausted
  verify     0 every condition passes, 1 a condition fails, 2 malformed record
  analyze    0 table written, 2 malformed record
  plot       0 file written, 2 malformed record or step out of range
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import analysis
from .conics import ConfigurationError
from .construction import SeedingError, WindowExhausted, construct, theta_enclosure
from .exact import DomainError, frac_str
from .lattice import DEFAULT_Q_LIMIT
from .plot import write_section_svg
from .record import RecordError, build_record, read_record, write_record
from .schedule import THEOREM1, THEOREM2, make_schedule
from .verify import (
    check_condition1,
    check_condition2,
    check_condition3,
    check_condition6,
    verify_conditions,
)

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT, EXIT_EXHAUSTED = 0, 1, 2, 3

log = logging.getLogger("dirichlet_spectrum")


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational NUM/DEN: {s!r}") from exc


def read_phi_table(path: str) -> Dict[int, Fraction]:
    """Lines 'nu value' (whitespace or comma separated); '#' starts a comment."""
    table = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].replace(",", " ").strip()
            if not line:
                continue
            nu, val = line.split()
            table[int(nu)] = Fraction(val)
    return table


# -- construct -------------------------------------------------------------------


def cmd_construct(args) -> int:
    phi = None
    try:
        if args.phi_table:
            if args.mode != THEOREM1:
                raise ConfigurationError("--phi-table only applies to theorem1")
            phi = read_phi_table(args.phi_table)
        sched = make_schedule(args.mode, args.lam, args.steps, epsilon=args.epsilon, phi=phi)
    except (ConfigurationError, OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        state = construct(sched, args.steps, args.enum_limit)
    except (WindowExhausted, SeedingError) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    config = {"mode": args.mode, "lambda": frac_str(args.lam), "steps": args.steps,
              "epsilon": None if args.epsilon is None else frac_str(args.epsilon),
              "phi_table": args.phi_table}
    write_record(build_record(state, args.enum_limit, config), args.out)
    for rec in state.history:
        print(f"step {rec.nu}: q = {rec.w.q}  cert = {rec.cond_report.cert_mode}")
    print(f"wrote {args.out} ({state.nu} steps)")
    return EXIT_OK if state.all_passed else EXIT_FAIL


# -- verify ----------------------------------------------------------------------


def verify_record(rec, enum_limit: int, keep_going: bool = False) -> List[str]:
    """Re-check a loaded record from its integers alone; returns failure lines.

    The exact Conditions 1, 2, 3 and 6 are checked on every step before the
    enumeration-heavy Conditions 4 and 5, so a corrupted record is usually
    rejected without any lattice scan.
    """
    problems = [f"schedule: {v}" for v in rec.schedule.violations()]
    ws, sched = rec.ws, rec.schedule
    cheap = ((1, check_condition1), (2, check_condition2), (3, check_condition3), (6, check_condition6))

    def fail(nu, what):
        problems.append(f"step {nu}: {what}")
        return not keep_going

    for nu in range(1, rec.n_steps + 1):
        for i, fn in cheap:
            try:
                res = fn(ws, sched, nu)
            except (ZeroDivisionError, DomainError, ValueError) as exc:
                if fail(nu, f"condition {i} cannot be evaluated ({exc})"):
                    return problems
                continue
            if res.passed is False and fail(nu, f"condition {i} fails ({res.detail})"):
                return problems
    if problems:
        return problems
    for nu in range(1, rec.n_steps + 1):
        try:
            rep = verify_conditions(ws, sched, nu, enum_limit, rec.prelude)
        except (ZeroDivisionError, DomainError, ValueError) as exc:
            if fail(nu, f"cannot evaluate the conditions ({exc})"):
                return problems
            continue
        if not rep.passed:
            i = rep.first_failure
            if fail(nu, f"condition {i} fails ({rep.results[i].detail})"):
                return problems
    if problems:
        return problems
    # stored derived values must match the integers
    try:
        state = rec.state()
    except (ZeroDivisionError, DomainError) as exc:
        return [f"derived values: {exc}"]
    for r, stored in zip(state.history, rec.stored):
        for key in ("R_sq", "R_minus_sq", "V_over_pi", "ratio"):
            if getattr(r, key) != stored[key]:
                problems.append(f"step {r.nu}: stored {key} does not match w")
    if rec.n_steps >= 2:
        th = theta_enclosure(state)
        if (th.theta1, th.theta2) != (rec.theta.theta1, rec.theta.theta2):
            problems.append("theta enclosure does not match w")
    return problems


def cmd_verify(args) -> int:
    try:
        rec = read_record(args.record)
    except RecordError as exc:
        print(f"malformed record: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    problems = verify_record(rec, args.enum_limit, args.all)
    if problems:
        for p in problems:
            print(f"FAIL {p}")
        return EXIT_FAIL
    print(f"OK {rec.n_steps} steps verified")
    return EXIT_OK


# -- analyze ---------------------------------------------------------------------


def cmd_analyze(args) -> int:
    try:
        rec = read_record(args.record)
        state = rec.state()
    except RecordError as exc:
        print(f"malformed record: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (ZeroDivisionError, DomainError) as exc:
        print(f"malformed record: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.verify:
        problems = verify_record(rec, args.enum_limit)
        verified = not problems
    else:
        verified = all(r.passed for r in rec.reports)
    table = analysis.export_table(state, args.out)
    summ = analysis.summary(state) if state.nu else {"steps": 0}
    summ["verified"] = verified
    summ["verification"] = "re-checked" if args.verify else "stored reports"
    if not verified:
        summ["warning"] = "record did not verify; estimates are not certified"
    if args.out is None:
        sys.stdout.write(table)
    print(json.dumps(summ, indent=1, sort_keys=True, default=str))
    return EXIT_OK


# -- plot ------------------------------------------------------------------------


def cmd_plot(args) -> int:
    try:
        rec = read_record(args.record)
    except RecordError as exc:
        print(f"malformed record: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if not 1 <= args.step <= rec.n_steps:
        print(f"step {args.step} out of range 1..{rec.n_steps}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        write_section_svg(args.out, rec.ws, rec.schedule, args.step, rec.prelude)
    except DomainError as exc:
        print(f"cannot draw step {args.step}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    print(f"wrote {args.out}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirichlet-spectrum",
                                description="Exact best-approximation sequences with a prescribed Dirichlet value.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a run and write its record")
    c.add_argument("--mode", choices=[THEOREM1, THEOREM2], default=THEOREM2)
    c.add_argument("--lambda", dest="lam", type=_fraction, required=True, metavar="NUM/DEN")
    c.add_argument("--epsilon", type=_fraction, default=None, metavar="NUM/DEN")
    c.add_argument("--steps", type=int, default=8, metavar="N")
    c.add_argument("--enum-limit", type=int, default=DEFAULT_Q_LIMIT, metavar="N")
    c.add_argument("--phi-table", default=None, metavar="PATH")
    c.add_argument("--out", default="run.json", metavar="PATH")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="re-verify a record from its integers")
    v.add_argument("record")
    v.add_argument("--enum-limit", type=int, default=DEFAULT_Q_LIMIT, metavar="N")
    v.add_argument("--all", action="store_true", help="keep checking after the first failing step")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="estimate table and summary")
    a.add_argument("record")
    a.add_argument("--out", default=None, metavar="PATH", help="CSV path (default: stdout)")
    a.add_argument("--verify", action="store_true", help="re-verify before analyzing")
    a.add_argument("--enum-limit", type=int, default=DEFAULT_Q_LIMIT, metavar="N")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("plot", help="SVG of the section plane at one step")
    g.add_argument("record")
    g.add_argument("--step", type=int, required=True, metavar="NU")
    g.add_argument("--out", default="section.svg", metavar="PATH")
    g.set_defaults(func=cmd_plot)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
