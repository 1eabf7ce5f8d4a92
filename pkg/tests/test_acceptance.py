"""Acceptance criteria 1-9, one test each.

Every test prints a "CRITERION n PASS|FAIL" line, and the lines are repeated
in the terminal summary.  Criterion 4 asks for more than a brute-force
search can reach; it runs as stated and is marked as an expected failure.
"""
import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from conftest import EPS, HALF
from dirichlet_spectrum import analysis, construct, make_schedule
from dirichlet_spectrum.cli import EXIT_FAIL, EXIT_OK, main
from dirichlet_spectrum.conics import (
    CASE1,
    CASE2,
    EllipseSpec,
    dangerous_point_excluded,
    epsilon_lambda,
    lemma5_empty,
    map_F,
    map_F_inverse,
)
from dirichlet_spectrum.construction import theta_enclosure
from dirichlet_spectrum.exact import TWO_OVER_SQRT3_SQ, RationalInterval, two_over_sqrt3
from dirichlet_spectrum.lattice import best_approx_oracle
from dirichlet_spectrum.record import build_record, write_record
from dirichlet_spectrum.schedule import case_window_ok
from dirichlet_spectrum.verify import ENUMERATED
from test_conics import case2_ellipse, check_branch_crossing

ENUM_LIMIT = 10 ** 7
RESULTS = {}


@contextmanager
def criterion(n: int, title: str):
    try:
        yield
    except BaseException:
        RESULTS[n] = f"CRITERION {n} FAIL  {title}"
        print(RESULTS[n])
        raise
    RESULTS[n] = f"CRITERION {n} PASS  {title}"
    print(RESULTS[n])


@pytest.fixture(scope="module")
def timed_run():
    t0 = time.perf_counter()
    state = construct(make_schedule("theorem2", HALF, 8, epsilon=EPS), enum_limit=ENUM_LIMIT)
    return state, time.perf_counter() - t0


def test_criterion1_prefix_certification(timed_run):
    state, elapsed = timed_run
    with criterion(1, "theorem2, lambda=1/2, eps=1/100: 8 steps, Conditions 1-6 exact"):
        assert state.nu == 8 and state.all_passed
        for rec in state.history:
            rep = rec.cond_report
            assert all(r.passed is not False for r in rep.results.values())
            if rec.nu >= 2 and rec.w.q <= ENUM_LIMIT:
                assert rep.results[4].mode == ENUMERATED
                assert rep.results[5].mode in (ENUMERATED, "vacuous")
            elif rec.nu >= 2:
                assert rep.results[4].mode == "certified"
        n_enum = sum(1 for r in state.history if r.w.q <= ENUM_LIMIT)
        assert elapsed < 60 * max(1, n_enum)


def test_criterion2_dirichlet_window(run_half):
    with criterion(2, "approximants inside (lambda - eps, lambda] for nu >= 2"):
        est = analysis.dirichlet_estimate(run_half, theta=theta_enclosure(run_half))
        assert [nu for nu, _ in est.approximants] == list(range(2, 9))
        for nu, a in est.approximants:
            assert HALF - EPS < a.lo and a.hi <= HALF
        for nu, d in est.direct:
            assert HALF - EPS < d.lo and d.hi <= HALF


def test_criterion3_ratio_bound(run_half):
    with criterion(3, "ratio < 1e6/eps^2, B+ k^2 <= 6e4/eps^2, ratio >= 45/eps"):
        s = run_half.schedule
        for rec in run_half.history[1:]:
            p = s.at(rec.nu)
            assert rec.ratio < Fraction(10 ** 6) / EPS ** 2
            assert s.B_plus(rec.nu) * p.k ** 2 <= 6 * 10 ** 4 / p.epsilon ** 2
            assert rec.ratio >= 45 / p.epsilon


@pytest.mark.xfail(strict=True, reason="q_3 ~ 5e13 lies beyond the 1e7 brute-force ceiling; see decisions ledger")
def test_criterion4_oracle_equivalence(run_half):
    with criterion(4, "oracle over q <= min(q_5, 1e7) reproduces w_1..w_5"):
        ws = run_half.ws
        T = min(ws[4].q, ENUM_LIMIT)
        got = best_approx_oracle(theta_enclosure(run_half), T)
        assert not any(b.tied for b in got)
        assert [b.w for b in got] == ws[:5]


def test_criterion5_mahler_ceiling(run_half, run_case2, run_theorem1, coarse_run):
    with criterion(5, "(V/pi)^2 <= 4/3 on every step of every run"):
        for state in (run_half, run_case2, run_theorem1, coarse_run):
            for rec in state.history[1:]:
                assert rec.V_over_pi ** 2 <= TWO_OVER_SQRT3_SQ


def test_criterion6_theorem1_growth():
    with criterion(6, "theorem1, phi(nu) = nu^2, lambda = 1/2: q_(nu+1)/q_nu >= nu^2"):
        state = construct(make_schedule("theorem1", HALF, 6, phi=lambda nu: Fraction(nu * nu)))
        assert state.nu == 6 and state.all_passed
        for nu in range(1, 6):
            assert Fraction(state.ws[nu].q, state.ws[nu - 1].q) >= nu * nu


def _rand_frac(rng, lo, hi, den=10 ** 6):
    return lo + (hi - lo) * Fraction(rng.randrange(1, den), den)


def test_criterion7_geometry_suite():
    rng = random.Random(20261018)
    with criterion(7, "geometry suite (a)-(d)"):
        # (a) branch crossing on both hyperbola instances
        for _ in range(100):
            check_branch_crossing(_rand_frac(rng, 0, 1000), _rand_frac(rng, 0, 1000), _rand_frac(rng, 0, 100))
        # (b) 3 (2/sqrt3 - lambda) < eps_lambda <= 1
        top = two_over_sqrt3(96)
        n = 0
        while n < 1000:
            lo = _rand_frac(rng, 1, Fraction(11547, 10000))
            lam = RationalInterval(lo, lo + Fraction(1, 10 ** 30))
            if lam.hi ** 2 >= Fraction(4, 3):
                continue
            e = epsilon_lambda(lam)
            assert 3 * (top.hi - lam.lo) < e.lo and e.hi <= 1
            n += 1
        # (c) F and its inverse
        for _ in range(500):
            q, d_sq = _rand_frac(rng, 0, 1000), _rand_frac(rng, 0, 1000)
            h_sq = 1 / (q * q * d_sq)
            # F takes y2 > 0, its inverse takes x1 > 0: 500 draws in each domain
            x2, y2 = _rand_frac(rng, -1000, 1000), _rand_frac(rng, 0, 1000)
            assert map_F_inverse(q, h_sq, d_sq, *map_F(q, h_sq, d_sq, x2, y2)) == (x2, y2)
            x1, y1 = _rand_frac(rng, 0, 1000), _rand_frac(rng, -1000, 1000)
            assert map_F(q, h_sq, d_sq, *map_F_inverse(q, h_sq, d_sq, x1, y1)) == (x1, y1)
        # (d) Lemma 5 with dilation 1 + eps, and its doubled negative control
        eps_choices = [Fraction(1, 100), Fraction(1, 250), Fraction(1, 1000)]
        n1 = 0
        while n1 < 100:
            eps = rng.choice(eps_choices)
            alpha = _rand_frac(rng, eps, 1 - 2 * eps)
            omega = alpha + eps
            if not case_window_ok(CASE1, alpha, omega, eps):
                continue
            q = rng.randrange(1, 10 ** 7)
            a0, x2, y2 = rng.randrange(q), rng.randrange(-10 ** 9, 10 ** 9), _rand_frac(rng, alpha, omega)
            assert lemma5_empty(EllipseSpec(q, x2, y2, 1, 1 + eps), q, a0)
            assert not lemma5_empty(EllipseSpec(q, x2, y2, 1, 2 * (1 + eps)), q, a0)
            n1 += 1
        n2 = 0
        while n2 < 100:
            eps = rng.choice(eps_choices)
            alpha = _rand_frac(rng, 1, Fraction(1154, 1000))
            omega = alpha + eps
            if not case_window_ok(CASE2, alpha, omega, eps):
                continue
            lam = _rand_frac(rng, alpha, omega)
            t = 1 + eps
            assert dangerous_point_excluded(t, lam)
            q, k = rng.randrange(1, 10 ** 7), rng.randrange(2, 10 ** 4)
            a0 = rng.randrange(q)
            assert lemma5_empty(case2_ellipse(q, a0, k, lam, t), q, a0)
            assert not lemma5_empty(case2_ellipse(q, a0, k, lam, 2 * t), q, a0)
            n2 += 1


def test_criterion8_proposition3_audit(run_half, run_case2, run_theorem1):
    with criterion(8, "m-versus-d audit: warning level only, no condition failure"):
        for state in (run_half, run_case2, run_theorem1):
            audit = analysis.proposition3_audit(state)
            assert audit["status"] in ("ok", "warning")
            assert state.all_passed


def test_criterion9_verifier_independence(run_half, tmp_path):
    rng = random.Random(9)
    path = tmp_path / "run.json"
    write_record(build_record(run_half, ENUM_LIMIT, {}), str(path))
    text = path.read_text()
    with criterion(9, "100 random +-1 coordinate mutations all rejected by verify"):
        assert main(["verify", str(path)]) == EXIT_OK
        detected = 0
        for i in range(100):
            raw = json.loads(text)
            step = rng.randrange(8)
            coord = rng.randrange(3)
            w = raw["steps"][step]["w"]
            w[coord] = str(int(w[coord]) + rng.choice((-1, 1)))
            mp = tmp_path / f"m{i}.json"
            mp.write_text(json.dumps(raw))
            detected += main(["verify", str(mp)]) == EXIT_FAIL
        assert detected == 100
