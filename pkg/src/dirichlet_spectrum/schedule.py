"""Per-step parameters: windows (alpha, omega), epsilons, the integers k and derived bounds."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

from .conics import CASE1, CASE2, ConfigurationError
from .exact import TWO_OVER_SQRT3_SQ, as_fraction, ceil_sqrt, floor_sqrt

log = logging.getLogger(__name__)

THEOREM1, THEOREM2 = "theorem1", "theorem2"
MAX_EPSILON = Fraction(1, 100)
THEOREM1_FIRST_EPSILON = Fraction(1, 200)

PhiLike = Union[Callable[[int], Fraction], Mapping[int, Fraction], None]


@dataclass(frozen=True)
class StepParams:
    nu: int
    case_tag: str
    epsilon: Fraction
    alpha: Fraction
    omega: Fraction
    k: int


def below_two_over_sqrt3(x) -> bool:
    """x < 2/sqrt(3), decided on squares."""
    x = as_fraction(x)
    return x < 0 or x * x < TWO_OVER_SQRT3_SQ


def case_window_ok(case_tag: str, alpha, omega, eps) -> bool:
    alpha, omega, eps = as_fraction(alpha), as_fraction(omega), as_fraction(eps)
    if case_tag == CASE1:
        return eps <= alpha and omega <= 1 - eps
    if case_tag == CASE2:
        top = omega + eps
        return 1 <= alpha and top * top <= TWO_OVER_SQRT3_SQ and row_chord_feasible(omega, eps)
    raise ConfigurationError(f"unknown case {case_tag!r}")


def row_chord_feasible(omega, eps) -> bool:
    """Rows +-1 can miss the lattice under dilation 1+eps: (1+eps)**2 < 1/4 + 1/omega**2.

    Without it the extended cylinder of a case-2 step always swallows a
    lattice point next to the chord, whatever the candidate.
    """
    omega, eps = as_fraction(omega), as_fraction(eps)
    return ((1 + eps) ** 2 - Fraction(1, 4)) * omega * omega < 1


def paper_k(eps_star) -> int:
    """[24 sqrt(5) / eps_star] + 1, the floor decided exactly."""
    eps_star = as_fraction(eps_star)
    return floor_sqrt(Fraction(2880) / (eps_star * eps_star)) + 1


@dataclass(frozen=True)
class ParameterSchedule:
    mode: str
    lam: Fraction
    steps: Tuple[StepParams, ...]
    epsilon: Optional[Fraction] = None
    phi_values: Tuple[Fraction, ...] = field(default=())

    def __len__(self):
        return len(self.steps)

    def at(self, nu: int) -> StepParams:
        if not 1 <= nu <= len(self.steps):
            raise IndexError(f"step {nu} outside the schedule 1..{len(self.steps)}")
        return self.steps[nu - 1]

    def prev(self, nu: int) -> StepParams:
        # step 0 does not exist; its window is taken equal to step 1's
        return self.at(max(1, nu - 1))

    def phi(self, nu: int) -> Optional[Fraction]:
        if not self.phi_values or nu < 1:
            return None
        return self.phi_values[min(nu, len(self.phi_values)) - 1]

    # -- derived bounds -----------------------------------------------------

    def B_minus(self, nu: int) -> Fraction:
        p, c = self.prev(nu), self.at(nu)
        return c.alpha ** 2 / (p.omega * c.omega)

    def B_plus(self, nu: int) -> Fraction:
        p, c = self.prev(nu), self.at(nu)
        return 5 * c.omega ** 2 / (p.alpha * c.alpha)

    def H_minus(self, nu: int) -> Fraction:
        p, c = self.prev(nu), self.at(nu)
        return p.alpha * c.alpha ** 2 / (5 * p.omega * c.omega ** 2)

    def H_plus_sq(self, nu: int) -> Fraction:
        """H_nu^+ carries a sqrt(5); only its square is rational."""
        p, c = self.prev(nu), self.at(nu)
        return 5 * (p.omega * c.omega ** 2 / (p.alpha * c.alpha ** 2)) ** 2

    def K_minus_sq(self, nu: int) -> Fraction:
        return 9 * self.H_plus_sq(nu) / self.at(nu).epsilon ** 2

    def K_plus(self, nu: int) -> Fraction:
        return self.H_minus(nu) / (4 * self.at(nu).epsilon ** 2)

    def eps_minus(self, nu: int) -> Fraction:
        return self.prev(nu).epsilon ** 2

    def k_admissible(self, nu: int) -> bool:
        k = self.at(nu).k
        return k * k >= self.K_minus_sq(nu) and k <= self.K_plus(nu)

    # -- validation ---------------------------------------------------------

    def violations(self) -> List[str]:
        """Every broken invariant, as readable inequalities; empty when valid."""
        out = []
        prev_eps = MAX_EPSILON
        for s in self.steps:
            nu, eps = s.nu, s.epsilon
            tag = f"step {nu}"
            if not 0 < eps <= prev_eps:
                out.append(f"{tag}: need 0 < eps_nu <= eps_(nu-1) <= 1/100, got eps={eps}")
            prev_eps = eps
            if s.omega - s.alpha != eps:
                out.append(f"{tag}: omega - alpha = {s.omega - s.alpha} != eps = {eps}")
            if not case_window_ok(s.case_tag, s.alpha, s.omega, eps):
                out.append(f"{tag}: window ({s.alpha}, {s.omega}) violates the {s.case_tag} bounds")
            if not eps <= s.alpha:
                out.append(f"{tag}: eps <= alpha fails")
            if not s.omega <= 2 * s.alpha:
                out.append(f"{tag}: omega <= 2 alpha fails")
            if s.k * s.k < self.K_minus_sq(nu):
                out.append(f"{tag}: k = {s.k} < K^- = 3 H^+/eps")
            if s.k > self.K_plus(nu):
                out.append(f"{tag}: k = {s.k} > K^+ = H^-/(4 eps^2) = {float(self.K_plus(nu)):.6g}")
            hm, hp2 = self.H_minus(nu), self.H_plus_sq(nu)
            if not (Fraction(1, 40) <= hm <= Fraction(1, 5) and 5 <= hp2 <= 320):
                out.append(f"{tag}: H bounds 1/40 <= H^- <= 1/5, sqrt5 <= H^+ <= 8 sqrt5 fail")
            phi = self.phi(nu)
            if phi is not None and self.B_minus(nu) * s.k ** 2 < phi:
                out.append(f"{tag}: B^- k^2 < phi({nu}) = {phi}")
        return out

    def check(self) -> "ParameterSchedule":
        bad = self.violations()
        if bad:
            raise ConfigurationError("; ".join(bad))
        return self


# ---------------------------------------------------------------------------
# drivers


def _smallest_admissible_k(sched_steps, lam, mode, nu, phi=None) -> Tuple[int, Fraction]:
    tmp = ParameterSchedule(mode, lam, tuple(sched_steps))
    k = ceil_sqrt(tmp.K_minus_sq(nu))
    if phi is not None:
        k = max(k, ceil_sqrt(as_fraction(phi) / tmp.B_minus(nu)))
    return k, tmp.K_plus(nu)


def _theorem2(lam: Fraction, eps: Fraction, steps: int) -> ParameterSchedule:
    if not 0 < eps <= MAX_EPSILON:
        raise ConfigurationError(f"need 0 < eps <= 1/100, got eps={eps}")
    if not eps < lam:
        raise ConfigurationError(f"need eps < lambda, got eps={eps}, lambda={lam}")
    if lam * lam > TWO_OVER_SQRT3_SQ:
        raise ConfigurationError(f"need lambda <= 2/sqrt(3), got lambda={lam}")
    es = eps / 4
    windows = [(lam - 3 * es, lam - 2 * es), (lam - 2 * es, lam - es)]
    chosen = None
    for case_tag in (CASE1, CASE2):
        for a, w in windows:
            if case_window_ok(case_tag, a, w, es):
                chosen = (case_tag, a, w)
                break
        if chosen:
            break
    if chosen is None:
        raise ConfigurationError(
            f"no window of length eps/4 below lambda={lam} fits case 1 [eps*, 1-eps*] "
            f"or case 2 [1, 2/sqrt(3)-eps*]")
    case_tag, a, w = chosen
    if steps == 0:
        return ParameterSchedule(THEOREM2, lam, (), eps)
    probe = [StepParams(1, case_tag, es, a, w, 1)]
    k_min, k_max = _smallest_admissible_k(probe, lam, THEOREM2, 1)
    k = paper_k(es)
    if not k_min <= k <= k_max:
        log.info("k=%d from the constant-schedule formula breaks K^- <= k <= K^+; using %d", k, k_min)
        k = k_min
    if k > k_max:
        raise ConfigurationError(f"K^- > K^+ for eps*={es}: no admissible k")
    sched = ParameterSchedule(THEOREM2, lam, tuple(StepParams(nu, case_tag, es, a, w, k)
                                                  for nu in range(1, steps + 1)), eps)
    return sched.check()


def _phi_callable(phi: PhiLike) -> Callable[[int], Fraction]:
    if phi is None:
        return lambda nu: Fraction(nu * nu)
    if callable(phi):
        return lambda nu: as_fraction(phi(nu))
    table: Dict[int, Fraction] = {int(n): as_fraction(v) for n, v in dict(phi).items()}
    if not table:
        raise ConfigurationError("empty phi table")
    last = max(table)

    def lookup(nu):
        if nu in table:
            return table[nu]
        if nu > last:
            return table[last]
        raise ConfigurationError(f"phi table has no entry for step {nu}")
    return lookup


def _theorem1_window(lam: Fraction, eps: Fraction) -> Tuple[str, Fraction, Fraction]:
    half = eps / 2
    if lam < 1:
        alpha = min(max(lam - half, eps), 1 - 2 * eps)
        case_tag = CASE1
    else:
        alpha = max(lam - half, Fraction(1))
        case_tag = CASE2
        while not case_window_ok(CASE2, alpha, alpha + eps, eps):
            alpha -= half
            if alpha < 1:
                raise ConfigurationError(f"no case-2 window of length {eps} near lambda={lam}")
    if not case_window_ok(case_tag, alpha, alpha + eps, eps):
        raise ConfigurationError(f"no {case_tag} window of length {eps} near lambda={lam}")
    return case_tag, alpha, alpha + eps


def _theorem1(lam: Fraction, steps: int, phi: PhiLike) -> ParameterSchedule:
    if lam < 0 or lam * lam > TWO_OVER_SQRT3_SQ:
        raise ConfigurationError(f"need 0 <= lambda <= 2/sqrt(3), got lambda={lam}")
    phi_fn = _phi_callable(phi)
    out: List[StepParams] = []
    phis = []
    eps = THEOREM1_FIRST_EPSILON
    for nu in range(1, steps + 1):
        if nu > 1:
            eps = eps / 2
        for _ in range(64):
            case_tag, a, w = _theorem1_window(lam, eps)
            trial = out + [StepParams(nu, case_tag, eps, a, w, 1)]
            k, k_max = _smallest_admissible_k(trial, lam, THEOREM1, nu, phi_fn(nu))
            if k <= k_max:
                break
            eps = eps / 2
        else:
            raise ConfigurationError(f"step {nu}: cannot meet B^- k^2 >= phi({nu}) within K^+")
        out.append(StepParams(nu, case_tag, eps, a, w, k))
        phis.append(phi_fn(nu))
    return ParameterSchedule(THEOREM1, lam, tuple(out), None, tuple(phis)).check()


def make_schedule(mode: str, lam, steps: int, epsilon=None, phi: PhiLike = None) -> ParameterSchedule:
    """Build and validate a schedule; raises ConfigurationError naming the broken inequality."""
    lam = as_fraction(lam)
    if steps < 0:
        raise ConfigurationError("steps must be >= 0")
    if mode == THEOREM2:
        if epsilon is None:
            raise ConfigurationError("theorem2 needs epsilon")
        return _theorem2(lam, as_fraction(epsilon), steps)
    if mode == THEOREM1:
        return _theorem1(lam, steps, phi)
    raise ConfigurationError(f"unknown mode {mode!r}")
