"""Reciprocal sums mu(A) = sum of 1/a, exact and approximate."""

from __future__ import annotations

import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import IntegerSet, check_p
from .errors import ExactnessBudgetExceeded, IndexOutOfRange

DEFAULT_EXACT_CAP = 10_000

# Harmonic numbers up to this budget are summed exactly; beyond it the
# rigorous bound H_B <= 1 + ln B is used.
EXACT_HARMONIC_LIMIT = 5_000

LOG_BASE = "e"


@contextmanager
def _unbounded_int_str():
    # exact denominators of long prefixes run to tens of thousands of digits
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def fraction_str(x: Fraction) -> str:
    with _unbounded_int_str():
        return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    with _unbounded_int_str():
        return Fraction(text)


@dataclass(frozen=True)
class ReciprocalSum:
    exact: Optional[Fraction]
    approx: float
    # absolute bound on |approx - true value|
    error_bound: float = 0.0
    budget_exceeded: bool = False

    def exact_str(self) -> Optional[str]:
        if self.exact is None:
            return None
        return fraction_str(self.exact)

    def __float__(self) -> float:
        return self.approx


def _tree_sum(values: Sequence[int]) -> Fraction:
    # Pairwise reduction keeps operand sizes balanced; each Fraction add
    # normalizes by gcd.
    fracs = [Fraction(1, v) for v in values]
    if not fracs:
        return Fraction(0)
    while len(fracs) > 1:
        nxt = [fracs[i] + fracs[i + 1] for i in range(0, len(fracs) - 1, 2)]
        if len(fracs) % 2:
            nxt.append(fracs[-1])
        fracs = nxt
    return fracs[0]


def _sum_values(values: Sequence[int], exact_cap: Optional[int], strict: bool) -> ReciprocalSum:
    approx = math.fsum(1.0 / v for v in values)
    # each 1/v rounds with relative error <= 2^-53, fsum adds one final rounding
    bound = 2.0**-51 * approx
    if exact_cap is not None and len(values) > exact_cap:
        if strict:
            raise ExactnessBudgetExceeded(
                f"{len(values)} elements exceed the exact-arithmetic cap {exact_cap}"
            )
        return ReciprocalSum(None, approx, bound, budget_exceeded=True)
    return ReciprocalSum(_tree_sum(values), approx, bound)


def mu(s: IntegerSet, exact_cap: Optional[int] = DEFAULT_EXACT_CAP, strict: bool = False) -> ReciprocalSum:
    """Sum of reciprocals of the elements of ``s``.

    Above ``exact_cap`` elements the exact rational is omitted and the result
    is flagged ``budget_exceeded`` (or ExactnessBudgetExceeded is raised when
    ``strict``).  ``exact_cap=None`` disables the cap.
    """
    return _sum_values(IntegerSet(s).elements, exact_cap, strict)


def mu_tail(s: IntegerSet, from_index: int, exact_cap: Optional[int] = DEFAULT_EXACT_CAP,
            strict: bool = False) -> ReciprocalSum:
    """mu of the elements at 1-based positions ``>= from_index``."""
    s = IntegerSet(s)
    if not 1 <= from_index <= len(s) + 1:
        raise IndexOutOfRange(f"from_index {from_index} outside 1..{len(s) + 1}")
    return _sum_values(s.elements[from_index - 1:], exact_cap, strict)


def mu_prefix(s: IntegerSet, count: int, exact_cap: Optional[int] = DEFAULT_EXACT_CAP,
              strict: bool = False) -> ReciprocalSum:
    """mu of the ``count`` smallest elements."""
    s = IntegerSet(s)
    if not 0 <= count <= len(s):
        raise IndexOutOfRange(f"count {count} outside 0..{len(s)}")
    return _sum_values(s.elements[:count], exact_cap, strict)


def gerver_reference(p: int) -> float:
    """p * ln p, the level greedy sums are compared against (natural log)."""
    p = check_p(p)
    return p * math.log(p)


@dataclass(frozen=True)
class HarmonicCeiling:
    """Upper bound on H_B = 1 + 1/2 + ... + 1/B, hence on mu of any subset of [1, B]."""

    budget: int
    upper: float
    exact: Optional[Fraction]
    method: str
    estimate: float

    def certifies_below(self, target) -> bool:
        """True iff H_B < target is proven."""
        if self.exact is not None:
            return self.exact < Fraction(target)
        return self.upper < target

    def as_dict(self) -> dict:
        return {
            "budget": self.budget,
            "upper_bound": self.upper,
            "exact": None if self.exact is None else fraction_str(self.exact),
            "method": self.method,
            "estimate": self.estimate,
        }


def harmonic_ceiling(budget: int) -> HarmonicCeiling:
    budget = int(budget)
    if budget < 1:
        return HarmonicCeiling(budget, 0.0, Fraction(0), "empty", 0.0)
    gamma = 0.5772156649015329
    estimate = math.log(budget) + gamma + 1 / (2 * budget) - 1 / (12 * budget**2)
    if budget <= EXACT_HARMONIC_LIMIT:
        exact = _tree_sum(range(1, budget + 1))
        return HarmonicCeiling(budget, float(exact), exact, "exact", float(exact))
    # H_B <= 1 + ln B; pad for the rounding of math.log
    upper = (1.0 + math.log(budget)) * (1 + 1e-12)
    return HarmonicCeiling(budget, upper, None, "1+ln(B)", estimate)


def measure_report(s: IntegerSet, p: Optional[int] = None,
                   exact_cap: Optional[int] = DEFAULT_EXACT_CAP) -> dict:
    r = mu(s, exact_cap=exact_cap)
    return {
        "count": len(s),
        "mu_exact": r.exact_str(),
        "mu_approx": r.approx,
        "reference_p_log_p": gerver_reference(p) if p is not None else None,
        "log_base": LOG_BASE,
    }
