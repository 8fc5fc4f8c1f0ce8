"""Exact maximization of mu over AP-free subsets of [1, N].

Both methods compare sums exactly: every reciprocal 1/k, k <= N, is scaled
by L = lcm(1..N) to an integer, so comparisons are integer comparisons.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Optional

import numpy as np

from .core import IntegerSet, check_p, find_ap_witness
from .errors import ClaimViolated, InvalidCount, TooLargeForExhaustive
from .greedy import generate_up_to
from .measure import ReciprocalSum, fraction_str, mu

EXHAUSTIVE_MAX_N = 25
METHODS = ("exhaustive", "branch_and_bound")
_CHUNK = 1 << 18


@dataclass(frozen=True)
class SearchResult:
    n: int
    p: int
    best_set: IntegerSet
    best_mu: ReciprocalSum
    nodes_explored: int
    method: str
    proven_optimal: bool
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return {
            "N": self.n,
            "p": self.p,
            "method": self.method,
            "best_set": list(self.best_set.elements),
            "best_mu": self.best_mu.exact_str(),
            "best_mu_approx": self.best_mu.approx,
            "nodes_explored": self.nodes_explored,
            "proven_optimal": self.proven_optimal,
            "wall_time_s": self.elapsed,
        }


def _lcm_upto(n: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), range(1, n + 1), 1)


def progressions_in_range(n: int, p: int):
    """All p-term progressions inside [1, n] as (start, diff)."""
    return [(a, d) for d in range(1, (n - 1) // (p - 1) + 1) for a in range(1, n - (p - 1) * d + 1)]


def _check_args(n: int, p: int) -> tuple[int, int]:
    p = check_p(p)
    if isinstance(n, bool) or int(n) < 1:
        raise InvalidCount(f"N must be >= 1, got {n!r}")
    return int(n), p


def _exhaustive(n: int, p: int, jobs: int = 1) -> tuple[list[int], int]:
    if n > EXHAUSTIVE_MAX_N:
        raise TooLargeForExhaustive(f"exhaustive search is limited to N <= {EXHAUSTIVE_MAX_N}, got {n}")
    scale = _lcm_upto(n)
    weights = [scale // k for k in range(1, n + 1)]
    ap_masks = [sum(1 << (a - 1 + i * d) for i in range(p)) for a, d in progressions_in_range(n, p)]
    total = 1 << n

    def scan(lo: int, hi: int):
        masks = np.arange(lo, hi, dtype=np.int64)
        free = np.ones(masks.size, dtype=bool)
        for apm in ap_masks:
            free &= (masks & apm) != apm
        values = np.zeros(masks.size, dtype=np.int64)
        for b, w in enumerate(weights):
            values += ((masks >> b) & 1) * w
        values[~free] = -1
        best = int(values.max())
        return best, masks[values == best].tolist()

    bounds = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]
    if jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(lambda b: scan(*b), bounds))
    else:
        parts = [scan(*b) for b in bounds]
    # ties resolved after collection so the answer does not depend on scheduling
    best = max(v for v, _ in parts)
    candidates = [
        [b + 1 for b in range(n) if (m >> b) & 1]
        for v, ms in parts if v == best for m in ms
    ]
    return min(candidates), total


class _BranchAndBound:
    def __init__(self, n: int, p: int):
        self.n, self.p = n, p
        scale = _lcm_upto(n)
        self.w = [0] + [scale // k for k in range(1, n + 1)]
        # rem[k] = weight of all integers k..n
        self.rem = [0] * (n + 2)
        for k in range(n, 0, -1):
            self.rem[k] = self.rem[k + 1] + self.w[k]
        self.member = [False] * (n + 1)
        self.chosen: list[int] = []
        self.nodes = 0
        greedy = generate_up_to(p, n)
        self.best_set = list(greedy.elements)
        self.best_val = sum(self.w[k] for k in self.best_set)

    def closes_ap(self, k: int) -> bool:
        member, p = self.member, self.p
        for d in range(1, (k - 1) // (self.p - 1) + 1):
            if all(member[k - i * d] for i in range(1, p)):
                return True
        return False

    def completion_ok(self, k: int) -> bool:
        """Whether chosen + {k..n} is AP-free."""
        cand = IntegerSet(self.chosen + list(range(k, self.n + 1)))
        return find_ap_witness(cand, self.p) is None

    def offer(self, cand: list[int], val: int) -> None:
        if val > self.best_val or (val == self.best_val and cand < self.best_set):
            self.best_val, self.best_set = val, list(cand)

    def run(self) -> None:
        self._visit(1, 0)

    def _visit(self, k: int, val: int) -> None:
        self.nodes += 1
        if k > self.n:
            self.offer(self.chosen, val)
            return
        bound = val + self.rem[k]
        if bound < self.best_val:
            return
        if bound == self.best_val:
            # only taking every remaining integer can tie the incumbent
            if self.completion_ok(k):
                self.offer(self.chosen + list(range(k, self.n + 1)), bound)
            return
        # include first: in DFS order this yields lexicographically smaller sets first
        if not self.closes_ap(k):
            self.member[k] = True
            self.chosen.append(k)
            self._visit(k + 1, val + self.w[k])
            self.chosen.pop()
            self.member[k] = False
        self._visit(k + 1, val)


def max_mu_subset(n: int, p: int, method: str = "branch_and_bound", jobs: int = 1) -> SearchResult:
    """Heaviest AP-free subset of [1, n]; ties go to the lexicographically smallest list."""
    n, p = _check_args(n, p)
    method = {"bnb": "branch_and_bound"}.get(method, method)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    t0 = time.perf_counter()
    if method == "exhaustive":
        best, nodes = _exhaustive(n, p, jobs)
    else:
        bb = _BranchAndBound(n, p)
        bb.run()
        best, nodes = bb.best_set, bb.nodes
    elapsed = time.perf_counter() - t0
    best_set = IntegerSet(best)
    w = find_ap_witness(best_set, p)
    if w is not None:
        raise ClaimViolated(f"search returned a set containing {w.terms}", w)
    return SearchResult(n, p, best_set, mu(best_set, exact_cap=None), nodes, method, True, elapsed)


@dataclass(frozen=True)
class GreedyComparison:
    n: int
    p: int
    greedy_set: IntegerSet
    greedy_mu: ReciprocalSum
    optimal: SearchResult

    @property
    def difference(self) -> Fraction:
        """mu(optimal) - mu(greedy); never negative."""
        return self.optimal.best_mu.exact - self.greedy_mu.exact

    @property
    def greedy_is_optimal(self) -> bool:
        return self.difference == 0

    def as_dict(self) -> dict:
        return {
            "N": self.n,
            "p": self.p,
            "greedy_restricted": list(self.greedy_set.elements),
            "greedy_mu": self.greedy_mu.exact_str(),
            "optimal": self.optimal.as_dict(),
            "difference": fraction_str(self.difference),
            "difference_approx": float(self.difference),
            "greedy_is_optimal": self.greedy_is_optimal,
        }


def greedy_vs_optimal(n: int, p: int, method: str = "branch_and_bound") -> GreedyComparison:
    n, p = _check_args(n, p)
    greedy = generate_up_to(p, n)
    opt = max_mu_subset(n, p, method)
    return GreedyComparison(n, p, greedy, mu(greedy, exact_cap=None), opt)
