"""Constructive gadgets for progression-free sets.

* ``amplify``: B = A + 2N*E with N = max A.  The scaled copy sits above 2N and
  every progression term difference inside it is a multiple of 2N, so no
  progression can straddle A and the copy, while mu grows by mu(E)/2N.
* ``bootstrap``: iterate ``amplify`` from {1} with greedy amplifiers until the
  harmonic ceiling proves no amplifier fits in the budget.
* ``partition_R`` / ``pigeonhole_part`` / ``join_lemma``: split a set lying
  above 2M into the four interval families [(j+1)3^i M, (j+2)3^i M) and glue
  the heaviest family onto a set below M.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import IntegerSet, check_p, extension_creates_ap, find_ap_witness
from .errors import (
    AmplifierTooSmall,
    BelowRange,
    ClaimViolated,
    NotApFree,
    PreconditionViolated,
)
from .greedy import GreedyGenerator
from .measure import HarmonicCeiling, ReciprocalSum, harmonic_ceiling, mu


def _require_ap_free(s: IntegerSet, p: int, name: str, exc=NotApFree) -> None:
    w = find_ap_witness(s, p)
    if w is None:
        return
    msg = f"{name} contains the {p}-term progression {w.terms}"
    if exc is NotApFree:
        raise NotApFree(msg, w)
    raise exc(msg)


def scale_set(e: IntegerSet, c: int) -> IntegerSet:
    if int(c) < 1:
        raise ValueError(f"scale must be >= 1, got {c}")
    e = IntegerSet(e)
    return IntegerSet([int(c) * v for v in e.elements]) if len(e) else IntegerSet()


@dataclass(frozen=True)
class AmplifyReport:
    base: IntegerSet
    amplifier: IntegerSet
    scale: int
    result: IntegerSet
    mu_base: ReciprocalSum
    mu_result: ReciprocalSum
    mu_amplifier: ReciprocalSum

    def as_dict(self) -> dict:
        return {
            "base": list(self.base.elements),
            "amplifier": list(self.amplifier.elements),
            "scale": self.scale,
            "result": list(self.result.elements),
            "mu_base": self.mu_base.exact_str(),
            "mu_amplifier": self.mu_amplifier.exact_str(),
            "mu_result": self.mu_result.exact_str(),
            "mu_result_approx": self.mu_result.approx,
            "ap_free": True,
        }


def amplify(a: IntegerSet, e: IntegerSet, p: int) -> AmplifyReport:
    """Join ``a`` with the copy of ``e`` scaled by twice the maximum of ``a``."""
    p = check_p(p)
    a, e = IntegerSet(a), IntegerSet(e)
    if not len(a) or not len(e):
        raise PreconditionViolated("base and amplifier must be nonempty")
    _require_ap_free(a, p, "base")
    _require_ap_free(e, p, "amplifier")
    n = a.max
    mu_e = mu(e, exact_cap=None)
    if mu_e.exact < 2 * n:
        raise AmplifierTooSmall(f"mu(E) = {mu_e.exact} is below 2*max(A) = {2 * n}")
    scaled = scale_set(e, 2 * n)
    # scaled.min >= 2N > N = a.max, so the union is disjoint
    result = a | scaled
    w = find_ap_witness(result, p)
    if w is not None:
        raise ClaimViolated(f"amplified set contains the progression {w.terms}", w)
    mu_a = mu(a, exact_cap=None)
    mu_b = mu(result, exact_cap=None)
    assert mu_b.exact == mu_a.exact + mu_e.exact / (2 * n)
    return AmplifyReport(a, e, 2 * n, result, mu_a, mu_b, mu_e)


@dataclass(frozen=True)
class AmplifierSearch:
    """Outcome of ``find_amplifier``: a set, or an infeasibility reason."""

    amplifier: Optional[IntegerSet]
    target: int
    budget: int
    ceiling: HarmonicCeiling
    reason: str

    @property
    def feasible(self) -> bool:
        return self.amplifier is not None


def find_amplifier(p: int, n: int, budget: int) -> AmplifierSearch:
    """Shortest greedy prefix E of S_p with mu(E) >= 2n and max(E) <= budget."""
    p = check_p(p)
    target = 2 * int(n)
    ceiling = harmonic_ceiling(budget)
    if ceiling.certifies_below(target):
        return AmplifierSearch(None, target, budget, ceiling, "harmonic-ceiling")
    gen = GreedyGenerator(p)
    limit, done = 0, 0
    running = 0.0
    while limit < budget:
        limit = min(budget, max(1024, 4 * limit))
        gen.extend_to(limit)
        terms = gen.terms()
        fresh = terms.array[done:]
        # float prefix sums only screen for the first candidate; the decision is exact
        partial = running + np.cumsum(1.0 / fresh)
        hits = np.flatnonzero(partial >= target - 1e-6)
        for h in hits:
            prefix = terms.prefix(done + int(h) + 1)
            if mu(prefix, exact_cap=None).exact >= target:
                return AmplifierSearch(prefix, target, budget, ceiling, "found")
        if fresh.size:
            running = float(partial[-1])
        done = len(terms)
    return AmplifierSearch(None, target, budget, ceiling, "greedy-within-budget")


@dataclass
class BootstrapResult:
    p: int
    budget: int
    steps_requested: int
    sets: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    # step number at which no amplifier fit the budget, if any
    exhausted_at: Optional[int] = None
    halt: Optional[AmplifierSearch] = None

    @property
    def status(self) -> str:
        return "budget_exhausted" if self.exhausted_at is not None else "completed"

    def as_dict(self) -> dict:
        out = {
            "p": self.p,
            "budget": self.budget,
            "steps_requested": self.steps_requested,
            "steps_completed": len(self.reports),
            "status": self.status,
            "chain": [
                {"step": j, "set": list(s.elements), "mu": mu(s, exact_cap=None).exact_str(),
                 "mu_approx": mu(s, exact_cap=None).approx}
                for j, s in enumerate(self.sets)
            ],
        }
        if self.halt is not None:
            out["halted_at_step"] = self.exhausted_at
            out["required_mu"] = self.halt.target
            out["infeasibility"] = self.halt.reason
            out["harmonic_ceiling"] = self.halt.ceiling.as_dict()
        return out


def bootstrap(p: int, steps: int, budget: int) -> BootstrapResult:
    """Grow A_0 = {1} by repeated amplification.

    Running out of budget is the expected ending and is reported in the
    result (``status == "budget_exhausted"``) rather than raised.
    """
    p = check_p(p)
    res = BootstrapResult(p, int(budget), int(steps))
    current = IntegerSet([1])
    res.sets.append(current)
    for step in range(1, int(steps) + 1):
        search = find_amplifier(p, current.max, budget)
        if not search.feasible:
            res.exhausted_at = step
            res.halt = search
            break
        report = amplify(current, search.amplifier, p)
        res.reports.append(report)
        current = report.result
        res.sets.append(current)
    return res


def block_index(x: int, m: int) -> tuple[int, int]:
    """The (j, i), 1 <= j <= 4, with (j+1) 3^i m <= x < (j+2) 3^i m."""
    x, m = int(x), int(m)
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    if x < 2 * m:
        raise BelowRange(f"{x} is below 2M = {2 * m}")
    i, base = 0, m
    while 2 * 3 * base <= x:
        base *= 3
        i += 1
    j = x // base - 1
    return j, i


@dataclass(frozen=True)
class PartitionResult:
    m: int
    parts: tuple  # four IntegerSets, index 0 holds R_1
    block_map: dict  # element -> (j, i)

    def part(self, j: int) -> IntegerSet:
        return self.parts[j - 1]

    def as_dict(self) -> dict:
        return {
            "M": self.m,
            "parts": {str(j + 1): list(s.elements) for j, s in enumerate(self.parts)},
            "mu_parts": {str(j + 1): mu(s, exact_cap=None).exact_str() for j, s in enumerate(self.parts)},
            "block_map": {str(x): list(ji) for x, ji in sorted(self.block_map.items())},
        }


def partition_R(r: IntegerSet, m: int) -> PartitionResult:
    r = IntegerSet(r)
    buckets: list[list[int]] = [[], [], [], []]
    block_map = {}
    for x in r.elements:
        j, i = block_index(x, m)
        buckets[j - 1].append(x)
        block_map[x] = (j, i)
    parts = tuple(IntegerSet._trusted(np.array(b, dtype=np.int64)) for b in buckets)
    return PartitionResult(int(m), parts, block_map)


def pigeonhole_part(r: IntegerSet, m: int) -> tuple[int, IntegerSet]:
    """The part with the largest mu (smallest j on ties); it carries >= mu(R)/4."""
    parts = partition_R(r, m).parts
    sums = [mu(s, exact_cap=None).exact for s in parts]
    best = max(range(4), key=lambda k: (sums[k], -k))
    return best + 1, parts[best]


def join_lemma(a1: IntegerSet, r: IntegerSet, m: int, p: int) -> IntegerSet:
    """A1 joined with the heaviest interval family of R, re-verified AP-free.

    Requires max(A1) <= M <= min(R)/2, A1 AP-free and the selected part
    AP-free (any AP-free R qualifies).  Raises ClaimViolated if the union
    nevertheless contains a progression.
    """
    p = check_p(p)
    a1, r = IntegerSet(a1), IntegerSet(r)
    m = int(m)
    if a1.max > m:
        raise PreconditionViolated(f"max(A1) = {a1.max} exceeds M = {m}")
    if len(r) and r.min < 2 * m:
        raise PreconditionViolated(f"min(R) = {r.min} is below 2M = {2 * m}")
    _require_ap_free(a1, p, "A1", PreconditionViolated)
    j, rj = pigeonhole_part(r, m)
    # only the part that is joined has to be AP-free
    _require_ap_free(rj, p, f"R_{j}", PreconditionViolated)
    joined = a1 | rj
    w = find_ap_witness(joined, p)
    if w is not None:
        raise ClaimViolated(f"A1 joined with R_j contains the progression {w.terms}", w)
    return joined


def random_ap_free(rng: random.Random, lo: int, hi: int, p: int, tries: int) -> IntegerSet:
    """AP-free subset of [lo, hi] grown from ``tries`` random candidates in increasing order."""
    cands = sorted(rng.sample(range(lo, hi + 1), min(tries, hi - lo + 1)))
    kept: list[int] = []
    for x in cands:
        if not extension_creates_ap(IntegerSet._trusted(np.array(kept, dtype=np.int64)), x, p, check=False):
            kept.append(x)
    return IntegerSet._trusted(np.array(kept, dtype=np.int64))


@dataclass(frozen=True)
class LemmaInstance:
    p: int
    m: int
    a1: IntegerSet
    r: IntegerSet


def random_lemma_instance(rng: random.Random, max_m: int = 50, spread: int = 200) -> LemmaInstance:
    """M in [1, max_m], AP-free A1 in [1, M], AP-free R in [2M, spread*M], p in {3, 4, 5}."""
    p = rng.choice((3, 4, 5))
    m = rng.randint(1, max_m)
    a1 = random_ap_free(rng, 1, m, p, rng.randint(0, m))
    r = random_ap_free(rng, 2 * m, spread * m, p, rng.randint(1, 60))
    return LemmaInstance(p, m, a1, r)


@dataclass
class LemmaSuiteSummary:
    seed: int
    instances: int = 0
    tiling_failures: int = 0
    pigeonhole_failures: int = 0
    claim_violations: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.tiling_failures or self.pigeonhole_failures or self.claim_violations)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "instances": self.instances,
            "tiling_failures": self.tiling_failures,
            "pigeonhole_failures": self.pigeonhole_failures,
            "claim_violations": self.claim_violations,
            "counterexamples": self.counterexamples,
            "passed": self.passed,
        }


def check_lemma_instance(inst: LemmaInstance) -> dict:
    """Partition, pigeonhole and join checks for one instance; returns failure flags."""
    part = partition_R(inst.r, inst.m)
    union = IntegerSet([])
    for s in part.parts:
        union = union | s
    disjoint = sum(len(s) for s in part.parts) == len(inst.r)
    inside = all(
        (j + 1) * 3**i * inst.m <= x < (j + 2) * 3**i * inst.m and x in part.part(j)
        for x, (j, i) in part.block_map.items()
    )
    tiled = union == inst.r and disjoint and inside
    _, rj = pigeonhole_part(inst.r, inst.m)
    total = mu(inst.r, exact_cap=None).exact
    pigeon = 4 * mu(rj, exact_cap=None).exact >= total
    violated = None
    try:
        join_lemma(inst.a1, inst.r, inst.m, inst.p)
    except ClaimViolated as exc:
        violated = exc.witness.as_dict()
    return {"tiled": tiled, "pigeonhole": pigeon, "violation": violated}


def lemma_suite(instances: int = 1000, seed: int = 0) -> LemmaSuiteSummary:
    rng = random.Random(seed)
    out = LemmaSuiteSummary(seed)
    for _ in range(instances):
        inst = random_lemma_instance(rng)
        res = check_lemma_instance(inst)
        out.instances += 1
        out.tiling_failures += not res["tiled"]
        out.pigeonhole_failures += not res["pigeonhole"]
        if res["violation"] is not None:
            out.claim_violations += 1
            out.counterexamples.append({
                "p": inst.p, "M": inst.m, "A1": list(inst.a1.elements),
                "R": list(inst.r.elements), "witness": res["violation"],
            })
    return out
