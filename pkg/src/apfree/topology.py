"""Finite-horizon versions of the prefix-convergence topology on sets.

A set is identified with its 0/1 indicator sequence; A_n -> A when every
finite prefix of the indicators eventually agrees.  Everything here works on
finitely described sets, so each verdict carries the horizon it was checked at.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import IntegerSet, check_p, find_ap_witness, ApWitness
from .errors import HorizonExceeded, NotConvergedAtHorizon, PreconditionViolated, TailNotSmall
from .greedy import generate_up_to
from .measure import fraction_str, mu


@dataclass(frozen=True)
class HorizonSet:
    """A possibly infinite set known only on [1, horizon]."""

    known: IntegerSet
    horizon: int
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "known", IntegerSet(self.known).truncate(self.horizon))


Member = Union[IntegerSet, HorizonSet]


def greedy_horizon(p: int, horizon: int) -> HorizonSet:
    """S_p described up to ``horizon``."""
    return HorizonSet(generate_up_to(p, horizon), horizon, f"S_{p}")


def horizon_of(s: Member) -> Optional[int]:
    """None for a fully known finite set."""
    return s.horizon if isinstance(s, HorizonSet) else None


def known_part(s: Member, k: int) -> IntegerSet:
    """``s`` intersected with [1, k]."""
    if isinstance(s, HorizonSet):
        if k > s.horizon:
            raise HorizonExceeded(f"{s.label or 'set'} is described only up to {s.horizon}, asked for {k}")
        return s.known.truncate(k)
    return IntegerSet(s).truncate(k)


@dataclass(frozen=True)
class IndicatorPrefix:
    bits: tuple
    horizon: int

    def to_set(self) -> IntegerSet:
        return IntegerSet.from_bitmap(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def _bits(s: Member, k: int) -> np.ndarray:
    part = known_part(s, k)
    bits = np.zeros(k, dtype=np.uint8)
    bits[part.array - 1] = 1
    return bits


def indicator(s: Member, k: int) -> IndicatorPrefix:
    if k < 1:
        raise ValueError(f"prefix length must be >= 1, got {k}")
    return IndicatorPrefix(tuple(int(b) for b in _bits(s, k)), k)


def first_disagreement(a: Member, b: Member, horizon: int) -> Optional[int]:
    """Smallest n <= horizon where membership differs; None if they agree throughout."""
    diff = np.flatnonzero(_bits(a, horizon) != _bits(b, horizon))
    return int(diff[0]) + 1 if diff.size else None


def prefix_distance(a: Member, b: Member, horizon: int) -> float:
    """2^-n for the first disagreement n; 0.0 if none within the horizon."""
    n = first_disagreement(a, b, horizon)
    return 0.0 if n is None else 2.0**-n


class SetSequence:
    """Finite sequence A_1, ..., A_length of finitely described sets (1-based)."""

    def __init__(self, members: Union[Sequence[Member], Callable[[int], Member]], length: Optional[int] = None):
        if callable(members):
            if length is None:
                raise ValueError("length is required for a generated sequence")
            self._fn = members
            self.length = int(length)
        else:
            items = list(members)
            self._fn = lambda n: items[n - 1]
            self.length = len(items)

    def member(self, n: int) -> Member:
        if not 1 <= n <= self.length:
            raise IndexError(f"member {n} outside 1..{self.length}")
        return self._fn(n)

    def __len__(self) -> int:
        return self.length

    def __iter__(self):
        return (self.member(n) for n in range(1, self.length + 1))

    @classmethod
    def truncations(cls, a: Member, length: int) -> "SetSequence":
        """A_n = A intersected with [1, n]."""
        full = known_part(a, length) if isinstance(a, HorizonSet) else IntegerSet(a)
        return cls(lambda n: full.truncate(n), length)

    @classmethod
    def prefixes(cls, a: Member, length: int) -> "SetSequence":
        """A_n = the n smallest (known) elements of A."""
        full = a.known if isinstance(a, HorizonSet) else IntegerSet(a)
        return cls(lambda n: full.prefix(n), length)

    @classmethod
    def constant(cls, a: Member, length: int) -> "SetSequence":
        return cls(lambda n: a, length)


def convergence_index(seq: SetSequence, a: Member, k: int) -> Optional[int]:
    """Smallest N such that A_n agrees with A on [1, k] for every N <= n <= len(seq).

    Returns None (not converged at this horizon) when even the last member
    disagrees.
    """
    target = _bits(a, k)
    for n in range(seq.length, 0, -1):
        if not np.array_equal(_bits(seq.member(n), k), target):
            return None if n == seq.length else n + 1
    return 1


@dataclass(frozen=True)
class ClosednessVerdict:
    passed: bool
    window: int
    convergence_index: int
    witness: Optional[ApWitness]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "window": self.window,
            "convergence_index": self.convergence_index,
            "witness": None if self.witness is None else self.witness.as_dict(),
        }


def closedness_check(seq: SetSequence, a: Member, p: int, window: int) -> ClosednessVerdict:
    """Check that a limit of AP-free sets is AP-free on [1, window].

    Each member must be AP-free (on its known part) and the sequence must
    agree with ``a`` on the first ``window`` bits; otherwise
    PreconditionViolated.  A failing verdict carries the offending witness.
    """
    p = check_p(p)
    for n, member in enumerate(seq, start=1):
        part = member.known if isinstance(member, HorizonSet) else IntegerSet(member)
        w = find_ap_witness(part, p)
        if w is not None:
            raise PreconditionViolated(f"member {n} contains the {p}-term progression {w.terms}")
    nk = convergence_index(seq, a, window)
    if nk is None:
        raise PreconditionViolated(f"sequence does not agree with the limit on [1, {window}]")
    w = find_ap_witness(known_part(a, window), p)
    return ClosednessVerdict(w is None, window, nk, w)


@dataclass(frozen=True)
class ContinuityReport:
    epsilon: Fraction
    horizon: int
    n0: int
    agreement_bits: int
    N0: int
    max_deviation: Fraction
    tail_limit: Fraction
    max_member_tail: Fraction
    members_checked: int

    @property
    def within_epsilon(self) -> bool:
        return self.max_deviation < self.epsilon

    @property
    def two_tail_bound(self) -> Fraction:
        return self.tail_limit + self.max_member_tail

    @property
    def two_tail_bound_holds(self) -> bool:
        return self.max_deviation <= self.two_tail_bound

    def as_dict(self) -> dict:
        return {
            "epsilon": fraction_str(self.epsilon),
            "horizon": self.horizon,
            "n0": self.n0,
            "agreement_bits": self.agreement_bits,
            "N0": self.N0,
            "members_checked": self.members_checked,
            "max_deviation": fraction_str(self.max_deviation),
            "max_deviation_approx": float(self.max_deviation),
            "within_epsilon": self.within_epsilon,
            "tail_limit": fraction_str(self.tail_limit),
            "max_member_tail": fraction_str(self.max_member_tail),
            "two_tail_bound_holds": self.two_tail_bound_holds,
        }


def continuity_check(seq: SetSequence, a: Member, epsilon, horizon: int) -> ContinuityReport:
    """Measure how fast mu(A_n) approaches mu(A), with every set cut at ``horizon``.

    Picks the least n0 whose tail sum of A beyond its n0-th element is below
    epsilon/2, takes N0 = convergence index at k = a_{n0}, then compares
    mu(A_n) with mu(A) exactly for all n >= N0.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    limit = known_part(a, horizon)
    elems = limit.elements
    m = len(elems)
    # tails[i] = sum of 1/a over positions > i
    tails = [Fraction(0)] * (m + 1)
    for i in range(m - 1, -1, -1):
        tails[i] = tails[i + 1] + Fraction(1, elems[i])
    n0 = next(i for i in range(m + 1) if tails[i] < epsilon / 2)
    if n0 == m and m > 0 and isinstance(a, HorizonSet) and tails[m - 1] >= epsilon / 2:
        raise TailNotSmall(
            f"the tail of the limit stays >= epsilon/2 up to horizon {horizon}; "
            "only truncation would make it small"
        )
    k = elems[n0 - 1] if n0 > 0 else 0
    big_n = convergence_index(seq, a, k) if k > 0 else 1
    if big_n is None:
        raise NotConvergedAtHorizon(f"members never settle on [1, {k}]")
    mu_limit = mu(limit, exact_cap=None).exact
    max_dev = Fraction(0)
    max_tail = Fraction(0)
    for n in range(big_n, seq.length + 1):
        member = known_part(seq.member(n), horizon)
        dev = abs(mu(member, exact_cap=None).exact - mu_limit)
        tail = mu(IntegerSet._trusted(member.array[n0:]), exact_cap=None).exact
        max_dev = max(max_dev, dev)
        max_tail = max(max_tail, tail)
    return ContinuityReport(
        epsilon, horizon, n0, k, big_n, max_dev, tails[n0], max_tail,
        seq.length - big_n + 1,
    )
