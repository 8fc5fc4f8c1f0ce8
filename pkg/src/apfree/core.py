"""Finite integer sets and arithmetic-progression detection."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import ElementOverflow, InvalidP, NotAnExtension, PreconditionViolated

# Elements are stored as int64; products like start + (p-1)*diff must not wrap.
MAX_ELEMENT = 2**62

# Above this maximum the membership bitmap is not materialized and lookups
# fall back to binary search over the sorted elements.
BITMAP_LIMIT = 1 << 31


def check_p(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 3:
        raise InvalidP(f"progression length must be an integer >= 3, got {p!r}")
    return int(p)


class IntegerSet:
    """Immutable finite set of positive integers.

    Keeps the elements as a sorted int64 array and lazily builds a byte
    bitmap indexed by value (index 0 unused) for O(1) membership probes.
    """

    def __init__(self, elements: Iterable[int] = ()):
        if isinstance(elements, IntegerSet):
            self._arr = elements._arr
            return
        values = sorted(set(int(e) for e in elements))
        if values and values[0] < 1:
            raise ValueError(f"elements must be positive integers, got {values[0]}")
        if values and values[-1] > MAX_ELEMENT:
            raise ElementOverflow(f"element {values[-1]} exceeds limit {MAX_ELEMENT}")
        arr = np.array(values, dtype=np.int64)
        arr.flags.writeable = False
        self._arr = arr

    @classmethod
    def _trusted(cls, arr: np.ndarray, bitmap: Optional[np.ndarray] = None) -> "IntegerSet":
        # arr must already be strictly increasing positive int64
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.flags.writeable = False
        obj._arr = arr
        if bitmap is not None:
            bitmap.flags.writeable = False
            obj.__dict__["bitmap"] = bitmap
        return obj

    @classmethod
    def from_bitmap(cls, bits) -> "IntegerSet":
        """Build from a 0/1 sequence whose entry ``i`` is the membership of ``i + 1``."""
        idx = np.flatnonzero(np.asarray(bits, dtype=bool)) + 1
        return cls._trusted(idx.astype(np.int64))

    @property
    def array(self) -> np.ndarray:
        return self._arr

    @cached_property
    def elements(self) -> tuple:
        return tuple(int(v) for v in self._arr)

    @property
    def max(self) -> int:
        return int(self._arr[-1]) if self._arr.size else 0

    @property
    def min(self) -> int:
        return int(self._arr[0]) if self._arr.size else 0

    @cached_property
    def bitmap(self) -> np.ndarray:
        """Boolean membership array of length ``max + 1``."""
        if self.max > BITMAP_LIMIT:
            raise ElementOverflow(f"bitmap for max element {self.max} exceeds {BITMAP_LIMIT}")
        bits = np.zeros(self.max + 1, dtype=bool)
        bits[self._arr] = True
        bits.flags.writeable = False
        return bits

    def contains_many(self, values: np.ndarray) -> np.ndarray:
        """Vectorized membership test; values outside ``[1, max]`` are absent."""
        values = np.asarray(values, dtype=np.int64)
        inside = (values >= 1) & (values <= self.max)
        if self.max <= BITMAP_LIMIT:
            out = np.zeros(values.shape, dtype=bool)
            out[inside] = self.bitmap[values[inside]]
            return out
        pos = np.searchsorted(self._arr, values)
        pos = np.minimum(pos, self._arr.size - 1)
        return inside & (self._arr[pos] == values)

    def __contains__(self, x) -> bool:
        x = int(x)
        if x < 1 or x > self.max:
            return False
        if self.max <= BITMAP_LIMIT:
            return bool(self.bitmap[x])
        i = int(np.searchsorted(self._arr, x))
        return i < self._arr.size and int(self._arr[i]) == x

    def __len__(self) -> int:
        return int(self._arr.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, IntegerSet):
            return np.array_equal(self._arr, other._arr)
        if isinstance(other, (set, frozenset)):
            return set(self.elements) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.elements)

    def __or__(self, other: "IntegerSet") -> "IntegerSet":
        return IntegerSet._trusted(np.union1d(self._arr, IntegerSet(other)._arr))

    def __and__(self, other: "IntegerSet") -> "IntegerSet":
        return IntegerSet._trusted(np.intersect1d(self._arr, IntegerSet(other)._arr))

    def isdisjoint(self, other: "IntegerSet") -> bool:
        return np.intersect1d(self._arr, IntegerSet(other)._arr).size == 0

    def issubset(self, other: "IntegerSet") -> bool:
        return bool(IntegerSet(other).contains_many(self._arr).all())

    def truncate(self, limit: int) -> "IntegerSet":
        """Elements ``<= limit``."""
        k = int(np.searchsorted(self._arr, limit, side="right"))
        return IntegerSet._trusted(self._arr[:k])

    def prefix(self, count: int) -> "IntegerSet":
        """The ``count`` smallest elements."""
        return IntegerSet._trusted(self._arr[:count])

    def with_element(self, x: int) -> "IntegerSet":
        return self | IntegerSet([x])

    def __repr__(self) -> str:
        if len(self) <= 12:
            return f"IntegerSet({list(self.elements)})"
        head = ", ".join(str(v) for v in self.elements[:6])
        return f"IntegerSet([{head}, ...] n={len(self)} max={self.max})"


@dataclass(frozen=True)
class ApWitness:
    start: int
    diff: int
    length: int

    @property
    def terms(self) -> list[int]:
        return [self.start + i * self.diff for i in range(self.length)]

    def holds_in(self, s: IntegerSet) -> bool:
        return self.diff >= 1 and all(t in s for t in self.terms)

    def as_dict(self) -> dict:
        return {"start": self.start, "diff": self.diff, "length": self.length}


def find_ap_witness(s: IntegerSet, p: int) -> Optional[ApWitness]:
    """Return a p-term progression inside ``s``, or None.

    Every (first term, difference) pair realized by two members is tried;
    the remaining p-2 terms are probed through the bitmap.  The witness with
    the smallest start, then smallest difference, is returned.
    """
    p = check_p(p)
    s = IntegerSet(s)
    arr = s.array
    n = arr.size
    if n < p:
        return None
    top = s.max
    for i in range(n - p + 1):
        a = arr[i]
        diffs = arr[i + 1:] - a
        # last term must not overshoot the largest element
        diffs = diffs[diffs <= (top - a) // (p - 1)]
        if diffs.size == 0:
            continue
        ok = np.ones(diffs.size, dtype=bool)
        for k in range(2, p):
            ok &= s.contains_many(a + k * diffs)
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            w = ApWitness(int(a), int(diffs[hits[0]]), p)
            assert w.holds_in(s)
            return w
    return None


def is_ap_free(s: IntegerSet, p: int) -> bool:
    return find_ap_witness(s, p) is None


def _extension_hits(s: IntegerSet, x: int, p: int) -> bool:
    dmax = (x - 1) // (p - 1)
    if dmax < 1 or len(s) < p - 1:
        return False
    ds = np.arange(1, dmax + 1, dtype=np.int64)
    ok = np.ones(ds.size, dtype=bool)
    for k in range(1, p):
        ok &= s.contains_many(x - k * ds)
        if not ok.any():
            return False
    return bool(ok.any())


def extension_creates_ap(s: IntegerSet, x: int, p: int, *, check: bool = True) -> bool:
    """True iff adding ``x`` (larger than every member) closes a p-term progression.

    Since ``x`` would be the maximum, only progressions ending at ``x`` matter:
    each difference d up to (x-1)/(p-1) is tested by probing x-d, ..., x-(p-1)d.
    ``check=False`` skips the O(n^2) AP-freeness precondition check.
    """
    p = check_p(p)
    s = IntegerSet(s)
    x = int(x)
    if x <= s.max:
        raise NotAnExtension(f"{x} is not larger than the set maximum {s.max}")
    if x > MAX_ELEMENT:
        raise ElementOverflow(f"candidate {x} exceeds limit {MAX_ELEMENT}")
    if check:
        w = find_ap_witness(s, p)
        if w is not None:
            raise PreconditionViolated(f"set already contains a {p}-term progression {w.terms}")
    return _extension_hits(s, x, p)
