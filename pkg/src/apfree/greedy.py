"""Greedy progression-free sequences S_p.

a_1 = 1, and each later term is the least integer above the previous one
whose addition keeps the set free of p-term progressions.

Candidates are scanned in increasing order, but instead of re-probing every
difference for each candidate, every accepted term x immediately marks the
values x + d that it would complete (those d with x-d, ..., x-(p-2)d already
present).  A candidate is admissible iff it is unmarked.  Every such mark is
below 2x, so a mark array twice the size of the scan window never misses one.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Optional, Union

import numba
import numpy as np

from .core import IntegerSet, check_p
from .errors import InvalidCount, NotApFree
from .seqio import read_sequence, write_sequence

log = logging.getLogger(__name__)

_DONE, _GROW_WINDOW, _GROW_TERMS, _LIMIT = 0, 1, 2, 3


@numba.njit(cache=True)
def _absorb(p, x, terms, n, member, marks):
    # terms[:n] already contains x as its last entry
    for i in range(n - 1):
        d = x - terms[i]
        ok = True
        for k in range(2, p - 1):
            y = x - k * d
            if y < 1 or member[y] == 0:
                ok = False
                break
        if ok:
            marks[x + d] = 1


@numba.njit(cache=True)
def _advance(p, terms, n, member, marks, cursor, want, window, limit):
    while n < want:
        if n == terms.size:
            return n, cursor, _GROW_TERMS
        x = cursor + 1
        stop = min(window, limit + 1)
        while x < stop and marks[x]:
            x += 1
        if x >= stop:
            if stop == limit + 1:
                return n, cursor, _LIMIT
            return n, cursor, _GROW_WINDOW
        terms[n] = x
        n += 1
        member[x] = 1
        cursor = x
        _absorb(p, x, terms, n, member, marks)
    return n, cursor, _DONE


@numba.njit(cache=True)
def _replay(p, prefix, terms, member, marks):
    # Rebuild state from a stored prefix; returns index of the first term that
    # is not the greedy choice, or -1.
    cursor = 0
    for n in range(prefix.size):
        x = prefix[n]
        if x <= cursor or marks[x]:
            return n
        for y in range(cursor + 1, x):
            if marks[y] == 0:
                return n
        terms[n] = x
        member[x] = 1
        cursor = x
        _absorb(p, x, terms, n + 1, member, marks)
    return -1


def _grow(arr: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size, dtype=arr.dtype)
    out[: arr.size] = arr
    return out


class GreedyGenerator:
    """Stateful generator of S_p.  Owned by one caller at a time.

    ``capacity`` pre-sizes the candidate window when the largest term is
    roughly known; otherwise the window doubles on demand.
    """

    def __init__(self, p: int, capacity: int = 1024):
        self.p = check_p(p)
        window = max(16, int(capacity) + 1)
        self._window = window
        self._member = np.zeros(window, dtype=np.uint8)
        self._marks = np.zeros(2 * window, dtype=np.uint8)
        self._terms = np.zeros(64, dtype=np.int64)
        self._n = 0
        self.cursor = 0

    @classmethod
    def from_prefix(cls, p: int, prefix: IntegerSet) -> "GreedyGenerator":
        """Resume from a stored prefix, re-verifying every term on the way.

        Raises NotApFree if the prefix is not exactly the start of S_p.
        """
        prefix = IntegerSet(prefix)
        gen = cls(p, capacity=max(prefix.max, 1023))
        gen._terms = np.zeros(max(64, len(prefix)), dtype=np.int64)
        bad = _replay(gen.p, prefix.array, gen._terms, gen._member, gen._marks)
        if bad >= 0:
            raise NotApFree(
                f"stored prefix deviates from S_{gen.p} at term {bad + 1} "
                f"(value {prefix[bad]})"
            )
        gen._n = len(prefix)
        gen.cursor = prefix.max
        return gen

    def __len__(self) -> int:
        return self._n

    def _run(self, want: int, limit: int) -> None:
        while True:
            n, cursor, status = _advance(
                self.p, self._terms, self._n, self._member, self._marks,
                self.cursor, want, self._window, limit,
            )
            self._n, self.cursor = int(n), int(cursor)
            if status == _GROW_TERMS:
                self._terms = _grow(self._terms, 2 * self._terms.size)
            elif status == _GROW_WINDOW:
                self._window *= 2
                log.debug("S_%d window grown to %d", self.p, self._window)
                self._member = _grow(self._member, self._window)
                self._marks = _grow(self._marks, 2 * self._window)
            else:
                return

    def next_term(self) -> int:
        self._run(self._n + 1, np.iinfo(np.int64).max - 1)
        return int(self._terms[self._n - 1])

    def extend_count(self, count: int) -> None:
        """Make sure at least ``count`` terms exist."""
        if count > self._n:
            if count > self._terms.size:
                self._terms = _grow(self._terms, count)
            self._run(count, np.iinfo(np.int64).max - 1)

    def extend_to(self, limit: int) -> None:
        """Emit every term ``<= limit``."""
        if limit > self.cursor:
            if limit >= self._window:
                # the next term above the limit need not be found
                self._window = int(limit) + 1
                self._member = _grow(self._member, self._window)
                self._marks = _grow(self._marks, 2 * self._window)
            self._run(np.iinfo(np.int64).max, int(limit))

    def terms(self, count: Optional[int] = None) -> IntegerSet:
        """Immutable snapshot of the first ``count`` terms (all by default)."""
        n = self._n if count is None else min(count, self._n)
        arr = self._terms[:n].copy()
        top = int(arr[-1]) if n else 0
        bitmap = self._member[: top + 1].astype(bool)
        return IntegerSet._trusted(arr, bitmap)


def generate(p: int, n: int) -> IntegerSet:
    """First ``n`` terms of S_p."""
    p = check_p(p)
    if isinstance(n, bool) or int(n) < 1:
        raise InvalidCount(f"count must be >= 1, got {n!r}")
    gen = GreedyGenerator(p)
    gen.extend_count(int(n))
    return gen.terms(int(n))


def generate_up_to(p: int, limit: int) -> IntegerSet:
    """Terms of S_p not exceeding ``limit``."""
    p = check_p(p)
    if int(limit) < 1:
        raise InvalidCount(f"limit must be >= 1, got {limit!r}")
    gen = GreedyGenerator(p, capacity=int(limit))
    gen.extend_to(int(limit))
    return gen.terms()


def default_cache_dir() -> Path:
    return Path(os.environ.get("APFREE_CACHE", ".apfree-cache"))


class GreedyCache:
    """Directory of ``S_<p>.txt`` files holding verified prefixes of S_p."""

    def __init__(self, directory: Union[str, Path, None] = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def path(self, p: int) -> Path:
        return self.directory / f"S_{p}.txt"

    def load(self, p: int) -> Optional[GreedyGenerator]:
        path = self.path(p)
        if not path.exists():
            return None
        prefix, stored_p = read_sequence(path)
        if stored_p is not None and stored_p != p:
            raise NotApFree(f"{path}: declares p={stored_p}, expected {p}")
        return GreedyGenerator.from_prefix(p, prefix)

    def store(self, gen: GreedyGenerator) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path(gen.p)
        write_sequence(path, gen.terms(), p=gen.p, comments=[f"greedy S_{gen.p}, {len(gen)} terms"])
        return path

    def generator(self, p: int) -> GreedyGenerator:
        gen = None
        try:
            gen = self.load(p)
        except (NotApFree, ValueError) as exc:
            log.warning("ignoring corrupt cache %s: %s", self.path(p), exc)
        return gen if gen is not None else GreedyGenerator(p)

    def generate(self, p: int, n: int) -> IntegerSet:
        p = check_p(p)
        if int(n) < 1:
            raise InvalidCount(f"count must be >= 1, got {n!r}")
        gen = self.generator(p)
        if len(gen) < n:
            gen.extend_count(n)
            self.store(gen)
        return gen.terms(n)
