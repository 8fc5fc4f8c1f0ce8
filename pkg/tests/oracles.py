"""Independent reference implementations used only by the tests.

Pure Python sets and itertools, no numpy, no shared code with the package.
"""

from fractions import Fraction
from itertools import combinations


def brute_has_ap(elements, p):
    """Try every p-subset; exponential, keep inputs small."""
    for combo in combinations(sorted(set(elements)), p):
        d = combo[1] - combo[0]
        if all(combo[i + 1] - combo[i] == d for i in range(p - 1)):
            return True
    return False


def brute_first_witness(elements, p):
    """(start, diff) with smallest start then diff, by scanning all start/diff pairs."""
    s = set(elements)
    top = max(s, default=0)
    for a in sorted(s):
        for d in range(1, top + 1):
            if a + (p - 1) * d > top:
                break
            if all(a + k * d in s for k in range(p)):
                return a, d
    return None


def closes_ap(members, x, p):
    """Does x (above every member) finish a p-term progression with members?"""
    for b in members:
        d = x - b
        if d <= 0:
            continue
        if all(x - k * d in members for k in range(2, p)):
            return True
    return False


def brute_greedy(p, n=None, limit=None):
    terms, members = [], set()
    x = 0
    while True:
        x += 1
        if limit is not None and x > limit:
            return terms
        if closes_ap(members, x, p):
            continue
        terms.append(x)
        members.add(x)
        if n is not None and len(terms) == n:
            return terms


def base3_term(n):
    """n-th term of S_3: binary digits of n-1 read in base 3, plus one."""
    return 1 + int(bin(n - 1)[2:], 3)


def brute_max_mu(N, p):
    """Heaviest AP-free subset of [1, N] by enumerating all subsets with Fractions."""
    best, best_set = Fraction(-1), None
    for mask in range(1 << N):
        elems = [k + 1 for k in range(N) if mask >> k & 1]
        if brute_has_ap(elems, p):
            continue
        val = sum((Fraction(1, e) for e in elems), Fraction(0))
        if val > best or (val == best and elems < best_set):
            best, best_set = val, elems
    return best_set, best


def harmonic(n):
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))
