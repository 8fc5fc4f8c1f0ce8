import pytest

from apfree.core import IntegerSet, extension_creates_ap, find_ap_witness
from apfree.errors import InvalidCount, InvalidP, NotApFree
from apfree.greedy import GreedyCache, GreedyGenerator, generate, generate_up_to
from apfree.seqio import write_sequence

from oracles import base3_term, brute_greedy


def test_next_term_after_one_two():
    g = GreedyGenerator.from_prefix(3, IntegerSet([1, 2]))
    assert g.next_term() == 4


@pytest.mark.parametrize(
    "p, expected",
    [(3, [1, 2, 4, 5, 10, 11, 13, 14]), (4, [1, 2, 3, 5, 6, 8, 9, 10])],
)
def test_first_eight_calls(p, expected):
    assert brute_greedy(p, 8) == expected
    g = GreedyGenerator(p)
    assert [g.next_term() for _ in range(8)] == expected
    assert g.cursor == expected[-1]


@pytest.mark.parametrize(
    "p, n, expected",
    [(3, 4, [1, 2, 4, 5]), (3, 1, [1]), (5, 5, [1, 2, 3, 4, 6])],
)
def test_generate_examples(p, n, expected):
    assert brute_greedy(p, n) == expected
    assert generate(p, n).elements == tuple(expected)


@pytest.mark.parametrize(
    "p, limit, expected",
    [(3, 14, [1, 2, 4, 5, 10, 11, 13, 14]), (3, 1, [1]), (4, 10, [1, 2, 3, 5, 6, 8, 9, 10])],
)
def test_generate_up_to_examples(p, limit, expected):
    assert brute_greedy(p, limit=limit) == expected
    assert generate_up_to(p, limit).elements == tuple(expected)


def test_errors():
    with pytest.raises(InvalidP):
        generate(2, 5)
    with pytest.raises(InvalidCount):
        generate(3, 0)
    with pytest.raises(InvalidP):
        generate_up_to(1, 5)


@pytest.mark.parametrize("p", [3, 4, 5, 6])
def test_matches_brute_force_oracle(p):
    assert generate(p, 150).elements == tuple(brute_greedy(p, 150))
    assert generate_up_to(p, 500).elements == tuple(brute_greedy(p, limit=500))


def test_base3_characterization_p3():
    assert list(generate(3, 300)) == [base3_term(n) for n in range(1, 301)]


@pytest.mark.parametrize("p", [3, 4, 5])
def test_prefixes_ap_free_and_minimal(p):
    s = generate(p, 60)
    for n in range(1, len(s) + 1):
        prefix = s.prefix(n)
        assert find_ap_witness(prefix, p) is None
        if n < len(s):
            for x in range(prefix.max + 1, s[n]):
                assert extension_creates_ap(prefix, x, p, check=False)


def test_snapshots_are_independent_of_later_growth():
    g = GreedyGenerator(3)
    g.extend_count(5)
    snap = g.terms()
    g.extend_count(40)
    assert snap.elements == (1, 2, 4, 5, 10)
    assert 28 not in snap and 28 in g.terms()


def test_window_growth_is_transparent():
    g = GreedyGenerator(4, capacity=1)
    g.extend_count(400)
    assert g.terms() == generate(4, 400)


def test_resume_from_prefix_is_deterministic():
    full = generate(4, 200)
    g = GreedyGenerator.from_prefix(4, full.prefix(77))
    g.extend_count(200)
    assert g.terms() == full


def test_resume_rejects_non_greedy_prefix():
    with pytest.raises(NotApFree):
        GreedyGenerator.from_prefix(3, IntegerSet([1, 2, 3]))
    # AP-free but skips the admissible 4
    with pytest.raises(NotApFree):
        GreedyGenerator.from_prefix(3, IntegerSet([1, 2, 5]))


def test_cache_round_trip(tmp_path):
    cache = GreedyCache(tmp_path)
    first = cache.generate(3, 50)
    assert (tmp_path / "S_3.txt").exists()
    again = GreedyCache(tmp_path).generate(3, 30)
    assert again == first.prefix(30)
    assert GreedyCache(tmp_path).generate(3, 80) == generate(3, 80)


def test_corrupt_cache_is_regenerated(tmp_path):
    write_sequence(tmp_path / "S_3.txt", IntegerSet([1, 2, 3, 9]), p=3)
    assert GreedyCache(tmp_path).generate(3, 10) == generate(3, 10)


def test_cache_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("APFREE_CACHE", str(tmp_path / "env"))
    assert GreedyCache().path(5) == tmp_path / "env" / "S_5.txt"
