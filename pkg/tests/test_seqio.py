import pytest

from apfree.core import IntegerSet
from apfree.errors import SequenceFormatError
from apfree.seqio import format_sequence, parse_sequence, read_sequence, write_sequence


def test_parse_with_comments_and_metadata():
    s, p = parse_sequence("# greedy\n\np=3\n1\n2\n# mid comment\n4\n")
    assert s == IntegerSet([1, 2, 4]) and p == 3


def test_parse_without_metadata():
    s, p = parse_sequence("3\n7\n")
    assert s.elements == (3, 7) and p is None


@pytest.mark.parametrize(
    "text, lineno",
    [("1\n3\n2\n", 3), ("1\n1\n", 2), ("p=3\n0\n", 2), ("1\nx\n", 2), ("1\np=3\n", 2)],
)
def test_parse_errors_name_the_line(text, lineno):
    with pytest.raises(SequenceFormatError) as exc:
        parse_sequence(text, source="f.txt")
    assert exc.value.lineno == lineno
    assert f"f.txt:{lineno}:" in str(exc.value)


def test_round_trip(tmp_path):
    s = IntegerSet([1, 2, 4, 5, 10])
    path = tmp_path / "S_3.txt"
    write_sequence(path, s, p=3, comments=["five terms"])
    assert read_sequence(path) == (s, 3)
    assert parse_sequence(format_sequence(s)) == (s, None)
