"""Plain-text sequence files.

Format: UTF-8, ``#`` starts a comment line, an optional first data line
``p=<int>``, then one positive integer per line in strictly increasing order.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from .core import MAX_ELEMENT, IntegerSet
from .errors import ElementOverflow, SequenceFormatError


def parse_sequence(text: str, source: str = "<text>") -> Tuple[IntegerSet, Optional[int]]:
    p = None
    values = []
    seen_data = False
    prev = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("p="):
            if seen_data:
                raise SequenceFormatError(f"{source}:{lineno}: 'p=' must precede the terms", lineno)
            try:
                p = int(line[2:])
            except ValueError:
                raise SequenceFormatError(f"{source}:{lineno}: bad metadata {line!r}", lineno) from None
            seen_data = True
            continue
        seen_data = True
        try:
            v = int(line)
        except ValueError:
            raise SequenceFormatError(f"{source}:{lineno}: not an integer: {line!r}", lineno) from None
        if v < 1:
            raise SequenceFormatError(f"{source}:{lineno}: term {v} is not positive", lineno)
        if v > MAX_ELEMENT:
            raise ElementOverflow(f"{source}:{lineno}: term {v} exceeds limit {MAX_ELEMENT}")
        if v <= prev:
            raise SequenceFormatError(
                f"{source}:{lineno}: term {v} does not exceed previous term {prev}", lineno
            )
        values.append(v)
        prev = v
    return IntegerSet._trusted(np.array(values, dtype=np.int64)), p


def read_sequence(path: Union[str, Path]) -> Tuple[IntegerSet, Optional[int]]:
    path = Path(path)
    return parse_sequence(path.read_text(encoding="utf-8"), source=str(path))


def format_sequence(s: IntegerSet, p: Optional[int] = None, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    if p is not None:
        lines.append(f"p={p}")
    lines.extend(str(v) for v in s.array.tolist())
    return "\n".join(lines) + "\n"


def write_sequence(path: Union[str, Path], s: IntegerSet, p: Optional[int] = None,
                   comments: Iterable[str] = ()) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(format_sequence(s, p, comments), encoding="utf-8")
    tmp.replace(path)
