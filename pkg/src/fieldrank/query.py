"""Boolean query parsing.

Grammar: whitespace-separated items. ``+item`` is MUST, ``-item`` is
NOT, anything else is SHOULD. A ``name:`` prefix on an item is dropped;
the fields searched are fixed by the caller. Each item is run through
the analyzer and every resulting token becomes its own clause carrying
the item's operator. Items that analyze to nothing disappear.

Clauses carry no weight. Repeated terms are kept, so ``cat cat`` scores
``cat`` twice.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from fieldrank.analysis import analyze


class Occur(enum.Enum):
    MUST = "+"
    SHOULD = ""
    NOT = "-"


class Clause(NamedTuple):
    term: str
    occur: Occur


@dataclass(frozen=True)
class BooleanQuery:
    clauses: tuple[Clause, ...]
    target_fields: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.target_fields:
            raise ValueError("a query needs at least one target field")
        if len(set(self.target_fields)) != len(self.target_fields):
            raise ValueError(f"duplicate target fields in {list(self.target_fields)}")

    def terms(self, occur: Occur) -> list[str]:
        return [c.term for c in self.clauses if c.occur is occur]

    def __str__(self) -> str:
        return " ".join(c.occur.value + c.term for c in self.clauses)


def parse(
    raw: str,
    target_fields: Sequence[str] | str,
    analyzer: Callable[[str], list[str]] = analyze,
) -> BooleanQuery:
    """Parse ``raw`` into a :class:`BooleanQuery` over ``target_fields``.

    Never raises on the query text itself.

    >>> str(parse("+cat dog -fish", ["body"]))
    '+cat dog -fish'
    >>> str(parse("title:U.S.A.", ["body"]))
    'u s a'
    """
    if isinstance(target_fields, str):
        target_fields = [target_fields]
    clauses = []
    for item in raw.split():
        occur = Occur.SHOULD
        if item[0] == "+":
            occur, item = Occur.MUST, item[1:]
        elif item[0] == "-":
            occur, item = Occur.NOT, item[1:]
        _, colon, rest = item.partition(":")
        if colon:
            item = rest
        clauses.extend(Clause(term, occur) for term in analyzer(item))
    return BooleanQuery(tuple(clauses), tuple(target_fields))
