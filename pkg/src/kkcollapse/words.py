"""Freely reduced words in a finite alphabet of labelled generators."""
from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN = re.compile(r"([A-Za-z_]\w*?)(\^-1)?")


def free_reduce(letters) -> tuple[tuple[str, int], ...]:
    out: list[tuple[str, int]] = []
    for label, e in letters:
        if e not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {e!r}")
        if out and out[-1] == (label, -e):
            out.pop()
        else:
            out.append((label, e))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """Element of a free group, kept freely reduced.

    >>> Word.parse("a1 b1 b1^-1 a2")
    Word('a1 a2')
    """

    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", free_reduce(self.letters))

    @classmethod
    def parse(cls, text: str) -> Word:
        letters = []
        for tok in text.split():
            m = _TOKEN.fullmatch(tok)
            if not m:
                raise ValueError(f"bad generator token {tok!r}")
            letters.append((m.group(1), -1 if m.group(2) else 1))
        return cls(tuple(letters))

    @classmethod
    def gen(cls, label: str, exponent: int = 1) -> Word:
        return cls(((label, exponent),))

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(tuple((label, -e) for label, e in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return " ".join(label if e == 1 else f"{label}^-1" for label, e in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def substitute(self, table: dict[str, Word]) -> Word:
        out = Word()
        for label, e in self.letters:
            w = table[label]
            out = out * (w if e == 1 else w.inverse())
        return out


def commutator(a: Word, b: Word) -> Word:
    """``[a, b] = a b a^-1 b^-1``."""
    return a * b * a.inverse() * b.inverse()


def surface_relator(genus: int) -> Word:
    """``prod_i [a_i, b_i]`` in the labels ``a1, b1, ..., ag, bg``."""
    w = Word()
    for i in range(1, genus + 1):
        w = w * commutator(Word.gen(f"a{i}"), Word.gen(f"b{i}"))
    return w


def surface_labels(genus: int) -> list[str]:
    return [f"{c}{i}" for i in range(1, genus + 1) for c in "ab"]
