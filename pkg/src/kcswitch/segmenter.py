"""Whitespace tokenisation and per-token script classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from kcswitch.kernels import script_code


class Script(str, enum.Enum):
    HANGUL = "Hangul"
    LATIN = "Latin"
    MIXED = "Mixed"
    OTHER = "Other"


# indexed by (has_hangul | has_latin << 1)
_BY_CODE = (Script.OTHER, Script.HANGUL, Script.LATIN, Script.MIXED)


@dataclass(frozen=True)
class Token:
    text: str
    script: Script


@dataclass(frozen=True)
class Line:
    tokens: tuple[Token, ...]

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    @property
    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]


def classify_script(token_text: str) -> Script:
    """Class of a token by which scripts it contains.

    Hangul covers the syllable block U+AC00-U+D7A3 and the jamo blocks
    U+1100-U+11FF and U+3130-U+318F. Latin covers ASCII letters and the
    Latin-1 Supplement / Extended-A / Extended-B / Extended Additional letters.
    Digits, punctuation, emoji and other scripts set neither bit.
    """
    return _BY_CODE[script_code(token_text)]


def tokenize(text: str) -> list[Line]:
    lines = []
    for raw in text.splitlines():
        words = raw.split()
        if words:
            lines.append(Line(tuple(Token(w, classify_script(w)) for w in words)))
    return lines


def detokenize(lines: list[Line]) -> str:
    return "\n".join(" ".join(line.texts) for line in lines)
