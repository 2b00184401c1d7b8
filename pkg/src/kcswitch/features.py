"""Per-song heuristic lyric features and corpus bigram counts."""

from __future__ import annotations

import csv
import io
import re
from collections import Counter
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path
from typing import Iterable

from kcswitch.corpus import Corpus, Song
from kcswitch.segmenter import Line, Script, tokenize

DEFAULT_FILLERS = frozenset({
    "oh", "yeah", "la", "na", "ah", "uh", "uhh", "ooh", "woah", "whoa",
    "hey", "ya", "eh", "mmm", "mm", "da", "ayy", "aye",
})
DEFAULT_STOPWORDS = frozenset({"the", "a", "an", "and", "or", "of", "to", "in", "on"})
MAX_NGRAM = 5

_EDGE_PUNCT = re.compile(r"^[\W_]+|[\W_]+$")


@dataclass(frozen=True)
class FeatureConfig:
    fillers: frozenset = field(default=DEFAULT_FILLERS)
    stopwords: frozenset = field(default=DEFAULT_STOPWORDS)


DEFAULT_CONFIG = FeatureConfig()


def load_lexicon(path) -> frozenset:
    """One word per line; blank lines and ``#`` comments ignored."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.casefold())
    return frozenset(words)


@dataclass(frozen=True)
class FeatureVector:
    kor_ratio: float = 0.0
    eng_ratio: float = 0.0
    code_switch_count: int = 0
    repetition_count: int = 0
    alliteration_count: int = 0
    filler_word_count: int = 0

    def as_tuple(self) -> tuple:
        return astuple(self)


FEATURE_NAMES = tuple(f.name for f in fields(FeatureVector))


def normalize_word(text: str) -> str:
    """Case-fold and strip leading/trailing punctuation."""
    return _EDGE_PUNCT.sub("", text).casefold()


def _script_ratio(lines: list[Line], script: Script) -> float:
    total = hits = 0
    for line in lines:
        for tok in line.tokens:
            total += 1
            hits += tok.script is script
    return hits / total if total else 0.0


def korean_ratio(lines: list[Line]) -> float:
    return _script_ratio(lines, Script.HANGUL)


def english_ratio(lines: list[Line]) -> float:
    return _script_ratio(lines, Script.LATIN)


def code_switch_count(lines: list[Line]) -> int:
    """Hangul/Latin alternations between neighbouring words of one line.

    Mixed and Other tokens are skipped, so ``나는 2 love`` counts one switch.
    """
    count = 0
    for line in lines:
        prev = None
        for tok in line.tokens:
            if tok.script not in (Script.HANGUL, Script.LATIN):
                continue
            if prev is not None and tok.script is not prev:
                count += 1
            prev = tok.script
    return count


def _repeats(words: list[str], n: int) -> int:
    count = 0
    i = 0
    while i + 2 * n <= len(words):
        if words[i:i + n] == words[i + n:i + 2 * n]:
            count += 1
            i += n
        else:
            i += 1
    return count


def repetition_count(lines: list[Line], max_n: int = MAX_NGRAM) -> int:
    """Immediately repeated n-grams (n = 1..5) within each line.

    After a match the scan jumps past the first copy, so ``la la la`` is two
    unigram repeats rather than three overlapping ones. Tokens that are pure
    punctuation are dropped before scanning.
    """
    total = 0
    for line in lines:
        words = [w for w in (normalize_word(t.text) for t in line.tokens) if w]
        for n in range(1, max_n + 1):
            total += _repeats(words, n)
    return total


def _initial(word: str) -> str:
    for ch in word:
        if ch.isalpha():
            return ch
    return ""


def alliteration_count(lines: list[Line], stopwords: Iterable[str] = DEFAULT_STOPWORDS) -> int:
    # Identical neighbours are repetition, not alliteration: "la la" scores 0.
    stopwords = frozenset(stopwords)
    count = 0
    for line in lines:
        words = [normalize_word(t.text) for t in line.tokens if t.script is Script.LATIN]
        words = [w for w in words if w and w not in stopwords]
        for left, right in zip(words, words[1:]):
            if left != right and _initial(left) and _initial(left) == _initial(right):
                count += 1
    return count


def filler_word_count(lines: list[Line], fillers: Iterable[str] = DEFAULT_FILLERS) -> int:
    fillers = frozenset(fillers)
    return sum(normalize_word(t.text) in fillers for line in lines for t in line.tokens)


def features_from_lines(lines: list[Line], config: FeatureConfig = DEFAULT_CONFIG) -> FeatureVector:
    return FeatureVector(
        kor_ratio=korean_ratio(lines),
        eng_ratio=english_ratio(lines),
        code_switch_count=code_switch_count(lines),
        repetition_count=repetition_count(lines),
        alliteration_count=alliteration_count(lines, config.stopwords),
        filler_word_count=filler_word_count(lines, config.fillers),
    )


def extract_features(song: Song | str, config: FeatureConfig = DEFAULT_CONFIG) -> FeatureVector:
    """Feature vector for a song (or for a cleaned-lyrics string)."""
    text = song if isinstance(song, str) else song.lyrics_clean
    return features_from_lines(tokenize(text), config)


def extract_all(corpus: Corpus, config: FeatureConfig = DEFAULT_CONFIG) -> list[FeatureVector]:
    return [extract_features(song, config) for song in corpus.songs]


def top_bigrams(corpus: Corpus | Iterable[Song], k: int) -> list[tuple[str, int]]:
    """Most frequent adjacent word pairs, surface form kept as written.

    Pairs never span a line break. Ties are ordered by the bigram text.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    songs = corpus.songs if isinstance(corpus, Corpus) else corpus
    counts = Counter()
    for song in songs:
        for line in tokenize(song.lyrics_clean):
            texts = line.texts
            counts.update(f"{a} {b}" for a, b in zip(texts, texts[1:]))
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


FEATURE_TABLE_COLUMNS = ("title", "artist", "chart", "gender", "category") + FEATURE_NAMES


def _fmt(value) -> str:
    return f"{value:.6f}" if isinstance(value, float) else str(value)


def feature_table_csv(corpus: Corpus, vectors: list[FeatureVector]) -> str:
    if len(vectors) != len(corpus.songs):
        raise ValueError("one feature vector per song required")
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FEATURE_TABLE_COLUMNS)
    for song, vec in zip(corpus.songs, vectors):
        writer.writerow([song.title, song.artist, song.chart.value, song.gender.value,
                         song.category.value] + [_fmt(v) for v in vec.as_tuple()])
    return buf.getvalue()
