"""Loading, cleaning and filtering chart-annotated lyric tables."""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable


class Chart(str, enum.Enum):
    HOT100 = "Hot100"
    GLOBAL200 = "Global200"

    @classmethod
    def parse(cls, value: str) -> "Chart":
        key = re.sub(r"[\s_-]", "", str(value)).lower()
        for chart in cls:
            if chart.value.lower() == key:
                return chart
        raise ValueError(f"unknown chart {value!r}")


class Gender(str, enum.Enum):
    M = "M"
    F = "F"

    @classmethod
    def parse(cls, value: str) -> "Gender":
        key = str(value).strip().upper()
        aliases = {"M": cls.M, "MALE": cls.M, "F": cls.F, "FEMALE": cls.F}
        if key not in aliases:
            raise ValueError(f"unknown gender {value!r}")
        return aliases[key]


class Category(str, enum.Enum):
    GROUP = "Group"
    SOLO = "Solo"

    @classmethod
    def parse(cls, value: str) -> "Category":
        key = str(value).strip().upper()
        aliases = {"G": cls.GROUP, "GROUP": cls.GROUP, "S": cls.SOLO, "SOLO": cls.SOLO}
        if key not in aliases:
            raise ValueError(f"unknown category {value!r}")
        return aliases[key]


class CorpusError(Exception):
    """Base class for dataset loading failures."""


class SchemaError(CorpusError):
    def __init__(self, column: str):
        super().__init__(f"missing required column: {column!r}")
        self.column = column


class RowError(CorpusError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DuplicateError(CorpusError):
    def __init__(self, row: int, title: str, artist: str):
        super().__init__(f"row {row}: duplicate song {title!r} by {artist!r}")
        self.row = row
        self.key = (title, artist)


@dataclass(frozen=True)
class Song:
    title: str
    artist: str
    peak_pos: int
    weeks_on_chart: int
    trajectory: tuple[int, ...]
    gender: Gender
    category: Category
    chart: Chart
    lyrics_raw: str
    lyrics_clean: str

    @property
    def key(self) -> tuple[str, str]:
        return (self.title, self.artist)


@dataclass(frozen=True)
class Corpus:
    songs: tuple[Song, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "songs", tuple(self.songs))
        seen = set()
        for song in self.songs:
            ident = (song.title, song.artist, song.chart)
            if ident in seen:
                raise DuplicateError(-1, song.title, song.artist)
            seen.add(ident)

    def __len__(self) -> int:
        return len(self.songs)

    def __iter__(self):
        return iter(self.songs)


REQUIRED_COLUMNS = (
    "Title",
    "Artist",
    "Peak Position",
    "Weeks on Chart",
    "Chart Trajectory",
    "Artist Gender",
    "Artist Category",
    "Lyrics",
)
OPTIONAL_COLUMNS = ("Cleaned Lyrics",)
TRAJECTORY_SEP = ";"

_BRACKETED = re.compile(r"\[[^\]\n]*\]")
_HSPACE = re.compile(r"[^\S\n]+")
_QUOTES = str.maketrans({"‘": "'", "’": "'", "‚": "'", "‛": "'",
                         "“": '"', "”": '"', "„": '"', "‟": '"'})


def clean_lyrics(raw: str) -> str:
    """Strip ``[...]`` annotations and normalise spacing and quotes.

    A segment runs from ``[`` to the next ``]`` on the same line; an
    unmatched ``[`` and everything after it is left alone. Horizontal
    whitespace runs become a single space, lines are stripped, runs of blank
    lines collapse to one and blank lines at either end of the text are
    dropped.
    """
    text = raw.replace("\r\n", "\n").replace("\r", "\n").translate(_QUOTES)
    lines = []
    for line in text.split("\n"):
        line = _BRACKETED.sub("", line)
        lines.append(_HSPACE.sub(" ", line).strip())
    out = []
    for line in lines:
        if not line and (not out or not out[-1]):
            continue
        out.append(line)
    while out and not out[-1]:
        out.pop()
    return "\n".join(out)


def _parse_int(text: str, row: int, column: str, minimum: int) -> int:
    try:
        value = int(text.strip())
    except ValueError:
        raise RowError(row, f"{column}: not an integer: {text!r}") from None
    if value < minimum:
        raise RowError(row, f"{column}: {value} is below {minimum}")
    return value


def parse_trajectory(text: str, row: int = -1) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(_parse_int(part, row, "Chart Trajectory", 1)
                 for part in text.split(TRAJECTORY_SEP))


def _read_text(path: Path) -> str:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusError(f"{path}: invalid UTF-8 at byte {exc.start}") from exc
    return text[1:] if text.startswith("﻿") else text


def load_corpus(path, chart: Chart | str, reclean: bool = False) -> Corpus:
    """Read one chart's CSV table into a :class:`Corpus`.

    Header names are matched case-insensitively after trimming. Row numbers in
    errors count data rows from 1.
    """
    path = Path(path)
    chart = Chart.parse(chart) if not isinstance(chart, Chart) else chart
    reader = csv.reader(io.StringIO(_read_text(path), newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(REQUIRED_COLUMNS[0]) from None
    index = {name.strip().lower(): i for i, name in enumerate(header)}
    for column in REQUIRED_COLUMNS:
        if column.lower() not in index:
            raise SchemaError(column)
    clean_col = index.get("cleaned lyrics")

    songs = []
    seen = set()
    for row_no, row in enumerate(reader, start=1):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            row = row + [""] * (len(header) - len(row))

        def cell(name):
            return row[index[name.lower()]]

        title, artist = cell("Title").strip(), cell("Artist").strip()
        try:
            gender = Gender.parse(cell("Artist Gender"))
            category = Category.parse(cell("Artist Category"))
        except ValueError as exc:
            raise RowError(row_no, str(exc)) from None
        if (title, artist) in seen:
            raise DuplicateError(row_no, title, artist)
        seen.add((title, artist))
        raw = cell("Lyrics")
        if clean_col is None or reclean:
            cleaned = clean_lyrics(raw)
        else:
            cleaned = row[clean_col]
        songs.append(Song(
            title=title,
            artist=artist,
            peak_pos=_parse_int(cell("Peak Position"), row_no, "Peak Position", 1),
            weeks_on_chart=_parse_int(cell("Weeks on Chart"), row_no, "Weeks on Chart", 0),
            trajectory=parse_trajectory(cell("Chart Trajectory"), row_no),
            gender=gender,
            category=category,
            chart=chart,
            lyrics_raw=raw,
            lyrics_clean=cleaned,
        ))
    return Corpus(tuple(songs), label=path.name)


def corpus_to_csv(corpus: Corpus) -> str:
    """Serialise to the same table layout :func:`load_corpus` reads."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS + OPTIONAL_COLUMNS)
    for s in corpus.songs:
        writer.writerow([
            s.title, s.artist, s.peak_pos, s.weeks_on_chart,
            TRAJECTORY_SEP.join(str(r) for r in s.trajectory),
            s.gender.value, s.category.value, s.lyrics_raw, s.lyrics_clean,
        ])
    return buf.getvalue()


def save_corpus(corpus: Corpus, path) -> None:
    Path(path).write_text(corpus_to_csv(corpus), encoding="utf-8", newline="")


def filter_corpus(corpus: Corpus, gender: Gender | None = None,
                  category: Category | None = None) -> Corpus:
    songs = tuple(s for s in corpus.songs
                  if (gender is None or s.gender == gender)
                  and (category is None or s.category == category))
    return replace(corpus, songs=songs)


def merge_corpora(corpora: Iterable[Corpus], label: str = "") -> Corpus:
    corpora = list(corpora)
    songs = tuple(s for c in corpora for s in c.songs)
    return Corpus(songs, label=label or "+".join(c.label for c in corpora))
