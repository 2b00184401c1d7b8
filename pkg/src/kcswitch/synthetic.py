"""Seeded synthetic lyric corpora for demos and tests.

Songs are stitched from small Korean and English vocabularies, so every
feature is controlled by the generator's parameters rather than by real
lyrics.
"""

from __future__ import annotations

import numpy as np

from kcswitch.corpus import Category, Chart, Corpus, Gender, Song, clean_lyrics

KOREAN_WORDS = ("사랑해", "나는", "너를", "우리", "오늘", "밤", "눈물", "마음", "다시", "함께",
                "아파트", "꿈을", "하늘", "별이", "기억해")
ENGLISH_WORDS = ("love", "baby", "night", "dance", "dream", "heart", "shine", "forever",
                 "fire", "tonight", "crazy", "feel", "money", "ground", "bring", "boys",
                 "back", "yeah", "oh", "la")


def make_song(title: str, lyrics: str, gender: Gender = Gender.F,
              category: Category = Category.GROUP, chart: Chart = Chart.HOT100,
              artist: str = "Synthetic", peak_pos: int = 1, weeks: int = 1) -> Song:
    return Song(title=title, artist=artist, peak_pos=peak_pos, weeks_on_chart=weeks,
                trajectory=(peak_pos,) * weeks, gender=gender, category=category, chart=chart,
                lyrics_raw=lyrics, lyrics_clean=clean_lyrics(lyrics))


def random_lyrics(rng: np.random.Generator, eng_share: float, n_lines: int = 8,
                  words_per_line: int = 6) -> str:
    lines = []
    for _ in range(n_lines):
        words = []
        for _ in range(words_per_line):
            pool = ENGLISH_WORDS if rng.random() < eng_share else KOREAN_WORDS
            words.append(pool[rng.integers(len(pool))])
        lines.append(" ".join(words))
    return "\n".join(lines)


def separable_corpus(n: int = 100, seed: int = 0, chart: Chart = Chart.HOT100,
                     threshold: float = 0.5, margin: float = 0.2) -> Corpus:
    """Balanced corpus whose gender label is ``eng_ratio > threshold``.

    English shares are drawn at least ``margin`` away from the threshold and
    the realised ratio is checked, so the label is a deterministic function
    of one feature.
    """
    rng = np.random.default_rng(seed)
    songs = []
    for i in range(n):
        gender = Gender.F if i % 2 else Gender.M
        while True:
            share = (rng.uniform(threshold + margin, 1.0) if gender is Gender.F
                     else rng.uniform(0.0, threshold - margin))
            lyrics = random_lyrics(rng, share)
            words = lyrics.split()
            eng = sum(w in ENGLISH_WORDS for w in words) / len(words)
            if (eng > threshold) == (gender is Gender.F):
                break
        category = Category.GROUP if i % 3 else Category.SOLO
        songs.append(make_song(f"song {i:03d}", lyrics, gender, category, chart,
                               artist=f"artist {i % 7}", peak_pos=1 + i % 100,
                               weeks=1 + i % 5))
    return Corpus(tuple(songs), label=f"synthetic-{seed}")

