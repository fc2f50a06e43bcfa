"""Seeded synthetic corpora for tests and demos."""

from __future__ import annotations

import random

from .corpus import Corpus, Piece


def synth_corpus(voices: int, length: int, pieces: int = 1, seed: int = 0,
                 crossing_rate: float = 0.0) -> Corpus:
    """Chords strictly descending from voice 1 down to voice n.

    With probability ``crossing_rate`` a chord gets one random pair of
    adjacent voices swapped, which produces a voice crossing.
    """
    if voices < 1 or voices > 128 or length < 1 or pieces < 1:
        raise ValueError("need 1 <= voices <= 128, length >= 1, pieces >= 1")
    if not 0.0 <= crossing_rate <= 1.0:
        raise ValueError("crossing_rate must lie in [0, 1]")
    rng = random.Random(seed)
    pool = range(36, 85) if voices <= 49 else range(128)
    out = []
    for p in range(pieces):
        chords = []
        for _ in range(length):
            chord = sorted(rng.sample(pool, voices), reverse=True)
            if voices > 1 and rng.random() < crossing_rate:
                i = rng.randrange(voices - 1)
                chord[i], chord[i + 1] = chord[i + 1], chord[i]
            chords.append(tuple(chord))
        out.append(Piece(f"synth-{p + 1:03d}", tuple(chords)))
    return Corpus(tuple(out))
