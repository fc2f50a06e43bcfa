"""Multi-voice chord-slice corpora.

A chord is a plain tuple with one entry per voice: a MIDI pitch (0-127) or
``None`` for a rest.  Voice 1 is the leftmost token on a corpus line (the top
voice, e.g. soprano in four-part writing).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

from .errors import CorpusFormatError

REST = None
REST_TOKEN = "R"

Chord = Tuple[Optional[int], ...]

_SPLIT = re.compile(r"[ \t]+")
_PIECE = "#piece "


def _check_chord(chord) -> Chord:
    chord = tuple(chord)
    if not chord:
        raise ValueError("a chord needs at least one voice")
    for ev in chord:
        if ev is None:
            continue
        if isinstance(ev, bool) or not isinstance(ev, int) or not 0 <= ev <= 127:
            raise ValueError(f"not a MIDI pitch or rest: {ev!r}")
    return chord


@dataclass(frozen=True)
class Piece:
    name: str
    chords: Tuple[Chord, ...]

    def __post_init__(self):
        chords = tuple(_check_chord(c) for c in self.chords)
        if not chords:
            raise ValueError(f"piece {self.name!r} has no chords")
        if len({len(c) for c in chords}) != 1:
            raise ValueError(f"piece {self.name!r} mixes chord arities")
        if self.name.splitlines() not in ([], [self.name]):
            raise ValueError("piece names cannot contain line breaks")
        object.__setattr__(self, "chords", chords)

    @property
    def arity(self) -> int:
        return len(self.chords[0])

    def __len__(self):
        return len(self.chords)


@dataclass(frozen=True)
class Corpus:
    pieces: Tuple[Piece, ...] = ()

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if len({p.arity for p in pieces}) > 1:
            raise ValueError("all pieces of a corpus must share one arity")
        object.__setattr__(self, "pieces", pieces)

    @property
    def arity(self) -> int:
        """Common number of voices (0 for an empty corpus)."""
        return self.pieces[0].arity if self.pieces else 0

    @property
    def n_chords(self) -> int:
        return sum(len(p) for p in self.pieces)

    def chords(self) -> Iterator[Chord]:
        for piece in self.pieces:
            yield from piece.chords


def _parse_token(tok: str, lineno: int):
    if tok == REST_TOKEN:
        return REST
    if tok.isascii() and tok.isdigit():
        value = int(tok)
        if value <= 127:
            return value
    raise CorpusFormatError("malformed token", lineno, f"{tok!r} is neither a MIDI number 0-127 nor {REST_TOKEN!r}")


def parse_corpus(text: str) -> Corpus:
    """Parse corpus file contents.

    Errors are reported as :class:`CorpusFormatError` with the offending
    line number.
    """
    pieces = []
    name = None
    header_line = 0
    chords: list = []
    arity = None          # arity of the corpus, fixed by the first piece
    first_chord_line = 0

    def close():
        nonlocal arity
        if name is None:
            return
        if not chords:
            raise CorpusFormatError("empty piece", header_line, f"piece {name!r} has no chords")
        if arity is None:
            arity = len(chords[0])
        elif len(chords[0]) != arity:
            raise CorpusFormatError(
                "arity mismatch", first_chord_line,
                f"piece {name!r} has {len(chords[0])} voices, corpus has {arity}")
        pieces.append(Piece(name, tuple(chords)))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith(_PIECE):
            close()
            name, header_line, chords = raw[len(_PIECE):], lineno, []
            continue
        if raw.startswith("#"):
            continue
        line = raw.strip(" \t")
        if not line:
            continue
        if name is None:
            raise CorpusFormatError("chord before any #piece header", lineno)
        chord = tuple(_parse_token(t, lineno) for t in _SPLIT.split(line))
        if chords and len(chord) != len(chords[0]):
            raise CorpusFormatError(
                "arity mismatch", lineno, f"expected {len(chords[0])} voices, got {len(chord)}")
        if not chords:
            first_chord_line = lineno
        chords.append(chord)
    close()
    return Corpus(tuple(pieces))


def format_chord(chord: Chord) -> str:
    return " ".join(REST_TOKEN if ev is None else str(ev) for ev in chord)


def format_corpus(corpus: Corpus) -> str:
    lines = []
    for piece in corpus.pieces:
        lines.append(_PIECE + piece.name)
        lines.extend(format_chord(c) for c in piece.chords)
    return "".join(line + "\n" for line in lines)


def read_corpus(path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh.read())


def kgram_windows(corpus: Corpus, k: int) -> Iterator[Tuple[Tuple[Chord, ...], Chord]]:
    """Yield ``(context, target)`` pairs, where context holds the k-1 chords
    before target, oldest first.  Windows never cross piece boundaries."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    for piece in corpus.pieces:
        yield from piece_windows(piece.chords, k)


def piece_windows(chords: Sequence[Chord], k: int):
    for t in range(k - 1, len(chords)):
        yield tuple(chords[t - k + 1:t]), chords[t]


def count_windows(corpus: Corpus, k: int) -> int:
    return sum(max(0, len(p) - k + 1) for p in corpus.pieces)
