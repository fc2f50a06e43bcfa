"""Feature algebra: a window over voices followed by a chain of basis features.

Two chords are equivalent under a feature when they evaluate to the same
feature value.  Values are either integer vectors (rests kept as ``None``)
or order strings such as ``"4<3<2<1"``.

DSL::

    window[1,2,3,4] |> order
    window[3,4] |> diff |> mod12
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple, Union

from .corpus import Chord, REST_TOKEN
from .errors import FeatureError, FeatureSyntaxError


class Basis(enum.Enum):
    ID = "id"
    MOD12 = "mod12"
    SORT = "sort"
    DIFF = "diff"
    ORDER = "order"

    @property
    def rank(self) -> int:
        return _RANK[self]

    @property
    def terminal(self) -> bool:
        return self is Basis.ORDER

    def __str__(self):
        return self.value


# enumeration order of basis kinds
_RANK = {b: i for i, b in enumerate(Basis)}


@dataclass(frozen=True)
class IntVector:
    items: Tuple[Optional[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("IntVector must be non-empty")

    def __str__(self):
        return "(" + ",".join(REST_TOKEN if v is None else str(v) for v in self.items) + ")"

    def __len__(self):
        return len(self.items)


_LABEL = r"[1-9][0-9]*"
_ORDER_RE = re.compile(rf"^(?:{_LABEL}(?:={_LABEL})*(?:<{_LABEL}(?:={_LABEL})*)*)?(?:!{_LABEL})*$")


@dataclass(frozen=True)
class OrderString:
    text: str

    def __post_init__(self):
        if not is_canonical_order(self.text):
            raise ValueError(f"not a canonical order string: {self.text!r}")

    def __str__(self):
        return self.text


FeatureValue = Union[IntVector, OrderString]


def is_canonical_order(text: str) -> bool:
    if not text or not _ORDER_RE.match(text):
        return False
    sounding, _, rest_part = text.partition("!")
    rests = [int(x) for x in rest_part.split("!")] if rest_part else []
    groups = [[int(x) for x in g.split("=")] for g in sounding.split("<")] if sounding else []
    labels = [x for g in groups for x in g] + rests
    if sorted(labels) != list(range(1, len(labels) + 1)):
        return False
    return all(g == sorted(g) for g in groups) and rests == sorted(rests)


def parse_value(text: str) -> FeatureValue:
    """Inverse of ``str()`` on feature values."""
    if text.startswith("(") and text.endswith(")"):
        items = []
        for tok in text[1:-1].split(","):
            if tok == REST_TOKEN:
                items.append(None)
            elif re.fullmatch(r"-?[0-9]+", tok):
                items.append(int(tok))
            else:
                raise ValueError(f"bad vector entry {tok!r} in {text!r}")
        return IntVector(tuple(items))
    return OrderString(text)


@dataclass(frozen=True)
class Window:
    indices: Tuple[int, ...]

    def __post_init__(self):
        idx = tuple(self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx:
            raise FeatureError("window must select at least one voice")
        if any(isinstance(i, bool) or not isinstance(i, int) or i < 1 for i in idx):
            raise FeatureError(f"window indices must be positive integers: {idx}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise FeatureError(f"window indices must be distinct and ascending: {list(idx)}")

    def __len__(self):
        return len(self.indices)

    def __str__(self):
        return "window[" + ",".join(map(str, self.indices)) + "]"


def _chain_error(window_len, chain) -> Optional[Tuple[int, str]]:
    """Return ``(chain position, message)`` for the first static violation."""
    if not chain:
        return 0, "chain needs at least one basis feature"
    length = window_len
    for i, b in enumerate(chain):
        if i > 0 and chain[i - 1].terminal:
            return i - 1, "terminal basis must be last"
        if b is Basis.DIFF:
            if length < 2:
                return i, "diff requires length ≥ 2"
            length -= 1
    return None


@dataclass(frozen=True)
class FeatureExpr:
    window: Window
    chain: Tuple[Basis, ...]

    def __post_init__(self):
        chain = tuple(Basis(b) for b in self.chain)
        object.__setattr__(self, "chain", chain)
        err = _chain_error(len(self.window), chain)
        if err:
            raise FeatureError(err[1])

    @property
    def output_length(self) -> Optional[int]:
        """Length of the output vector, or None when the value is an order string."""
        if self.chain[-1].terminal:
            return None
        return len(self.window) - sum(b is Basis.DIFF for b in self.chain)

    def check_arity(self, n: int):
        if self.window.indices[-1] > n:
            raise FeatureError(f"{self} selects voice {self.window.indices[-1]} but chords have {n} voices")

    def __call__(self, chord: Chord) -> FeatureValue:
        return evaluate(self, chord)

    def __str__(self):
        return format_feature(self)


def apply_window(chord: Chord, window: Window) -> IntVector:
    if window.indices[-1] > len(chord):
        raise FeatureError(f"{window} is out of range for a {len(chord)}-voice chord")
    return IntVector(tuple(chord[i - 1] for i in window.indices))


def order_string(values: Iterable[Optional[int]]) -> str:
    """Argsort with ties (``=``) and incomparable rests (``!``).

    Labels are 1-based slots. Sounding slots go lowest pitch first; equal
    pitches share a group; resting slots trail, each behind a ``!``.
    """
    sounding = sorted((v, slot) for slot, v in enumerate(values, start=1) if v is not None)
    rests = [slot for slot, v in enumerate(values, start=1) if v is None]
    groups = [
        "=".join(str(slot) for _, slot in grp)
        for _, grp in itertools.groupby(sounding, key=lambda p: p[0])
    ]
    return "<".join(groups) + "".join(f"!{s}" for s in rests)


def apply_basis(value: IntVector, basis: Basis) -> FeatureValue:
    basis = Basis(basis)
    if not isinstance(value, IntVector):
        raise FeatureError(f"{basis} expects an integer vector, got {value}")
    items = value.items
    if basis is Basis.ID:
        return value
    if basis is Basis.MOD12:
        return IntVector(tuple(None if v is None else v % 12 for v in items))
    if basis is Basis.SORT:
        pitches = sorted(v for v in items if v is not None)
        return IntVector(tuple(pitches) + (None,) * (len(items) - len(pitches)))
    if basis is Basis.DIFF:
        if len(items) < 2:
            raise FeatureError("diff requires length ≥ 2")
        return IntVector(tuple(
            None if a is None or b is None else a - b for a, b in zip(items, items[1:])))
    return OrderString(order_string(items))


def evaluate(expr: FeatureExpr, chord: Chord) -> FeatureValue:
    value = apply_window(chord, expr.window)
    for basis in expr.chain:
        value = apply_basis(value, basis)
    return value


# ---------------------------------------------------------------- DSL


_BASIS_NAMES = sorted((b.value for b in Basis), key=len, reverse=True)


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def fail(self, message, pos=None):
        raise FeatureSyntaxError(message, self.text, self.pos if pos is None else pos)

    def spaces(self):
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def literal(self, s):
        if not self.text.startswith(s, self.pos):
            self.fail(f"expected {s!r}")
        self.pos += len(s)

    def index(self):
        m = re.compile(r"[1-9][0-9]*").match(self.text, self.pos)
        if not m:
            self.fail("expected a positive voice index")
        self.pos = m.end()
        return int(m.group()), m.start()

    def basis(self):
        for name in _BASIS_NAMES:
            if self.text.startswith(name, self.pos):
                end = self.pos + len(name)
                if end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
                    continue
                start, self.pos = self.pos, end
                return Basis(name), start
        self.fail("expected a basis feature (order, diff, mod12, sort, id)")


def parse_feature(text: str) -> FeatureExpr:
    """Parse and statically check a feature expression."""
    sc = _Scanner(text)
    sc.literal("window[")
    indices = [sc.index()]
    while sc.text.startswith(",", sc.pos):
        sc.pos += 1
        indices.append(sc.index())
    sc.literal("]")
    for (prev, _), (cur, at) in zip(indices, indices[1:]):
        if cur == prev:
            sc.fail(f"duplicate window index {cur}", at)
        if cur < prev:
            sc.fail("window indices must be ascending", at)

    chain = []
    while True:
        before = sc.pos
        sc.spaces()
        if sc.pos == len(text):
            if sc.pos != before:
                sc.fail("expected '|>'")
            break
        sc.literal("|>")
        sc.spaces()
        chain.append(sc.basis())
    if not chain:
        sc.fail("expected '|>' followed by a basis feature")

    bases = tuple(b for b, _ in chain)
    err = _chain_error(len(indices), bases)
    if err:
        sc.fail(err[1], chain[err[0]][1])
    return FeatureExpr(Window(tuple(i for i, _ in indices)), bases)


def format_feature(expr: FeatureExpr) -> str:
    return " |> ".join([str(expr.window)] + [b.value for b in expr.chain])


# ------------------------------------------------------------ enumeration


def _valid_chains(window_len: int, max_chain: int) -> List[Tuple[Basis, ...]]:
    chains = []
    for length in range(1, max_chain + 1):
        for chain in itertools.product(Basis, repeat=length):
            if length > 1 and Basis.ID in chain:
                continue
            if _chain_error(window_len, chain) is None:
                chains.append(chain)
    chains.sort(key=lambda c: [b.rank for b in c])
    return chains


def enumerate_features(arity: int, max_chain: int) -> List[FeatureExpr]:
    """All statically valid expressions over ``arity`` voices.

    Windows come in shortlex order; chains within a window sort
    lexicographically with id < mod12 < sort < diff < order.  ``id`` appears
    only as a chain of its own.
    """
    if arity < 1 or max_chain < 1:
        raise ValueError("arity and max_chain must be positive")
    out = []
    cache = {}
    for size in range(1, arity + 1):
        chains = cache.setdefault(size, _valid_chains(size, max_chain))
        for idx in itertools.combinations(range(1, arity + 1), size):
            window = Window(idx)
            out.extend(FeatureExpr(window, c) for c in chains)
    return out
