"""n-gram histogram rules over feature values.

Counts are the stored representation.  Probabilities are derived on demand,
either as floats or as exact fractions.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, Mapping, Optional, Tuple

from .corpus import Corpus, piece_windows
from .errors import FeatureError, NoObservationsError, RuleFormatError
from .features import FeatureExpr, FeatureValue, format_feature, parse_feature, parse_value

DEFAULT_PEAK_THRESHOLD = 0.5


def value_key(value) -> str:
    """Serialized form used for deterministic ordering."""
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


class Histogram(Mapping):
    """Immutable value -> count table with exact integer counts."""

    __slots__ = ("_counts", "_total")

    def __init__(self, counts: Mapping[Hashable, int] | Iterable[Hashable] = ()):
        if isinstance(counts, Mapping):
            c = {}
            for v, n in counts.items():
                if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                    raise ValueError(f"count for {v} must be a non-negative integer")
                if n:
                    c[v] = n
        else:
            c = dict(Counter(counts))
        self._counts = c
        self._total = sum(c.values())

    def __getitem__(self, value):
        return self._counts[value]

    def __iter__(self):
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def __eq__(self, other):
        if isinstance(other, Histogram):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._counts.items()))

    def __repr__(self):
        inner = ", ".join(f"{value_key(v)}: {n}" for v, n in self.ranked())
        return f"Histogram({{{inner}}})"

    def __add__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        merged = Counter(self._counts)
        merged.update(other._counts)
        return Histogram(dict(merged))

    @property
    def total(self) -> int:
        return self._total

    def fraction(self, value) -> Fraction:
        return Fraction(self._counts.get(value, 0), self._total)

    def probability(self, value) -> float:
        return self._counts.get(value, 0) / self._total

    def probabilities(self) -> Dict[Hashable, float]:
        return {v: n / self._total for v, n in self._counts.items()}

    def ranked(self):
        """(value, count) pairs by descending count, then serialized value."""
        return sorted(self._counts.items(), key=lambda item: (-item[1], value_key(item[0])))


@dataclass(frozen=True)
class RuleSpec:
    target: FeatureExpr
    k: int = 1
    context: Optional[FeatureExpr] = None

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
            raise ValueError("gram order k must be a positive integer")
        if self.k == 1 and self.context is not None:
            raise ValueError("a 1-gram rule takes no context feature")
        if self.k >= 2 and self.context is None:
            raise ValueError("context required for k ≥ 2")

    @classmethod
    def conditional(cls, target: FeatureExpr, k: int = 2, context: Optional[FeatureExpr] = None):
        """k-gram spec whose context feature defaults to the target feature."""
        return cls(target, k, context if context is not None else target)

    def check_arity(self, n: int):
        self.target.check_arity(n)
        if self.context is not None:
            self.context.check_arity(n)


@dataclass(frozen=True)
class Rule:
    spec: RuleSpec
    tables: Mapping[Tuple[FeatureValue, ...], Histogram] = field(hash=False)

    def __post_init__(self):
        tables = dict(self.tables)
        if not tables:
            raise ValueError("a rule needs at least one histogram")
        for key, hist in tables.items():
            if len(key) != self.spec.k - 1:
                raise ValueError(f"context {key} has the wrong length for k={self.spec.k}")
            if hist.total < 1:
                raise ValueError(f"empty histogram for context {key}")
        object.__setattr__(self, "tables", tables)

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def histogram(self) -> Histogram:
        """The single table of a 1-gram rule."""
        if self.k != 1:
            raise ValueError("conditional rule has one histogram per context; use .tables")
        return self.tables[()]

    def contexts(self):
        return sorted(self.tables, key=value_key)

    @property
    def n_observations(self) -> int:
        return sum(h.total for h in self.tables.values())

    def __add__(self, other):
        if not isinstance(other, Rule):
            return NotImplemented
        if other.spec != self.spec:
            raise ValueError("cannot merge rules with different specs")
        merged = dict(self.tables)
        for key, hist in other.tables.items():
            merged[key] = merged[key] + hist if key in merged else hist
        return Rule(self.spec, merged)


def _count_piece(chords, spec: RuleSpec) -> Dict[tuple, Counter]:
    counts: Dict[tuple, Counter] = {}
    target, context = spec.target, spec.context
    for ctx, chord in piece_windows(chords, spec.k):
        key = tuple(context(c) for c in ctx) if context is not None else ()
        counts.setdefault(key, Counter())[target(chord)] += 1
    return counts


def extract(corpus: Corpus, spec: RuleSpec, workers: Optional[int] = None) -> Rule:
    """Count target feature values over every k-window of ``corpus``.

    With ``workers`` > 1 pieces are counted on a thread pool; the merge is a
    plain count addition so the result does not depend on scheduling.
    """
    if corpus.pieces:
        spec.check_arity(corpus.arity)
    chord_lists = [p.chords for p in corpus.pieces]
    if workers and workers > 1 and len(chord_lists) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda cs: _count_piece(cs, spec), chord_lists))
    else:
        partials = [_count_piece(cs, spec) for cs in chord_lists]

    merged: Dict[tuple, Counter] = {}
    for part in partials:
        for key, counter in part.items():
            merged.setdefault(key, Counter()).update(counter)
    if not merged:
        raise NoObservationsError(f"no observations: corpus has no {spec.k}-windows")
    return Rule(spec, {key: Histogram(dict(c)) for key, c in merged.items()})


def dominating_peak(hist: Histogram, threshold: float = DEFAULT_PEAK_THRESHOLD):
    """``(value, probability)`` of a unique argmax holding at least
    ``threshold`` of the mass, else None."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    ranked = hist.ranked()
    if not ranked:
        return None
    top, count = ranked[0]
    if len(ranked) > 1 and ranked[1][1] == count:
        return None
    if Fraction(count, hist.total) < Fraction(threshold):
        return None
    return top, count / hist.total


def context_marginal(rule: Rule) -> Histogram:
    if rule.k < 2:
        raise ValueError("context marginal is only defined for k ≥ 2")
    return Histogram({key: h.total for key, h in rule.tables.items()})


# ------------------------------------------------------------ rule files


def serialize_rule(rule: Rule) -> str:
    spec = rule.spec
    lines = [f"feature: {format_feature(spec.target)}", f"gram: {spec.k}"]
    if spec.k == 1:
        lines += [f"{value_key(v)}\t{n}" for v, n in rule.histogram.ranked()]
    else:
        lines.append(f"context-feature: {format_feature(spec.context)}")
        for i, key in enumerate(rule.contexts()):
            if i:
                lines.append("")
            lines.append(f"context: {value_key(key)}")
            lines += [f"{value_key(v)}\t{n}" for v, n in rule.tables[key].ranked()]
    return "".join(line + "\n" for line in lines)


def _split_context(text: str):
    """Split a context line on commas outside parentheses."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts


def parse_context(text: str) -> Tuple[FeatureValue, ...]:
    """Inverse of ``value_key`` on a context tuple."""
    return tuple(parse_value(p) for p in _split_context(text))


def _header(lines, index, prefix):
    if index >= len(lines) or not lines[index].startswith(prefix):
        raise RuleFormatError("malformed header", index + 1, f"expected '{prefix.strip()}'")
    return lines[index][len(prefix):]


def _feature_at(text, lineno):
    try:
        return parse_feature(text)
    except FeatureError as exc:
        raise RuleFormatError("malformed header", lineno, str(exc)) from None


def parse_rule(text: str) -> Rule:
    lines = text.splitlines()
    target = _feature_at(_header(lines, 0, "feature: "), 1)
    gram = _header(lines, 1, "gram: ")
    if not gram.isdigit() or int(gram) < 1:
        raise RuleFormatError("malformed header", 2, f"bad gram order {gram!r}")
    k = int(gram)
    body_start = 2
    context = None
    if k >= 2:
        context = _feature_at(_header(lines, 2, "context-feature: "), 3)
        body_start = 3
    spec = RuleSpec(target, k, context)

    tables: Dict[tuple, Dict] = {}
    current = () if k == 1 else None
    if k == 1:
        tables[()] = {}
    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        if not line.strip():
            continue
        if line.startswith("context: "):
            if k == 1:
                raise RuleFormatError("context block in a 1-gram rule", lineno)
            try:
                current = parse_context(line[len("context: "):])
            except ValueError as exc:
                raise RuleFormatError("malformed context", lineno, str(exc)) from None
            if len(current) != k - 1:
                raise RuleFormatError("malformed context", lineno, f"expected {k - 1} values")
            if current in tables:
                raise RuleFormatError("duplicate context block", lineno)
            tables[current] = {}
            continue
        if current is None:
            raise RuleFormatError("histogram line before any context", lineno)
        value_text, tab, count_text = line.rpartition("\t")
        if not tab:
            raise RuleFormatError("malformed histogram line", lineno, "expected <value><TAB><count>")
        if not (count_text.isascii() and count_text.isdigit()) or int(count_text) < 1:
            raise RuleFormatError("non-integer count", lineno, f"{count_text!r} is not a positive integer")
        try:
            value = parse_value(value_text)
        except ValueError as exc:
            raise RuleFormatError("malformed value", lineno, str(exc)) from None
        if value in tables[current]:
            raise RuleFormatError("duplicate value line", lineno, value_text)
        tables[current][value] = int(count_text)

    for key, counts in tables.items():
        if not counts:
            where = f"context {value_key(key)}" if key else "rule"
            raise RuleFormatError(f"empty histogram for {where}")
    if not tables:
        raise RuleFormatError("rule has no context blocks")
    return Rule(spec, {key: Histogram(c) for key, c in tables.items()})


def read_rule(path) -> Rule:
    with open(path, encoding="utf-8") as fh:
        return parse_rule(fh.read())
