"""Keyword-rubric grading of free-text rule interpretations."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .errors import RubricFormatError

DEFAULT_CAP = 2

_SECTION = re.compile(r"^\[rule (\S(?:.*\S)?)\]$")


def normalize(text: str) -> str:
    """Lowercase, turn every non-alphanumeric character into a space, and
    collapse runs of spaces."""
    return " ".join("".join(ch if ch.isalnum() else " " for ch in text.lower()).split())


@dataclass(frozen=True)
class RuleRubric:
    groups: Tuple[FrozenSet[str], ...]
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        groups = []
        for g in self.groups:
            phrases = frozenset(normalize(p) for p in g)
            if not phrases or "" in phrases:
                raise ValueError("concept groups need non-empty keyword phrases")
            groups.append(phrases)
        if self.cap < 0:
            raise ValueError("cap must be non-negative")
        object.__setattr__(self, "groups", tuple(groups))


@dataclass(frozen=True)
class Rubric:
    rules: Dict[str, RuleRubric] = field(default_factory=dict)

    @property
    def max_score(self) -> int:
        return sum(r.cap for r in self.rules.values())


@dataclass(frozen=True)
class AnswerSheet:
    student: str
    answers: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Grade:
    student: str
    points: Dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.points.values())


def matches(phrase: str, answer: str) -> bool:
    """Word-bounded containment; both arguments already normalized."""
    return f" {phrase} " in f" {answer} "


def score_answer(answer: str, rubric: RuleRubric) -> int:
    text = normalize(answer)
    hits = sum(any(matches(p, text) for p in group) for group in rubric.groups)
    return min(rubric.cap, hits)


def grade(sheet: AnswerSheet, rubric: Rubric) -> Grade:
    if not rubric.rules:
        raise ValueError("rubric references no rules")
    points = {rid: score_answer(sheet.answers.get(rid, ""), rr) for rid, rr in rubric.rules.items()}
    return Grade(sheet.student, points)


# ---------------------------------------------------------------- buckets


def bucket_labels(max_score: int) -> List[str]:
    """Score-range labels, top score first and exact zero last, with ten-point
    half-open ranges in between."""
    if max_score < 1:
        raise ValueError("max_score must be positive")
    labels = [str(max_score)]
    lo = (max_score - 1) // 10 * 10
    while lo >= 0:
        labels.append(f"[{lo},{min(lo + 10, max_score)})")
        lo -= 10
    labels.append("0")
    return labels


def bucket_of(total: int, max_score: int) -> str:
    if not 0 <= total <= max_score:
        raise ValueError(f"total {total} outside 0..{max_score}")
    if total == max_score:
        return str(max_score)
    if total == 0:
        return "0"
    lo = total // 10 * 10
    return f"[{lo},{min(lo + 10, max_score)})"


def summarize(totals: Iterable[int], max_score: int) -> List[Tuple[str, int]]:
    """Cohort counts per score range; the exact-max and exact-zero rows take
    precedence over the ranges containing them."""
    counts = {label: 0 for label in bucket_labels(max_score)}
    for t in totals:
        counts[bucket_of(t, max_score)] += 1
    return list(counts.items())


# ------------------------------------------------------------------- files


def parse_rubric(text: str) -> Rubric:
    rules: Dict[str, RuleRubric] = {}
    current = None
    groups: List[List[str]] = []
    cap = DEFAULT_CAP
    section_line = 0

    def close():
        if current is None:
            return
        if not groups:
            raise RubricFormatError("rubric section without groups", section_line, current)
        rules[current] = RuleRubric(tuple(frozenset(g) for g in groups), cap)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _SECTION.match(line)
        if m:
            close()
            current, groups, cap, section_line = m.group(1), [], DEFAULT_CAP, lineno
            if current in rules:
                raise RubricFormatError("duplicate rule id", lineno, current)
            continue
        if current is None:
            raise RubricFormatError("entry before any [rule <id>] section", lineno)
        key, colon, value = line.partition(":")
        key = key.strip()
        if not colon or key not in ("group", "cap"):
            raise RubricFormatError("malformed rubric line", lineno, raw)
        if key == "cap":
            value = value.strip()
            if not value.isdigit():
                raise RubricFormatError("malformed cap", lineno, value)
            cap = int(value)
            continue
        phrases = [p.strip() for p in value.split("|")]
        if any(not normalize(p) for p in phrases):
            raise RubricFormatError("empty keyword phrase", lineno)
        groups.append(phrases)
    close()
    if not rules:
        raise RubricFormatError("rubric references no rules")
    return Rubric(rules)


def parse_sheet(text: str) -> AnswerSheet:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("student:"):
        raise RubricFormatError("answer sheet must start with 'student: <id>'", 1)
    student = lines[0][len("student:"):].strip()
    if not student:
        raise RubricFormatError("empty student id", 1)
    answers: Dict[str, List[str]] = {}
    current = None
    for lineno, raw in enumerate(lines[1:], start=2):
        m = _SECTION.match(raw.strip())
        if m:
            current = m.group(1)
            if current in answers:
                raise RubricFormatError("duplicate rule id", lineno, current)
            answers[current] = []
        elif current is not None:
            answers[current].append(raw)
        elif raw.strip():
            raise RubricFormatError("answer text before any [rule <id>] section", lineno)
    return AnswerSheet(student, {rid: "\n".join(body).strip() for rid, body in answers.items()})


def format_report(grades: Sequence[Grade], rubric: Rubric) -> str:
    lines = []
    for g in grades:
        lines += [f"{g.student}\t{rid}\t{pts}" for rid, pts in g.points.items()]
        lines.append(f"{g.student}\tTOTAL\t{g.total}")
    lines.append("")
    lines.append("score range\tstudents")
    lines += [f"{label}\t{n}" for label, n in summarize([g.total for g in grades], rubric.max_score)]
    return "".join(line + "\n" for line in lines)
