"""Text, SVG and qualitative views of a rule histogram."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .features import format_feature
from .rules import Histogram, Rule, value_key

BAR_WIDTH = 40


@dataclass(frozen=True)
class QualitativeBand:
    name: str
    label: str
    low: Fraction           # inclusive lower bound, except that 0 is never in a band
    high: Fraction          # upper bound, inclusive only for the top band

    def contains(self, p: Fraction) -> bool:
        if p <= 0:
            return False
        if self.high == 1:
            return self.low <= p <= 1
        return self.low <= p < self.high


BANDS = (
    QualitativeBand("almost-always", "Almost always", Fraction(9, 10), Fraction(1)),
    QualitativeBand("usually", "Usually", Fraction(1, 2), Fraction(9, 10)),
    QualitativeBand("sometimes", "Sometimes", Fraction(1, 10), Fraction(1, 2)),
    QualitativeBand("rarely", "Rarely", Fraction(0), Fraction(1, 10)),
)

BAND_LEGEND = "bands: almost always >= 0.9, usually >= 0.5, sometimes >= 0.1, rarely < 0.1"


def band_of(p: Fraction) -> QualitativeBand:
    for band in BANDS:
        if band.contains(p):
            return band
    raise ValueError(f"probability out of range: {p}")


def _round_half_up(x: Fraction) -> int:
    return int((x + Fraction(1, 2)) // 1)


def bar_width(count: int, total: int, width: int = BAR_WIDTH) -> int:
    return _round_half_up(Fraction(count * width, total))


def format_probability(count: int, total: int) -> str:
    """Probability to three decimals, rounded half-up on the exact ratio."""
    millis = _round_half_up(Fraction(count * 1000, total))
    return f"{millis // 1000}.{millis % 1000:03d}"


def select(rule: Rule, context: Optional[Sequence] = None) -> Histogram:
    """Histogram of a 1-gram rule, or of one context of a k-gram rule."""
    if rule.k == 1:
        if context:
            raise ValueError("a 1-gram rule has no contexts")
        return rule.histogram
    if context is None:
        raise ValueError(f"a {rule.k}-gram rule needs a context tuple")
    key = tuple(context)
    if key not in rule.tables:
        raise ValueError(f"unknown context: {value_key(key)}")
    return rule.tables[key]


def header_lines(rule: Rule, context=None):
    lines = [f"feature: {format_feature(rule.spec.target)}", f"gram: {rule.k}"]
    if rule.k >= 2:
        lines.append(f"context-feature: {format_feature(rule.spec.context)}")
        lines.append(f"context: {value_key(tuple(context))}")
    return lines


def render_text(rule: Rule, context=None) -> str:
    hist = select(rule, context)
    lines = header_lines(rule, context)
    lines.append(f"total: {hist.total}")
    lines.append(BAND_LEGEND)
    ranked = hist.ranked()
    label_width = max(len(value_key(v)) for v, _ in ranked)
    for value, count in ranked:
        bar = "#" * bar_width(count, hist.total)
        lines.append(f"{value_key(value).ljust(label_width)}  {bar}  {format_probability(count, hist.total)}")
    return "".join(line + "\n" for line in lines)


def describe(rule: Rule, context=None) -> str:
    """Group support values into likelihood bands, most likely band first.

    >>> describe(rule)                                     # doctest: +SKIP
    'Almost always: 4<3<2<1. Rarely: 4<3<1<2.'
    """
    hist = select(rule, context)
    grouped = {band.name: [] for band in BANDS}
    for value, count in hist.ranked():
        grouped[band_of(hist.fraction(value)).name].append(value_key(value))
    return " ".join(
        f"{band.label}: {', '.join(grouped[band.name])}."
        for band in BANDS if grouped[band.name]
    )


# SVG layout, in user units
_ROW = 22
_BAR_H = 14
_CHAR = 7.2
_PLOT_W = 400
_PAD = 12


def render_svg(rule: Rule, context=None) -> str:
    """Horizontal bar chart as a standalone SVG 1.1 document.

    Only rect, line and text elements are emitted, and coordinates are
    formatted with fixed precision so identical rules give identical bytes.
    """
    hist = select(rule, context)
    ranked = hist.ranked()
    title = format_feature(rule.spec.target)
    if rule.k >= 2:
        title += f" given {value_key(tuple(context))}"
    label_w = max(len(value_key(v)) for v, _ in ranked) * _CHAR + _PAD
    left = _PAD + label_w
    top = 2 * _ROW
    width = left + _PLOT_W + 6 * _CHAR + 2 * _PAD
    height = top + _ROW * len(ranked) + 2 * _ROW

    def num(x):
        return f"{x:.1f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{num(width)}" '
        f'height="{num(height)}" viewBox="0 0 {num(width)} {num(height)}">',
        f'<rect x="0" y="0" width="{num(width)}" height="{num(height)}" fill="#ffffff"/>',
        f'<text x="{num(_PAD)}" y="{num(_ROW)}" font-family="monospace" font-size="13" '
        f'fill="#000000">{escape(title)} (gram {rule.k}, n={hist.total})</text>',
    ]
    for i, (value, count) in enumerate(ranked):
        y = top + i * _ROW
        bw = _PLOT_W * count / hist.total
        label = value_key(value)
        out.append(
            f'<text x="{num(left - _PAD / 2)}" y="{num(y + _BAR_H - 2)}" text-anchor="end" '
            f'font-family="monospace" font-size="12" fill="#000000">{escape(label)}</text>')
        out.append(
            f'<rect x="{num(left)}" y="{num(y)}" width="{num(bw)}" height="{num(_BAR_H)}" '
            f'fill="#4a6fa5"/>')
        out.append(
            f'<text x="{num(left + bw + _PAD / 2)}" y="{num(y + _BAR_H - 2)}" '
            f'font-family="monospace" font-size="12" fill="#333333">'
            f'{format_probability(count, hist.total)}</text>')
    axis_bottom = top + _ROW * len(ranked)
    out.append(f'<line x1="{num(left)}" y1="{num(top - 4)}" x2="{num(left)}" '
               f'y2="{num(axis_bottom)}" stroke="#000000" stroke-width="1"/>')
    out.append(f'<line x1="{num(left)}" y1="{num(axis_bottom)}" x2="{num(left + _PLOT_W)}" '
               f'y2="{num(axis_bottom)}" stroke="#000000" stroke-width="1"/>')
    for tick in range(0, 11, 5):
        x = left + _PLOT_W * tick / 10
        out.append(f'<line x1="{num(x)}" y1="{num(axis_bottom)}" x2="{num(x)}" '
                   f'y2="{num(axis_bottom + 4)}" stroke="#000000" stroke-width="1"/>')
        out.append(f'<text x="{num(x)}" y="{num(axis_bottom + 16)}" text-anchor="middle" '
                   f'font-family="monospace" font-size="11" fill="#000000">{tick / 10:.1f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

