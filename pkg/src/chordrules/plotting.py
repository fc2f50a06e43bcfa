"""Matplotlib figures written next to the text reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .rules import value_key  # noqa: E402
from .render import select  # noqa: E402

# fixed metadata keeps PNG/SVG/PDF output byte-stable across runs
_METADATA = {
    ".png": {"Software": None},
    ".svg": {"Date": None, "Creator": None},
    ".pdf": {"CreationDate": None, "Creator": None, "Producer": None},
}

STYLE = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "chordrules",
}


def _save(fig, path):
    path = str(path)
    ext = path[path.rfind("."):].lower() if "." in path else ".png"
    fig.savefig(path, metadata=_METADATA.get(ext), bbox_inches="tight", dpi=120)
    plt.close(fig)


def histogram_figure(rule, path, context=None):
    hist = select(rule, context)
    ranked = hist.ranked()
    labels = [value_key(v) for v, _ in ranked][::-1]
    probs = [n / hist.total for _, n in ranked][::-1]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.5, 0.6 + 0.28 * len(labels)))
        ax.barh(range(len(labels)), probs, color="#4a6fa5")
        ax.set_yticks(range(len(labels)))
        ax.set_yticklabels(labels, family="monospace")
        ax.set_xlim(0, 1)
        ax.set_xlabel("probability")
        title = str(rule.spec.target)
        if rule.k >= 2:
            title += f"\ngiven {value_key(tuple(context))}"
        ax.set_title(title, fontsize=9)
        _save(fig, path)


def bucket_figure(table, path):
    """Bar chart of a score-range table, in the row order given."""
    labels = [label for label, _ in table]
    counts = [n for _, n in table]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.bar(range(len(labels)), counts, color="#4a6fa5")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels)
        ax.set_xlabel("score range")
        ax.set_ylabel("# of students")
        ax.yaxis.get_major_locator().set_params(integer=True)
        _save(fig, path)
