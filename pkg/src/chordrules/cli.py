"""Command-line entry point.

Exit codes: 0 success, 1 input or parse error, 2 empty result.
"""

from __future__ import annotations

import argparse
import sys

from . import assess
from .corpus import format_corpus, parse_corpus
from .errors import ChordRulesError, FeatureSyntaxError, NoObservationsError
from .features import enumerate_features, format_feature, parse_feature
from .render import describe, render_svg, render_text
from .rules import (DEFAULT_PEAK_THRESHOLD, RuleSpec, dominating_peak, extract, parse_context,
                    parse_rule, serialize_rule, value_key)
from .synth import synth_corpus

EXIT_OK, EXIT_INPUT, EXIT_EMPTY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _feature(text, flag):
    try:
        return parse_feature(text)
    except FeatureSyntaxError as exc:
        raise UsageError(f"{flag}: {exc.reason}\n{exc.caret()}") from None


def _text_report(rule, contexts, threshold):
    blocks = []
    for ctx in contexts:
        hist = rule.tables[tuple(ctx)] if rule.k > 1 else rule.histogram
        peak = dominating_peak(hist, threshold)
        peak_line = f"peak: {value_key(peak[0])} ({peak[1]:.3f})" if peak else "peak: none"
        blocks.append(render_text(rule, ctx) + peak_line + "\n" + describe(rule, ctx) + "\n")
    return "\n".join(blocks)


def _emit_rule(rule, args):
    if args.at is not None:
        if rule.k == 1:
            raise UsageError("--at only applies to k-gram rules with k >= 2")
        try:
            ctx = parse_context(args.at)
        except ValueError as exc:
            raise UsageError(f"--at: {exc}") from None
        if ctx not in rule.tables:
            raise UsageError(f"unknown context: {args.at}")
        contexts = [ctx]
    else:
        contexts = [None] if rule.k == 1 else rule.contexts()

    if args.figure and len(contexts) != 1:
        raise UsageError("--figure of a k-gram rule needs --at <context>")
    if args.format == "rule":
        out = serialize_rule(rule)
    elif args.format == "svg":
        if len(contexts) != 1:
            raise UsageError("svg output of a k-gram rule needs --at <context>")
        out = render_svg(rule, contexts[0])
    else:
        out = _text_report(rule, contexts, args.threshold)
    _write(args.out, out)
    if args.figure:
        from .plotting import histogram_figure
        histogram_figure(rule, args.figure, contexts[0])
    return EXIT_OK


def cmd_rule(args):
    target = _feature(args.feature, "--feature")
    if args.gram < 1:
        raise UsageError("--gram must be a positive integer")
    if args.gram >= 2 and args.context is None:
        raise UsageError("context required: --gram >= 2 needs --context")
    if args.gram == 1 and args.context is not None:
        raise UsageError("--context only applies with --gram >= 2")
    context = _feature(args.context, "--context") if args.context is not None else None
    corpus = parse_corpus(_read(args.corpus))
    spec = RuleSpec(target, args.gram, context)
    rule = extract(corpus, spec, workers=args.workers)
    return _emit_rule(rule, args)


def cmd_render(args):
    rule = parse_rule(_read(args.rule_file))
    return _emit_rule(rule, args)


def cmd_enumerate(args):
    if args.arity < 1 or args.max_chain < 1:
        raise UsageError("--arity and --max-chain must be positive")
    exprs = enumerate_features(args.arity, args.max_chain)
    _write(args.out, "".join(format_feature(e) + "\n" for e in exprs))
    return EXIT_OK


def cmd_grade(args):
    rubric = assess.parse_rubric(_read(args.rubric))
    sheets = [assess.parse_sheet(_read(p)) for p in args.answers]
    grades = [assess.grade(s, rubric) for s in sheets]
    _write(args.out, assess.format_report(grades, rubric))
    if args.figure:
        from .plotting import bucket_figure
        bucket_figure(assess.summarize([g.total for g in grades], rubric.max_score), args.figure)
    return EXIT_OK


def cmd_synth(args):
    try:
        corpus = synth_corpus(args.voices, args.length, args.pieces, args.seed, args.crossing_rate)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, format_corpus(corpus))
    return EXIT_OK


def _add_output(p, formats=True):
    p.add_argument("--out", "-o", help="output path (default: stdout)")
    if formats:
        p.add_argument("--format", choices=("text", "svg", "rule"), default="text")
        p.add_argument("--at", metavar="CONTEXT",
                       help="context tuple to show, e.g. '(0,4)' or '4<3<2<1'")
        p.add_argument("--threshold", type=float, default=DEFAULT_PEAK_THRESHOLD,
                       help="dominating-peak threshold (default %(default)s)")
        p.add_argument("--figure", metavar="PATH", help="also write a matplotlib histogram figure")


def build_parser():
    parser = _Parser(prog="chordrules", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rule", help="extract an n-gram histogram rule from a corpus")
    p.add_argument("corpus")
    p.add_argument("--feature", required=True, help='e.g. "window[1,2,3,4] |> order"')
    p.add_argument("--gram", type=int, default=1)
    p.add_argument("--context", help="feature of the preceding chords (required for --gram >= 2)")
    p.add_argument("--workers", type=int, default=None)
    _add_output(p)
    p.set_defaults(func=cmd_rule)

    p = sub.add_parser("render", help="re-render a saved rule file")
    p.add_argument("rule_file")
    _add_output(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("enumerate", help="list all feature expressions")
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--max-chain", type=int, required=True)
    _add_output(p, formats=False)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("grade", help="grade answer sheets against a keyword rubric")
    p.add_argument("--rubric", required=True)
    p.add_argument("--answers", nargs="+", required=True)
    p.add_argument("--figure", metavar="PATH", help="also write a bar chart of the score ranges")
    _add_output(p, formats=False)
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--voices", type=int, default=4)
    p.add_argument("--length", type=int, default=100)
    p.add_argument("--pieces", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crossing-rate", type=float, default=0.0)
    _add_output(p, formats=False)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoObservationsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (UsageError, ChordRulesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
