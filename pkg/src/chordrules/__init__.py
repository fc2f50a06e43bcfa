"""Feature-induced chord abstractions, n-gram histogram rules over
multi-voice corpora, and keyword-rubric grading of rule interpretations."""

from .assess import AnswerSheet, Grade, Rubric, RuleRubric, grade, normalize, summarize
from .corpus import Corpus, Piece, REST, format_corpus, kgram_windows, parse_corpus, read_corpus
from .errors import (ChordRulesError, CorpusFormatError, FeatureError, FeatureSyntaxError,
                     NoObservationsError, RubricFormatError, RuleFormatError)
from .features import (Basis, FeatureExpr, IntVector, OrderString, Window, apply_basis,
                       apply_window, enumerate_features, evaluate, format_feature, parse_feature)
from .render import describe, render_svg, render_text
from .rules import (Histogram, Rule, RuleSpec, context_marginal, dominating_peak, extract,
                    parse_rule, read_rule, serialize_rule)
from .synth import synth_corpus

__version__ = "0.1.0"
