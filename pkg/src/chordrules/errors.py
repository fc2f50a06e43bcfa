"""Exception types shared across the package."""


class ChordRulesError(Exception):
    """Base class for every error raised by this package."""


class InputError(ChordRulesError, ValueError):
    """Malformed input text; carries a 1-based line number when known."""

    def __init__(self, message, line=None, detail=None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class CorpusFormatError(InputError):
    pass


class RuleFormatError(InputError):
    pass


class RubricFormatError(InputError):
    pass


class FeatureError(ChordRulesError, ValueError):
    """Feature expression is invalid or cannot be applied to a chord."""


class FeatureSyntaxError(FeatureError):
    """DSL text does not match the grammar (or fails a static check).

    ``position`` is a 0-based offset into ``text``.
    """

    def __init__(self, message, text, position):
        self.text = text
        self.position = position
        self.reason = message
        super().__init__(f"{message} (at column {position + 1})")

    def caret(self):
        return f"{self.text}\n{' ' * self.position}^"


class NoObservationsError(ChordRulesError):
    """A rule was requested over a corpus with no k-windows."""
