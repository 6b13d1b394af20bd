"""Exception types shared across the toolkit."""


class SquadmtError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SquadmtError):
    """A serialized dataset is structurally malformed (missing/ill-typed fields)."""


class ValidationError(SquadmtError):
    """A dataset value violates an invariant (offsets, duplicate ids, empty contexts)."""


class LexiconError(SquadmtError):
    """A lemma lexicon or derivation forest file is malformed."""


class CycleError(LexiconError):
    """The derivation parent relation contains a cycle."""

    def __init__(self, lemma: str):
        super().__init__(f"derivation forest contains a cycle through {lemma!r}")
        self.lemma = lemma


class TranslationError(SquadmtError):
    """A translation provider failed or returned a malformed response."""


class ConfigError(SquadmtError):
    """Run configuration is inconsistent or incomplete."""
