"""Exception hierarchy.

Every error the engine raises on purpose derives from :class:`FauxPasError`
so the CLI can map each family onto its own exit code.
"""


class FauxPasError(Exception):
    """Base class for engine errors."""


class NoMatchingRule(FauxPasError):
    """No transition rule covers a (state, joint action) pair."""


class ExplosionGuard(FauxPasError):
    """History enumeration would exceed the configured cap."""


class UndefinedSemantics(FauxPasError):
    """An utterance has no truth-conditional predicate."""


class ZeroPosterior(FauxPasError):
    """Conditioning removed all probability mass."""


class SpecError(FauxPasError):
    """A scenario document is malformed.

    ``path`` is a dotted field path such as ``agents.listener.ability_high``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class UnknownKey(SpecError):
    """A scenario document carries a field the schema does not know."""
