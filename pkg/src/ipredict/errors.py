"""Exception types shared across the package."""


class IPredictError(Exception):
    """Base class for errors raised by this package."""


class UnknownSourceError(IPredictError, KeyError):
    """A source identifier is not registered with the scorer or engine."""


class UnsupportedModalityError(IPredictError, TypeError):
    """A scorer cannot condition on the given source modality."""


class TerminatedStateError(IPredictError, ValueError):
    """A decoder state that already emitted end-of-sequence was advanced or queried."""


class CorpusFormatError(IPredictError, ValueError):
    """A corpus, vocabulary, n-best or feature file violates its declared format."""


class SessionStateError(IPredictError, ValueError):
    """An interactive session was driven through an illegal transition."""
