"""Exception types shared across the package."""


class PropmatchError(Exception):
    """Base class for all errors raised by this package."""


class MalformedParse(PropmatchError):
    """A CoNLL-U block is structurally invalid (bad indices, cycles, bad root count)."""


class DuplicateId(PropmatchError):
    """Two documents (or registered artifacts) share an identifier."""


class DanglingParse(PropmatchError):
    """A parse references a sentence that does not exist."""


class BadVectorFile(PropmatchError):
    """A word-vector file has inconsistent dimensions or unparseable values."""


class DimensionMismatch(PropmatchError):
    """Two vectors (or a feature vector and a model) disagree on length."""


class EmptyCorpus(PropmatchError):
    """An operation requiring at least one sentence was given none."""


class IllegalEdit(PropmatchError):
    """A tree edit operation was applied where its preconditions do not hold."""


class BadInstance(PropmatchError):
    """An evaluation instance is unusable (e.g. empty relevant set)."""


class BadLabel(PropmatchError):
    """A query references a frame label absent from the annotations."""


class InsufficientData(PropmatchError):
    """Not enough overlapping ratings to compute agreement."""


class UnknownId(PropmatchError):
    """A referenced corpus, query, or model id is not registered."""


class DegenerateLabels(UserWarning):
    """Training data contains a single class; the fit proceeds but is degenerate."""
