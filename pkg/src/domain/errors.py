"""
Error hierarchy.

Three families map onto the CLI exit codes: InputError (2), FitError (3),
BundleError (4).
"""


class WespadError(Exception):
    """Base class for all package errors."""

    exit_code = 1


# Input errors


class InputError(WespadError):
    """Malformed or missing input data."""

    exit_code = 2


class MissingInputError(InputError):
    """A required input path was not supplied or does not exist."""


class PostParseError(InputError):
    """A post record could not be parsed."""

    def __init__(self, path, line_number: int, reason: str):
        self.path = path
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"{path}:{line_number}: {reason}")


class DuplicatePostIdError(InputError):
    """Two posts share one id."""

    def __init__(self, post_id: str):
        self.post_id = post_id
        super().__init__(f"Duplicate post id: {post_id!r}")


class UnknownLabelError(InputError):
    """A label string is not one of the accepted spellings."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"Unknown label: {label!r}")


class TooFewExamplesError(InputError):
    """A class has fewer members than the requested number of folds."""


class EmbeddingFormatError(InputError):
    """An embedding file does not follow its declared format."""


class DimensionMismatchError(EmbeddingFormatError):
    """An embedding row has the wrong number of components."""

    def __init__(self, line_number: int, expected: int, found: int):
        self.line_number = line_number
        self.expected = expected
        self.found = found
        super().__init__(
            f"Row {line_number}: expected {expected} components, found {found}"
        )


class MalformedHeaderError(EmbeddingFormatError):
    """A word2vec header is not '<vocab_count> <dim>'."""


class TreebankFormatError(InputError):
    """A CoNLL file could not be parsed."""


class TreeStructureError(TreebankFormatError):
    """Head links of a sentence do not form a single-rooted tree."""

    def __init__(self, post_id: str | None, reason: str):
        self.post_id = post_id
        super().__init__(f"Invalid dependency tree for post {post_id!r}: {reason}")


# Fit errors


class FitError(WespadError):
    """A model could not be fitted."""

    exit_code = 3


class EmptyDatasetError(FitError):
    """Training was requested on zero examples."""


class NonFiniteFeatureError(FitError):
    """A training feature value is NaN or infinite."""


class DegenerateCorpusError(FitError):
    """The training corpus holds a single class."""


class NotEnoughPointsError(FitError):
    """k-means was asked for more clusters than there are points."""


class FeatureDimensionError(ValueError):
    """A vector does not match the dimension a model was fitted on."""


# Bundle errors


class BundleError(WespadError):
    """A model bundle could not be read."""

    exit_code = 4


class BundleVersionError(BundleError):
    """The bundle was written by an unsupported format version."""


class CorruptBundleError(BundleError):
    """The bundle is not valid JSON or misses required fields."""
