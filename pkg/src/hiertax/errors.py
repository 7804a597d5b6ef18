"""Exception types raised across the library.

Every error is a subclass of :class:`HiertaxError` so callers can catch the
library's failures with a single except clause.  The CLI maps these onto
exit codes (usage 2, data 3, internal 1).
"""


class HiertaxError(Exception):
    """Base class for all hiertax errors."""


# hierarchy
class MalformedCode(HiertaxError):
    """Code string has a wrong length or contains a non-alphabet symbol."""


class EmptyInput(HiertaxError):
    """An operation that needs at least one item received none."""


class UnknownCode(HiertaxError):
    """Code is not a node of the hierarchy tree."""


class LevelOutOfRange(HiertaxError):
    """Requested hierarchy level does not exist."""


# text features
class EmptyCorpus(HiertaxError):
    """Vocabulary fitting needs a non-empty corpus."""


# linear core
class ClassIndexOutOfRange(HiertaxError):
    """Training example refers to a class index outside the class list."""


class EmptyTrainingSet(HiertaxError):
    """Training requires at least one example."""


class DimensionMismatch(HiertaxError):
    """Feature vector refers to indices beyond the model's width."""


class IndexOutOfRange(HiertaxError):
    """Distribution index outside the valid range."""


# estimators
class NonLeafLabel(HiertaxError):
    """Document labeled with a code that is not a full-depth leaf."""


# metrics
class EmptyEvaluation(HiertaxError):
    """Metric computation received no evaluation records."""


class EmptyTable(HiertaxError):
    """Coder table holds no paired assignments."""


class BadDigitLevel(HiertaxError):
    """Digit count does not correspond to a hierarchy level."""


class DegenerateTable(HiertaxError):
    """Chance agreement is 1, Cohen's kappa is undefined."""


# datagen
class InvalidSpec(HiertaxError):
    """Corpus specification violates its range constraints."""


# persistence / CLI-facing data problems
class ModelFormatError(HiertaxError):
    """Persisted model container is unreadable or has a wrong version."""


class DataError(HiertaxError):
    """Input data file is missing, unreadable, or fails validation."""
