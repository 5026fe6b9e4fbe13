"""Exception hierarchy.

``InputError`` subclasses describe bad data or configuration (CLI exit code 2);
anything else deriving from ``EevalError`` is a computation failure (exit 1).
"""


class EevalError(Exception):
    pass


class InputError(EevalError):
    pass


class DatasetError(InputError):
    pass


class MissingFile(DatasetError):
    pass


class ShapeMismatch(DatasetError):
    pass


class NonFiniteLogit(DatasetError):
    pass


class LabelOutOfRange(DatasetError):
    pass


class NonIncreasingCosts(DatasetError):
    pass


class InvalidManifest(DatasetError):
    pass


class IoFailure(EevalError):
    pass


class EmptySplit(InputError):
    pass


class InvalidConfig(InputError):
    pass


class NonFiniteInput(EevalError):
    pass


class DomainError(EevalError):
    pass


class LengthMismatch(EevalError):
    pass


class EmptyInput(EevalError):
    pass


class DegenerateLabels(EevalError):
    """AUROC is undefined when only one label class is present."""


class NonPositiveQ(InputError):
    pass
