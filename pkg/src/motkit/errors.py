"""Exception hierarchy shared by all motkit modules."""


class MotError(Exception):
    """Base class for every error raised by motkit."""


class NumericDegeneracyError(MotError):
    """A factorization or geometric inversion hit a degenerate input."""


class MissingFeatureError(MotError):
    """An appearance cost was requested for a detection without an embedding."""


class SequencingError(MotError):
    """Frames were fed to the tracker out of order."""


class ParseError(MotError):
    """A text file line does not follow its documented layout."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class FormatError(MotError):
    """A binary file does not follow its documented layout."""


class DataError(MotError):
    """A structurally valid file carries a value violating a data invariant."""


class InputFormatError(MotError):
    """Evaluation input breaks a format precondition (e.g. duplicate ids)."""


class EmptyGroundTruthError(MotError):
    """Ground truth contains no evaluated detections."""


class ConfigError(MotError):
    """A configuration file entry is unknown, unparsable, or out of range."""

    def __init__(self, path, line_no: int, key: str, message: str):
        super().__init__(f"{path}:{line_no}: key '{key}': {message}")
        self.path = path
        self.line_no = line_no
        self.key = key
