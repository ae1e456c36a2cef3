"""Exception hierarchy shared by every wgtune module."""


class WgTuneError(Exception):
    """Base class for all errors raised by wgtune."""


class InvalidArgument(WgTuneError, ValueError):
    pass


class EmptySpace(InvalidArgument):
    pass


class InvalidDescriptor(InvalidArgument):
    pass


class InconsistentCounts(InvalidArgument):
    pass


class InvalidPartition(InvalidArgument):
    pass


class InvalidPrediction(InvalidArgument):
    pass


class SchemaError(InvalidArgument):
    pass


class EmptyTrainingSet(InvalidArgument):
    pass


class UnknownScenario(WgTuneError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownTestCase(WgTuneError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DuplicateTestCase(InvalidArgument):
    pass


class NoSafeParameter(WgTuneError):
    pass


class NoLegalParameter(WgTuneError):
    pass


class IncompleteSpace(WgTuneError):
    pass


class IllegalWorkgroupSize(WgTuneError):
    pass


class RefusedParameter(WgTuneError):
    """Raised when the simulated runtime rejects a workgroup size."""

    def __init__(self, wgsize, message=None):
        self.wgsize = wgsize
        super().__init__(message or f"workgroup size {wgsize} refused")


class ParseError(WgTuneError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
