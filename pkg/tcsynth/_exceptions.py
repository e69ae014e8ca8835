"""Module for error exception."""


class TCError(Exception):
    """Base class for tcsynth exception."""

    #: source line and file of the declaration that raised the error
    line = None
    path = None


class TCParseError(TCError):
    """Raise a syntax error in a ``.tc`` source."""

    def __init__(self, message, line, col, token, expected=()):
        super(TCParseError, self).__init__(message)
        self.line = line
        self.col = col
        self.token = token
        self.expected = tuple(sorted(expected))

    def __str__(self):
        msg = '{}:{}: {}'.format(self.line, self.col, self.args[0])
        if self.expected:
            msg += ' (expected {})'.format(', '.join(self.expected))
        return msg


class TCHierarchyError(TCError):
    """Errors building the environment."""

    pass


class TCUnknownClass(TCHierarchyError):
    """Raise error for an unregistered class."""

    pass


class TCUnknownParent(TCHierarchyError):
    """Raise error for an unregistered parent in ``extends``."""

    pass


class TCConflictingField(TCHierarchyError):
    """Duplicate field name with a different type."""

    pass


class TCAmbiguousField(TCHierarchyError):
    """Same leaf field reachable from independent parents."""

    pass


class TCUnknownField(TCHierarchyError):
    """Instance assignment to a field the class does not have."""

    pass


class TCArityError(TCHierarchyError):
    """Class or definition applied to the wrong number of arguments."""

    pass


class TCFrozenEnvironment(TCHierarchyError):
    """Attempt to extend a frozen environment."""

    pass


class TCSynthFailure(TCError):
    """
    Instance synthesis failed.

    Parameters
    ----------
    message: str
        Failure description
    stats: SynthStats, optional
        Search statistics collected until the failure
    chain: list, optional
        Longest chain of in-progress subgoals
    """

    verdict = 'failed'

    def __init__(self, message, stats=None, chain=()):
        super(TCSynthFailure, self).__init__(message)
        self.stats = stats
        self.chain = tuple(chain)


class TCNotFound(TCSynthFailure):
    """Search space exhausted without a solution."""

    verdict = 'not_found'


class TCFuelExhausted(TCSynthFailure):
    """Candidate-application budget hit."""

    verdict = 'fuel_exhausted'


class TCDepthExceeded(TCSynthFailure):
    """Search cut at the maximum depth without a solution."""

    verdict = 'depth_exceeded'


class TCIllFormedGoal(TCSynthFailure):
    """Goal is not a class application or has metavariables in in-positions."""

    verdict = 'ill_formed'


class TCMissingFile(TCError):
    """Raise error for a missing source file."""

    pass


class TCKeyError(KeyError):
    """Raise key error."""

    pass
