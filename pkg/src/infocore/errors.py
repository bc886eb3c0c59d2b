"""Exception hierarchy.

Every error raised on bad input derives from :class:`InputError` (a
``ValueError``) so callers and the CLI can separate malformed data from
genuine analysis outcomes.
"""


class InfocoreError(Exception):
    pass


class InputError(InfocoreError, ValueError):
    pass


# game data model
class NonzeroEmptySet(InputError):
    pass


class NegativeValue(InputError):
    pass


class WrongLength(InputError):
    pass


class EmptySubset(InputError):
    pass


class InvalidOrder(InputError):
    pass


class LengthMismatch(InputError):
    pass


class EmptySetInCollection(InputError):
    pass


class TooManyPlayers(InputError):
    pass


class WrongOrientation(InputError):
    pass


# linear programming
class MalformedProgram(InputError):
    pass


class IterationLimit(InfocoreError):
    pass


# analysis outcomes that prevent an answer
class EmptyCore(InfocoreError):
    pass


class NotBalanced(InfocoreError):
    pass


class NotMonotone(InfocoreError):
    pass


class VerificationFailed(InfocoreError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"prefix verification failed at {self.violations[:5]}")


# distributions and constructors
class UnnormalizedInput(InputError):
    pass


class OverlappingSubsets(InputError):
    pass


class NonpositiveNoise(InputError):
    pass


class NonpositiveVariance(InputError):
    pass


class NotPositiveDefinite(InputError):
    pass


class SupportTooLarge(InputError):
    pass


class InvalidPartition(InputError):
    pass


class NotAGame(InputError):
    pass


class InfiniteVariance(InputError):
    pass


class UnsupportedSampleSize(InputError):
    pass


class EmptyFamily(InputError):
    pass


class MismatchedOutcomeSpaces(InputError):
    pass


class ParameterOutOfRange(InputError):
    pass


class OutcomeSpaceTooLarge(InputError):
    pass


class NotTwoAlternating(InfocoreError):
    pass


class DivergenceInfinite(InfocoreError):
    pass
