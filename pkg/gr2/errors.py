# gr2/errors.py
"""Exception hierarchy. Every error can carry a `witness` mapping for certificates."""


class Gr2Error(Exception):
    exit_code = 1

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = dict(witness or {})


# Usage (exit code 2)

class UsageError(Gr2Error):
    exit_code = 2


class GenusError(UsageError):
    pass


class ParseError(UsageError):
    pass


class SettingError(UsageError, ValueError):
    pass


# Mismatched operands

class GenusMismatch(Gr2Error, ValueError):
    pass


class AmbientMismatch(Gr2Error, ValueError):
    pass


class SpaceMismatch(Gr2Error, ValueError):
    pass


# Violated preconditions on mathematical input

class ConstraintViolation(Gr2Error):
    pass


class NonSymplectic(ConstraintViolation):
    pass


class ClauseViolation(ConstraintViolation):
    pass


class InvalidSubsurfaceBasis(ConstraintViolation):
    pass


class NonDecomposable(ConstraintViolation):
    pass


class DegreeOverflow(ConstraintViolation):
    pass


# A checked statement does not hold

class VerificationFailure(Gr2Error):
    pass


class MembershipFailure(VerificationFailure):
    pass


class GenerationFailure(VerificationFailure):
    pass


class DecompositionFailure(VerificationFailure):
    pass


class RankMismatch(VerificationFailure):
    pass


class UnclassifiedElement(VerificationFailure):
    pass


class InvarianceFailure(VerificationFailure):
    pass


class DiscrepancyFailure(VerificationFailure):
    pass


class IdentityFailure(VerificationFailure):
    pass
