"""Exception types raised across the package.

Every exception carries a short machine-readable ``code`` so that the CLI can
emit structured JSON diagnostics.
"""


class RothError(Exception):
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {"error": self.code, "message": str(self), "details": self.details}


# group_core
class NonAssociative(RothError):
    code = "non_associative"


class NotLatinSquare(RothError):
    code = "not_latin_square"


class ClosureTooLarge(RothError):
    code = "closure_too_large"


class GroupMismatch(RothError):
    code = "group_mismatch"


class DescriptorError(RothError):
    code = "descriptor_error"


# measures
class EmptySet(RothError):
    code = "empty_set"


class NegativeMeasure(RothError):
    code = "negative_measure"


class BadExponent(RothError):
    code = "bad_exponent"


class StepOutOfRange(RothError):
    code = "step_out_of_range"


class NotInNextLevel(RothError):
    code = "not_in_next_level"


# msys
class BadIndices(RothError):
    code = "bad_indices"


class TailNotContained(RothError):
    code = "tail_not_contained"


class TailNotSymmetric(RothError):
    code = "tail_not_symmetric"


class GlueConditionViolated(RothError):
    code = "glue_condition_violated"


class NotAbelian(RothError):
    code = "not_abelian"


class PigeonholeExhausted(RothError):
    code = "pigeonhole_exhausted"


class NotSubgroup(RothError):
    code = "not_subgroup"


class NotNested(RothError):
    code = "not_nested"


class InvalidSystem(RothError):
    code = "invalid_system"


# croot_sisask
class ZeroFunction(RothError):
    code = "zero_function"


class NotSymmetricNeighbourhood(RothError):
    code = "not_symmetric_neighbourhood"


class RetriesExhausted(RothError):
    code = "retries_exhausted"


class PreconditionViolated(RothError):
    code = "precondition_violated"


class CertificationFailed(RothError):
    code = "certification_failed"


# increment
class HypothesisNotMet(RothError):
    code = "hypothesis_not_met"


class SlackViolated(RothError):
    code = "slack_violated"


class InclusionViolated(RothError):
    code = "inclusion_violated"


class DistinctSquaresViolated(RothError):
    code = "distinct_squares_violated"


class BoundViolated(RothError):
    code = "bound_violated"


class SBelowHalf(RothError):
    code = "s_below_half"


class DichotomyFailed(RothError):
    code = "dichotomy_failed"


class DegenerateInput(RothError):
    code = "degenerate_input"


# counting
class CapExceeded(RothError):
    code = "cap_exceeded"


# cli / certificates
class ConfigError(RothError):
    code = "config_error"


class CertificateInvalid(RothError):
    code = "certificate_invalid"
