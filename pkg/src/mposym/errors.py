class MposymError(Exception):
    """Base class for all mposym errors."""

    pass


class InputError(MposymError):
    """Custom exception for unreadable or malformed input files."""

    pass


class ParameterError(MposymError):
    """Custom exception for parameters outside their admissible range."""

    pass


class PreconditionError(MposymError):
    """Custom exception for inputs that violate an operation's precondition."""

    pass


class SizeError(MposymError):
    """Custom exception for contractions exceeding the configured cap."""

    pass


class ShapeError(MposymError):
    """Custom exception for incompatible tensor or matrix shapes."""

    pass


class NoFusionError(MposymError):
    """Custom exception for an empty intertwiner space."""

    pass


class RankDeficientError(MposymError):
    """Custom exception for intertwiner spaces without a full-rank element."""

    pass


class InconsistentFusionError(MposymError):
    """Custom exception for fusion tensors whose two associations are not proportional."""

    pass


class NotACocycleError(MposymError):
    """Custom exception for phase tables violating the 3-cocycle identity."""

    pass


class ExtractionInconsistencyError(MposymError):
    """Custom exception for disagreeing structure-constant extraction methods."""

    pass


class MaskError(MposymError):
    """Custom exception for boundary validity masks that fail verification."""

    pass


class DegenerateAlgebraError(MposymError):
    """Custom exception for structure constants admitting several units or counits."""

    pass


class InversionError(MposymError):
    """Custom exception for singular basis changes."""

    pass


class NotSemisimpleError(MposymError):
    """Custom exception for algebras with a nonzero radical."""

    pass


class InconsistentCoproductError(MposymError):
    """Custom exception for non-integral fusion multiplicities."""

    pass


class LiftingError(MposymError):
    """Custom exception for idempotent iterations that fail to converge."""

    pass


class PairingError(MposymError):
    """Custom exception for representations over mismatched bases."""

    pass


class TheoremPreconditionError(MposymError):
    """Custom exception for fusion rings failing the fixed-point construction hypotheses."""

    pass


class StructureError(MposymError):
    """Custom exception for elements lacking a required structural property."""

    pass


class DegenerateRepresentationError(MposymError):
    """Custom exception for singular representation-level linear systems."""

    pass


class ModelError(MposymError):
    """Custom exception for spin-chain identities that fail to hold."""

    pass


INPUT_ERRORS = (InputError, ShapeError, PairingError, ParameterError, PreconditionError)
NUMERICAL_ERRORS = (
    DegenerateAlgebraError,
    RankDeficientError,
    InversionError,
    LiftingError,
    DegenerateRepresentationError,
)
