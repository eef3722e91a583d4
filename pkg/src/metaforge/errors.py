"""Exception types shared across the package."""


class MetaforgeError(Exception):
    """Base class for all package errors."""


class UnknownComponent(MetaforgeError):
    """A component name is not in the catalog."""


class EmptySpaceRole(MetaforgeError):
    """A design space has no admissible component for a required role."""


class InvalidGraph(MetaforgeError):
    """An algorithm graph failed validation.

    Carries the full validation report in ``report``.
    """

    def __init__(self, report):
        self.report = list(report)
        lines = "; ".join(str(v) for v in self.report)
        super().__init__(f"invalid algorithm graph: {lines}")


class GraphParseError(MetaforgeError):
    """Malformed bytes passed to the graph deserializer."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)


class SchemaError(MetaforgeError):
    """A well-formed JSON document that does not match the graph schema."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"algorithm file schema violation at field {field!r}")


class EncodingMismatch(MetaforgeError):
    """An operator or problem was handed a genome of the wrong encoding."""


class EmptyPopulation(MetaforgeError):
    """A selection operator was called on an empty population."""


class OddParentCount(MetaforgeError):
    """Pairwise crossover requires an even number of parents."""


class PopulationTooSmall(MetaforgeError):
    """An operator needs more members than the population holds."""


class SizeMismatch(MetaforgeError):
    """Old population and offspring batch sizes differ."""


class UnknownBaseline(MetaforgeError):
    """Requested baseline algorithm name is not provided."""


class UnknownProblem(MetaforgeError):
    """Requested problem factory name is not registered."""


class EvaluationFailure(MetaforgeError):
    """The problem's evaluate function raised during a solve run."""

    def __init__(self, cause, fe, context=""):
        self.cause = cause
        self.fe = fe
        self.context = context
        where = f" [{context}]" if context else ""
        super().__init__(f"problem evaluation failed at FE {fe}{where}: {cause}")


class EmptyTargets(MetaforgeError):
    """Anytime-performance scoring requires at least one target value."""


class TooFewCandidates(MetaforgeError):
    """Racing needs at least two candidates to compare."""


class UsageError(MetaforgeError):
    """Invalid command line or run configuration; message includes a one-line fix."""
