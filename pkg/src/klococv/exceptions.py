"""Exception types raised across the library."""


class KlococvError(Exception):
    """Base class for all library errors."""


class FormulaError(KlococvError, ValueError):
    """Base class for chemical-formula parsing errors."""


class UnknownElement(FormulaError):
    """A symbol in a formula is not one of the 118 known elements."""


class MalformedFormula(FormulaError):
    """Formula text violates the grammar (unbalanced parentheses,
    dangling multiplier, empty group, stray characters)."""


class NonPositiveCount(FormulaError):
    """A stoichiometric count or group multiplier is <= 0."""


class MissingProperty(KlococvError, ValueError):
    """An element of a composition has no value for a requested property."""


class EmptyAggregatorSet(KlococvError, ValueError):
    """An aggregator set must contain at least one aggregation function."""


class DimensionMismatch(KlococvError, ValueError):
    """Input dimensionality does not match what the operation expects."""


class NegativeInput(KlococvError, ValueError):
    """The additive chi-squared map is only defined for non-negative inputs."""


class InputBelowNegSkewedness(KlococvError, ValueError):
    """The skewed chi-squared map requires every input > -skewedness."""


class EmptyDataset(KlococvError, ValueError):
    """An operation received zero data rows."""


class KTooLarge(KlococvError, ValueError):
    """Requested more clusters than there are data rows."""


class NTooLarge(KlococvError, ValueError):
    """Requested more folds than there are data rows."""


class ProvenanceMismatch(KlococvError, ValueError):
    """A clustering or fold plan does not belong to the rows supplied."""


class EmptyTable(KlococvError, ValueError):
    """Max-min normalisation needs at least one table entry."""


class ConstantTarget(KlococvError, ValueError):
    """r-squared is undefined when all true targets are identical."""


class ZeroBaseline(KlococvError, ValueError):
    """Percentage improvement is undefined against a zero baseline metric."""


class IngestError(KlococvError, ValueError):
    """One or more rows of an input CSV could not be parsed."""

    def __init__(self, message, row_errors=None):
        super().__init__(message)
        self.row_errors = list(row_errors or [])
