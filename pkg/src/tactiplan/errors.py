"""Exception hierarchy shared by every tactiplan module.

All toolkit errors derive from :class:`TactiplanError` so callers (and the
CLI) can catch one base class. Each concrete class corresponds to one
documented failure mode and maps to a stable process exit code in
``tactiplan.cli``.
"""


class TactiplanError(Exception):
    """Base class for all toolkit errors."""


class ParseError(TactiplanError):
    """A layout/dataset/model file is malformed or empty."""


class InvariantError(TactiplanError):
    """A domain-type invariant is violated (duplicate ids, bad cost, ...)."""


class DimensionMismatch(TactiplanError):
    """A configuration/weight vector length does not match the layout."""


class RangeError(TactiplanError):
    """A success rate lies outside [0, 1]."""


class TooFewRecords(TactiplanError):
    """An operation needs more records than the dataset provides."""


class AllUndefined(TactiplanError):
    """Correlation is undefined for every site (constant success column)."""


class UndefinedWeights(TactiplanError):
    """Correlation weights contain undefined sites or a zero normalizer."""


class DegenerateAnchors(TactiplanError):
    """Anchor success rates coincide (p0 == p_full), predictor has no span."""


class EmptyValidation(TactiplanError):
    """Fine-tuning was given an empty validation dataset."""


class EmptyDataset(TactiplanError):
    """A dataset with zero records was constructed or supplied."""


class DivergenceError(TactiplanError):
    """Network training loss became non-finite."""


class KOutOfRange(TactiplanError):
    """Requested subset size k is outside [0, layout size]."""


class LayoutTooLarge(TactiplanError):
    """Layout exceeds the exhaustive-enumeration bound (2^N, N <= 25)."""


class NoFeasibleConfig(TactiplanError):
    """No configuration satisfies the search constraints."""


class EmptyLevels(TactiplanError):
    """A noise sweep was requested with no noise levels."""


class ZeroGroundTruth(TactiplanError):
    """Relative error is undefined for a zero ground-truth success rate."""


class MissingSeed(TactiplanError):
    """A stochastic command was invoked without an explicit --seed."""
