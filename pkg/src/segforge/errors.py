"""Exception hierarchy.

Input problems derive from ``InputError`` (CLI exit code 2). ``InvariantBreach``
signals an internal consistency failure that should never happen on valid
input (CLI exit code 3).
"""


class SegforgeError(Exception):
    """Base class for all package errors."""


class InputError(SegforgeError, ValueError):
    """Invalid user-supplied market, candidate or document."""


class MarketError(InputError):
    """A market description violates one of the model constraints."""


class NonPositiveSurplusType(MarketError):
    pass


class MassSumMismatch(MarketError):
    pass


class ValueAboveCap(MarketError):
    pass


class DuplicateType(MarketError):
    pass


class FewerThanTwoFirms(MarketError):
    pass


class MalformedMarket(MarketError):
    """Shape errors: wrong vector lengths, negative costs, non-positive masses."""


class EmptyCell(SegforgeError, ValueError):
    pass


class SupportAtOrBelowCost(SegforgeError, ValueError):
    pass


class StarPriceNotOptimal(SegforgeError, ValueError):
    pass


class MalformedCandidate(InputError):
    pass


class UnverifiedBenchmark(SegforgeError, ValueError):
    pass


class NonpositiveBenchmarkProfit(SegforgeError, ValueError):
    pass


class GridTooLarge(SegforgeError):
    """The unsegmented price-profile grid exceeds the search budget."""


class InvariantBreach(SegforgeError, AssertionError):
    pass
