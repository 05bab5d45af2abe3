"""Independent equilibrium checks, minimax profits and the unsegmented benchmark.

Nothing here trusts the designer: a candidate is just segments with prices,
and every firm's best deviation is searched over the prices at which some
consumer type becomes indifferent. Profit in a segment is piecewise linear in
a firm's own price with breaks only at those points, so evaluating each point
exactly, and as a limit from below, covers every possible best response.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from segforge.designer import SigmaStar, consumer_choice, segment_prices, settle, supported_equilibrium
from segforge.errors import (
    GridTooLarge,
    InvariantBreach,
    MalformedCandidate,
    NonpositiveBenchmarkProfit,
    UnverifiedBenchmark,
)
from segforge.market import (
    Market,
    partition_by_dominance,
    reduce_to_monopoly,
    uniform_monopoly_price,
    willingness_gap,
)

log = logging.getLogger(__name__)

FAVOR_OWNER = "favor-owner"
LOWEST_INDEX = "lowest-index"
NEVER_FAVOR = "never-favor"


def never_favor(i: int) -> str:
    return f"{NEVER_FAVOR}:{i}"


def parse_tie_policy(policy: str, firms: int) -> tuple[bool, int | None]:
    """Return ``(favor_owner, shunned_firm)`` for a policy string."""
    if policy == FAVOR_OWNER:
        return True, None
    if policy == LOWEST_INDEX:
        return False, None
    if policy.startswith(NEVER_FAVOR + ":"):
        try:
            i = int(policy.split(":", 1)[1])
        except ValueError:
            i = -1
        if 0 <= i < firms:
            return False, i
    raise MalformedCandidate(f"unknown tie policy {policy!r}")


@dataclass(frozen=True)
class CandidateSegment:
    weight: Fraction
    composition: tuple[Fraction, ...]
    prices: tuple[Fraction, ...]
    owner: int | None = None


@dataclass(frozen=True)
class PublicEquilibriumCandidate:
    market: Market
    segments: tuple[CandidateSegment, ...]
    tie_policy: str = FAVOR_OWNER


@dataclass(frozen=True)
class DeviationRow:
    segment: int
    firm: int
    price: Fraction
    profit: Fraction
    best_price: Fraction
    best_profit: Fraction
    from_below: bool  # best_profit is a limit approached by prices just under best_price

    @property
    def profitable(self) -> bool:
        return self.best_profit > self.profit


@dataclass
class EquilibriumReport:
    passed: bool
    rows: list[DeviationRow] = field(default_factory=list)

    def violations(self) -> list[DeviationRow]:
        return [r for r in self.rows if r.profitable]


@dataclass(frozen=True)
class MinimaxEntry:
    firm: int
    minimax_profit: Fraction
    witness_price: Fraction


@dataclass(frozen=True)
class BenchmarkEquilibrium:
    prices: tuple[Fraction, ...]
    tie_policy: str
    profits: tuple[Fraction, ...]


@dataclass(frozen=True)
class FirmComparison:
    firm: int
    benchmark_profit: Fraction
    star_profit: Fraction

    @property
    def strictly_worse(self) -> bool:
        return self.star_profit < self.benchmark_profit


@dataclass(frozen=True)
class ComparisonReport:
    benchmark: BenchmarkEquilibrium
    min_trade_surplus: Fraction
    rows: tuple[FirmComparison, ...]

    @property
    def positive_trade_surplus(self) -> bool:
        return self.min_trade_surplus > 0

    @property
    def covered(self) -> bool:
        return self.positive_trade_surplus

    @property
    def all_strictly_worse(self) -> bool:
        return all(r.strictly_worse for r in self.rows)


def check_candidate(c: PublicEquilibriumCandidate) -> None:
    m = c.market
    n, k = m.firms, len(m.types)
    parse_tie_policy(c.tie_policy, n)
    if not c.segments:
        raise MalformedCandidate("candidate has no segments")
    for s, seg in enumerate(c.segments):
        if seg.weight <= 0:
            raise MalformedCandidate(f"segment {s}: weight must be positive")
        if len(seg.composition) != k or any(q < 0 for q in seg.composition):
            raise MalformedCandidate(f"segment {s}: composition needs {k} non-negative masses")
        if sum(seg.composition) != 1:
            raise MalformedCandidate(f"segment {s}: composition sums to {sum(seg.composition)}")
        if len(seg.prices) != n:
            raise MalformedCandidate(f"segment {s}: expected {n} prices")
        for i, p in enumerate(seg.prices):
            if p < m.costs[i]:
                raise MalformedCandidate(
                    f"segment {s}: firm {i} prices {p} below its marginal cost {m.costs[i]}"
                )
            if p > max(m.value_cap, m.costs[i]):
                raise MalformedCandidate(f"segment {s}: firm {i} prices above the value cap")
        if seg.owner is not None and not 0 <= seg.owner < n:
            raise MalformedCandidate(f"segment {s}: owner {seg.owner} out of range")
    for t, ctype in enumerate(m.types):
        total = sum((seg.weight * seg.composition[t] for seg in c.segments), Fraction(0))
        if total != ctype.mass:
            raise MalformedCandidate(f"segments do not recombine to the market at type {t}")


def segment_profit(
    m: Market, seg: CandidateSegment, prices: Sequence[Fraction], i: int, policy: str
) -> Fraction:
    """Firm ``i``'s profit per unit of segment mass at the given price profile."""
    favor_owner, shunned = parse_tie_policy(policy, m.firms)
    favored = seg.owner if favor_owner else None
    prices = tuple(prices)
    demand = sum(
        (q for t, q in enumerate(seg.composition)
         if q > 0 and consumer_choice(m, t, prices, favored, shunned) == i),
        Fraction(0),
    )
    return (prices[i] - m.costs[i]) * demand


def _indifference(m: Market, seg: CandidateSegment, i: int) -> list[tuple[Fraction, Fraction]]:
    """``(own price at which the type is indifferent, type mass)`` for types in ``seg``."""
    out = []
    for t, q in enumerate(seg.composition):
        if q == 0:
            continue
        v = m.types[t].values
        rival = max([Fraction(0)] + [v[j] - seg.prices[j] for j in range(m.firms) if j != i])
        out.append((v[i] - rival, q))
    return out


def deviation_prices(m: Market, seg: CandidateSegment, i: int) -> list[Fraction]:
    """Own prices where some type in ``seg`` becomes indifferent, clamped to the feasible range."""
    return sorted({m.costs[i]} | {_clamp(m, i, k) for k, _ in _indifference(m, seg, i)})


def best_deviation(
    m: Market, seg: CandidateSegment, i: int, policy: str
) -> tuple[Fraction, Fraction, bool]:
    """Best own-price response in a segment as ``(price, profit, from_below)``."""
    lo = m.costs[i]
    kinks = deviation_prices(m, seg, i)
    best = (lo, Fraction(0), False)
    for p in kinks:
        prices = list(seg.prices)
        prices[i] = p
        val = segment_profit(m, seg, prices, i, policy)
        if val > best[1]:
            best = (p, val, False)
    # just below p, every type indifferent at or above p strictly prefers firm i
    indiff = _indifference(m, seg, i)
    for p in kinks:
        if p <= lo:
            continue
        val = (p - lo) * sum((q for k, q in indiff if k >= p), Fraction(0))
        if val > best[1]:
            best = (p, val, True)
    return best


def verify_public_equilibrium(c: PublicEquilibriumCandidate) -> EquilibriumReport:
    """Check that no firm gains by changing its price in any segment.

    Raises:
        MalformedCandidate: if the candidate is not a valid priced segmentation.
    """
    check_candidate(c)
    m = c.market
    report = EquilibriumReport(passed=True)
    for s, seg in enumerate(c.segments):
        for i in range(m.firms):
            current = segment_profit(m, seg, seg.prices, i, c.tie_policy)
            bp, bv, below = best_deviation(m, seg, i, c.tie_policy)
            row = DeviationRow(s, i, seg.prices[i], current, bp, bv, below)
            report.rows.append(row)
            if row.profitable:
                report.passed = False
    return report


def candidate_from_design(s: SigmaStar) -> PublicEquilibriumCandidate:
    """Candidate made of the designed segments, owner prices and owner-favoring ties."""
    segs = tuple(
        CandidateSegment(seg.weight, seg.composition, segment_prices(s, seg), seg.owner)
        for seg in s.segments
    )
    return PublicEquilibriumCandidate(s.parent, segs, FAVOR_OWNER)


def unsegmented_candidate(
    m: Market, prices: Sequence[Fraction], policy: str = LOWEST_INDEX
) -> PublicEquilibriumCandidate:
    seg = CandidateSegment(Fraction(1), tuple(t.mass for t in m.types), tuple(prices))
    return PublicEquilibriumCandidate(m, (seg,), policy)


def minimax_profit(m: Market, i: int) -> MinimaxEntry:
    """Profit firm ``i`` can guarantee against rivals at cost and adversarial ties.

    With rivals at cost and ties never going its way, firm ``i`` sells at price
    ``p`` to types whose gap strictly exceeds ``p``. The supremum over ``p`` is
    a left limit at some gap ``g``: ``(g - c_i)`` times the mass of gaps >= g.
    """
    ci = m.costs[i]
    gaps = [(willingness_gap(m, i, t), ctype.mass) for t, ctype in enumerate(m.types)]
    best = MinimaxEntry(i, Fraction(0), ci)
    for g in sorted({g for g, _ in gaps if g > ci}):
        val = (g - ci) * sum((q for h, q in gaps if h >= g), Fraction(0))
        if val > best.minimax_profit:
            best = MinimaxEntry(i, val, g)

    part = partition_by_dominance(m)
    star = (
        uniform_monopoly_price(reduce_to_monopoly(m, part, i)).profit
        if part.cell_mass[i] > 0
        else Fraction(0)
    )
    if star != best.minimax_profit:
        raise InvariantBreach(
            f"firm {i}: minimax profit {best.minimax_profit} differs from uniform profit {star}"
        )
    return best


def minimax_report(m: Market) -> tuple[MinimaxEntry, ...]:
    return tuple(minimax_profit(m, i) for i in range(m.firms))


def _clamp(m: Market, i: int, p: Fraction) -> Fraction:
    return min(max(p, m.costs[i]), max(m.value_cap, m.costs[i]))


def price_grid(m: Market, i: int) -> list[Fraction]:
    """Own cost, every valuation, and one pass of pairwise indifference prices."""
    base = [{m.costs[j]} | {_clamp(m, j, t.values[j]) for t in m.types} for j in range(m.firms)]
    grid = set(base[i])
    for t in m.types:
        for j in range(m.firms):
            if j == i:
                continue
            for pj in base[j]:
                grid.add(_clamp(m, i, t.values[i] - (t.values[j] - pj)))
    return sorted(grid)


def find_unsegmented_pure_equilibria(
    m: Market, max_profiles: int = 200_000
) -> list[BenchmarkEquilibrium]:
    """Pure uniform-price equilibria of the unsegmented market found on a price grid.

    An empty list means none was found on the grid; mixed equilibria may
    still exist.

    Raises:
        GridTooLarge: if the grid has more than ``max_profiles`` profiles.
    """
    grids = [price_grid(m, i) for i in range(m.firms)]
    size = 1
    for g in grids:
        size *= len(g)
    if size > max_profiles:
        raise GridTooLarge(f"{size} price profiles exceed the budget of {max_profiles}")
    log.debug("searching %d unsegmented price profiles", size)

    policies = [LOWEST_INDEX] + [never_favor(i) for i in range(m.firms)]
    found = []
    for prices in itertools.product(*grids):
        for policy in policies:
            cand = unsegmented_candidate(m, prices, policy)
            if verify_public_equilibrium(cand).passed:
                _, shunned = parse_tie_policy(policy, m.firms)
                out = settle(m, cand.segments, [prices], [None], shunned=shunned)
                found.append(BenchmarkEquilibrium(tuple(prices), policy, out.profits))
    found.sort(key=lambda b: (b.prices, b.tie_policy))
    return found


def min_trade_surplus(m: Market) -> Fraction:
    return min(m.surplus(t, i) for t in range(len(m.types)) for i in range(m.firms))


def compare_to_benchmark(
    m: Market, unseg: BenchmarkEquilibrium, s: SigmaStar
) -> ComparisonReport:
    """Compare benchmark profits with profits under the designed segmentation.

    When every type has positive surplus with every firm, each firm must be
    strictly worse off under the design; a violation raises InvariantBreach.

    Raises:
        UnverifiedBenchmark: the benchmark is not an unsegmented equilibrium.
        NonpositiveBenchmarkProfit: some firm earns nothing in the benchmark.
    """
    if not verify_public_equilibrium(unsegmented_candidate(m, unseg.prices, unseg.tie_policy)).passed:
        raise UnverifiedBenchmark(f"prices {[str(p) for p in unseg.prices]} are not an equilibrium")
    if any(p <= 0 for p in unseg.profits):
        raise NonpositiveBenchmarkProfit(
            f"benchmark profits {[str(p) for p in unseg.profits]} are not all positive"
        )
    star = supported_equilibrium(s).profits
    rows = tuple(FirmComparison(i, unseg.profits[i], star[i]) for i in range(m.firms))
    report = ComparisonReport(unseg, min_trade_surplus(m), rows)
    if report.covered and not report.all_strictly_worse:
        raise InvariantBreach("a firm is not strictly worse off despite positive trade surplus")
    return report
