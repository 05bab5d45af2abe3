"""Consumer-optimal public segmentation over the type space.

The market is first sliced by dominant firm. Each firm's slice is reduced to
its one-dimensional gap market, split into extremal segments, and lifted back
to consumer types. Types without a unique dominant firm form one residual
segment in which every firm prices at cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from segforge.errors import InvariantBreach
from segforge.extremal import ExtremalWMarket, WSegmentation, greedy_decompose
from segforge.market import (
    DominancePartition,
    Market,
    WMarket,
    efficient_surplus,
    partition_by_dominance,
    reduce_to_monopoly,
    uniform_monopoly_price,
    willingness_gap,
)


@dataclass(frozen=True)
class TypeSegment:
    """One public segment.

    ``composition`` is the conditional distribution over all market types
    (zeros included). ``owner`` is the dominant firm, or None for the residual.
    """

    weight: Fraction
    composition: tuple[Fraction, ...]
    owner: int | None
    gap_market: ExtremalWMarket | None = None

    def support(self) -> tuple[int, ...]:
        return tuple(t for t, q in enumerate(self.composition) if q > 0)


@dataclass(frozen=True)
class FirmDesign:
    star_price: Fraction
    star_profit: Fraction
    w_market: WMarket
    w_segmentation: WSegmentation


@dataclass(frozen=True)
class SigmaStar:
    segments: tuple[TypeSegment, ...]
    parent: Market
    partition: DominancePartition
    per_firm: dict[int, FirmDesign]


@dataclass(frozen=True)
class SegmentOutcome:
    prices: tuple[Fraction, ...]
    # type index -> chosen firm (None = outside option); positive-mass types only
    allocation: dict[int, int | None]


@dataclass(frozen=True)
class EquilibriumOutcome:
    segments: tuple[SegmentOutcome, ...]
    profits: tuple[Fraction, ...]
    consumer_surplus: Fraction
    total_surplus: Fraction
    efficient: bool


def design_sigma_star(m: Market, check: bool = False) -> SigmaStar:
    """Build the consumer-optimal segmentation of ``m``.

    Segments are ordered by owning firm, then by greedy round; the residual
    segment (if any) comes last.
    """
    part = partition_by_dominance(m)
    k = len(m.types)
    segments: list[TypeSegment] = []
    per_firm: dict[int, FirmDesign] = {}
    for i in range(m.firms):
        if part.cell_mass[i] == 0:
            continue
        wm = reduce_to_monopoly(m, part, i)
        star = uniform_monopoly_price(wm)
        ws = greedy_decompose(wm, star.price, check=check)
        per_firm[i] = FirmDesign(star.price, star.profit, wm, ws)

        # conditional type distribution given each gap value
        by_gap: dict[Fraction, list[int]] = {}
        for t in part.cells[i]:
            by_gap.setdefault(willingness_gap(m, i, t), []).append(t)
        for seg in ws.segments:
            comp = [Fraction(0)] * k
            for w, f in zip(seg.market.support, seg.market.masses):
                at_w = wm.mass_at(w)
                for t in by_gap[w]:
                    comp[t] = f * m.types[t].mass / at_w
            segments.append(TypeSegment(seg.weight, tuple(comp), i, seg.market))

    if part.residual_mass > 0:
        comp = [Fraction(0)] * k
        for t in part.residual:
            comp[t] = m.types[t].mass / part.residual_mass
        segments.append(TypeSegment(part.residual_mass, tuple(comp), None))

    return SigmaStar(tuple(segments), m, part, per_firm)


def check_plausibility(s: SigmaStar) -> bool:
    """Exact check that segment compositions average back to the parent masses."""
    for t, ctype in enumerate(s.parent.types):
        total = sum((seg.weight * seg.composition[t] for seg in s.segments), Fraction(0))
        if total != ctype.mass:
            return False
    return True


def consumer_choice(
    m: Market, t: int, prices: tuple[Fraction, ...], favored: int | None = None,
    shunned: int | None = None,
) -> int | None:
    """Firm chosen by type ``t`` facing ``prices``; None means not buying.

    Off ties the choice is forced. On ties: ``favored`` wins if tied; firms
    are preferred to the outside option; ``shunned`` loses whenever another
    option is tied; otherwise the lowest firm index wins.
    """
    values = m.types[t].values
    best = max([Fraction(0)] + [values[i] - prices[i] for i in range(m.firms)])
    tied = [i for i in range(m.firms) if values[i] - prices[i] == best]
    outside_ties = best == 0
    if shunned is not None and shunned in tied and (len(tied) > 1 or outside_ties):
        tied.remove(shunned)
    if not tied:
        return None
    if favored is not None and favored in tied:
        return favored
    return tied[0]


def settle(
    m: Market, segments, prices_per_segment, favored_per_segment, shunned: int | None = None
) -> EquilibriumOutcome:
    """Allocation and surplus accounting for given per-segment prices.

    ``segments`` needs ``weight`` and ``composition`` attributes.
    """
    profits = [Fraction(0)] * m.firms
    cs = Fraction(0)
    outcomes = []
    for seg, prices, favored in zip(segments, prices_per_segment, favored_per_segment):
        alloc: dict[int, int | None] = {}
        for t, q in enumerate(seg.composition):
            if q == 0:
                continue
            j = consumer_choice(m, t, prices, favored=favored, shunned=shunned)
            alloc[t] = j
            if j is not None:
                mass = seg.weight * q
                profits[j] += mass * (prices[j] - m.costs[j])
                cs += mass * (m.types[t].values[j] - prices[j])
        outcomes.append(SegmentOutcome(tuple(prices), alloc))
    ts = sum(profits, Fraction(0)) + cs
    return EquilibriumOutcome(
        segments=tuple(outcomes),
        profits=tuple(profits),
        consumer_surplus=cs,
        total_surplus=ts,
        efficient=ts == efficient_surplus(m),
    )


def segment_prices(s: SigmaStar, seg: TypeSegment) -> tuple[Fraction, ...]:
    """Owner charges the lowest gap in its segment; everyone else prices at cost."""
    prices = list(s.parent.costs)
    if seg.owner is not None:
        prices[seg.owner] = seg.gap_market.support[0]
    return tuple(prices)


def supported_equilibrium(s: SigmaStar) -> EquilibriumOutcome:
    """Equilibrium supported by ``s``, with ties broken toward each segment's owner."""
    m = s.parent
    out = settle(
        m,
        s.segments,
        [segment_prices(s, seg) for seg in s.segments],
        [seg.owner for seg in s.segments],
    )
    for seg, so in zip(s.segments, out.segments):
        for t, j in so.allocation.items():
            if seg.owner is not None and j != seg.owner:
                raise InvariantBreach(f"type {t} did not buy from its dominant firm {seg.owner}")
            if j is None or m.surplus(t, j) != m.best_surplus(t):
                raise InvariantBreach(f"type {t} allocated inefficiently")
    return out
