"""Extremal monopoly markets and uniform-profit-preserving segmentations.

An extremal market leaves the seller indifferent between every price in its
support. :func:`greedy_decompose` repeatedly peels the largest feasible
multiple of the extremal market on the current residual support off a
one-dimensional market, which yields a segmentation in which the uniform
monopoly price stays optimal in every segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from segforge.errors import InvariantBreach, StarPriceNotOptimal, SupportAtOrBelowCost
from segforge.market import GapPoint, WMarket, revenue, uniform_monopoly_price


@dataclass(frozen=True)
class ExtremalWMarket:
    support: tuple[Fraction, ...]
    masses: tuple[Fraction, ...]
    cost: Fraction

    @property
    def level(self) -> Fraction:
        """Common revenue earned at every support price."""
        return self.support[0] - self.cost

    def mass_at(self, w: Fraction) -> Fraction:
        for s, f in zip(self.support, self.masses):
            if s == w:
                return f
        return Fraction(0)

    def revenue(self, price: Fraction) -> Fraction:
        demand = sum((f for s, f in zip(self.support, self.masses) if s >= price), Fraction(0))
        return (price - self.cost) * demand

    def as_wmarket(self) -> WMarket:
        return WMarket(
            cost=self.cost,
            points=tuple(GapPoint(s, f) for s, f in zip(self.support, self.masses)),
        )


@dataclass(frozen=True)
class WSegment:
    weight: Fraction
    market: ExtremalWMarket


@dataclass(frozen=True)
class WSegmentation:
    segments: tuple[WSegment, ...]
    parent: WMarket
    star_price: Fraction


@dataclass
class ExtremalReport:
    passed: bool
    failure: str | None = None
    checks: list[str] = field(default_factory=list)


def extremal_market(support: Sequence[Fraction], cost: Fraction) -> ExtremalWMarket:
    """Unit-mass market on ``support`` whose revenue is flat across the support.

    Indifference forces the survival function ``F_j = (s_1 - c) / (s_j - c)``;
    masses are its successive differences.
    """
    s = tuple(Fraction(x) for x in support)
    cost = Fraction(cost)
    if not s:
        raise SupportAtOrBelowCost("support must be nonempty")
    if any(b <= a for a, b in zip(s, s[1:])):
        raise ValueError(f"support must be strictly increasing: {[str(x) for x in s]}")
    if s[0] <= cost:
        raise SupportAtOrBelowCost(f"support point {s[0]} is not above cost {cost}")
    survival = [(s[0] - cost) / (x - cost) for x in s] + [Fraction(0)]
    masses = tuple(survival[j] - survival[j + 1] for j in range(len(s)))
    return ExtremalWMarket(support=s, masses=masses, cost=cost)


def _is_optimal(wm: WMarket, price: Fraction) -> bool:
    return revenue(wm, price) == uniform_monopoly_price(wm).profit


def _check_residual(residual: dict[Fraction, Fraction], cost: Fraction, star: Fraction) -> None:
    wm = WMarket(cost=cost, points=tuple(GapPoint(w, residual[w]) for w in sorted(residual)))
    if residual.get(star, Fraction(0)) <= 0:
        raise InvariantBreach(f"star price {star} dropped out of the residual support")
    if not _is_optimal(wm, star):
        raise InvariantBreach(f"star price {star} is no longer optimal for the residual")


def greedy_decompose(wm: WMarket, star_price: Fraction, check: bool = False) -> WSegmentation:
    """Split ``wm`` into extremal markets, each keeping ``star_price`` optimal.

    Each round builds the extremal market on the full residual support, scales
    it by the largest factor that keeps the residual non-negative, and
    subtracts. At least one point is exhausted per round, so the number of
    segments never exceeds the number of distinct gaps.

    Args:
        wm: one-dimensional market (unnormalized).
        star_price: an optimal uniform price of ``wm``.
        check: re-verify the residual invariants after every round.

    Raises:
        StarPriceNotOptimal: if ``star_price`` does not maximize revenue.
    """
    star_price = Fraction(star_price)
    if not wm.points or not _is_optimal(wm, star_price) or wm.mass_at(star_price) == 0:
        raise StarPriceNotOptimal(f"{star_price} is not an optimal uniform price")

    residual = {p.w: p.mass for p in wm.points}
    segments = []
    while residual:
        if check:
            _check_residual(residual, wm.cost, star_price)
        ext = extremal_market(sorted(residual), wm.cost)
        alpha = min(residual[s] / f for s, f in zip(ext.support, ext.masses))
        segments.append(WSegment(weight=alpha, market=ext))
        for s, f in zip(ext.support, ext.masses):
            left = residual[s] - alpha * f
            if left == 0:
                del residual[s]
            else:
                residual[s] = left
        if len(segments) > len(wm.points):
            raise InvariantBreach("greedy decomposition did not terminate in time")
    return WSegmentation(segments=tuple(segments), parent=wm, star_price=star_price)


def verify_extremal_segmentation(ws: WSegmentation) -> ExtremalReport:
    """Re-check a segmentation from scratch; stops at the first violated condition."""
    report = ExtremalReport(passed=True)

    def fail(msg: str) -> ExtremalReport:
        report.passed = False
        report.failure = msg
        return report

    parent, star = ws.parent, ws.star_price
    probes = set(parent.support) | {star}

    total_weight = sum((seg.weight for seg in ws.segments), Fraction(0))
    if total_weight != parent.total_mass:
        return fail(f"weights sum to {total_weight}, parent mass is {parent.total_mass}")
    for w in sorted(probes | {s for seg in ws.segments for s in seg.market.support}):
        combined = sum((seg.weight * seg.market.mass_at(w) for seg in ws.segments), Fraction(0))
        if combined != parent.mass_at(w):
            return fail(f"plausibility fails at gap {w}: {combined} != {parent.mass_at(w)}")
    report.checks.append("plausibility")

    for k, seg in enumerate(ws.segments):
        y = seg.market
        if seg.weight <= 0:
            return fail(f"segment {k}: non-positive weight {seg.weight}")
        if any(f <= 0 for f in y.masses) or sum(y.masses) != 1:
            return fail(f"segment {k}: masses must be positive and sum to 1")
        if any(s <= y.cost for s in y.support):
            return fail(f"segment {k}: support point at or below cost")
        levels = {y.revenue(s) for s in y.support}
        if len(levels) != 1:
            return fail(f"segment {k}: revenue not constant on support")
        (level,) = levels
        for p in sorted(probes):
            if p not in y.support and p > y.cost and y.revenue(p) >= level:
                return fail(f"segment {k}: price {p} outside the support is also optimal")
        if star not in y.support:
            return fail(f"segment {k}: star price {star} not in support")
    report.checks.append("per-segment extremality")
    return report
