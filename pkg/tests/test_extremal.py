from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import revenue, solve_indifference
from segforge.errors import StarPriceNotOptimal, SupportAtOrBelowCost
from segforge.extremal import (
    WSegment,
    WSegmentation,
    extremal_market,
    greedy_decompose,
    verify_extremal_segmentation,
)
from segforge.market import WMarket, uniform_monopoly_price


def test_extremal_two_points():
    assert extremal_market([F(2), F(6)], F(0)).masses == (F(2, 3), F(1, 3))


def test_extremal_point_mass():
    assert extremal_market([F(5)], F(3)).masses == (F(1),)


def test_extremal_three_points():
    ext = extremal_market([F(1), F(2), F(3)], F(0))
    assert ext.masses == (F(1, 2), F(1, 6), F(1, 3))
    assert ext.masses == solve_indifference([F(1), F(2), F(3)], F(0))
    assert {ext.revenue(s) for s in ext.support} == {F(1)}


def test_extremal_with_cost_matches_linear_solve():
    support = [F(3, 2), F(7, 3), F(5)]
    assert extremal_market(support, F(1)).masses == solve_indifference(support, F(1))


def test_extremal_rejects_support_at_cost():
    with pytest.raises(SupportAtOrBelowCost):
        extremal_market([F(1), F(2)], F(1))


def test_greedy_vertical():
    wm = WMarket.from_masses(0, {2: "1/2", 6: "1/2"})
    ws = greedy_decompose(wm, F(6), check=True)
    assert [s.weight for s in ws.segments] == [F(3, 4), F(1, 4)]
    assert ws.segments[0].market.support == (2, 6)
    assert ws.segments[0].market.masses == (F(2, 3), F(1, 3))
    assert ws.segments[1].market.support == (6,)


def test_greedy_point_mass():
    ws = greedy_decompose(WMarket.from_masses(0, {5: "2/5"}), F(5))
    assert len(ws.segments) == 1
    assert ws.segments[0].weight == F(2, 5)
    assert ws.segments[0].market.masses == (1,)


def test_greedy_three_gaps():
    # hand run: alpha = min(6/5, 3/10, 21/20) = 3/10, then min(27/40, 3/4) = 27/40, then 1/40
    wm = WMarket.from_masses(0, {1: "3/5", 2: "1/20", 3: "7/20"})
    ws = greedy_decompose(wm, F(3), check=True)
    assert [s.weight for s in ws.segments] == [F(3, 10), F(27, 40), F(1, 40)]
    assert [s.market.support for s in ws.segments] == [(1, 2, 3), (1, 3), (3,)]
    assert ws.segments[0].market.masses == (F(1, 2), F(1, 6), F(1, 3))
    assert ws.segments[1].market.masses == (F(2, 3), F(1, 3))
    for w in (1, 2, 3):
        assert sum(s.weight * s.market.mass_at(F(w)) for s in ws.segments) == wm.mass_at(F(w))
    assert verify_extremal_segmentation(ws).passed


def test_greedy_rejects_suboptimal_star():
    wm = WMarket.from_masses(0, {2: "1/2", 6: "1/2"})
    with pytest.raises(StarPriceNotOptimal):
        greedy_decompose(wm, F(2))
    with pytest.raises(StarPriceNotOptimal):
        greedy_decompose(wm, F(5))


def test_greedy_accepts_any_tied_optimum():
    wm = WMarket.from_masses(0, {2: "1/2", 4: "1/2"})
    for star in (F(2), F(4)):
        assert verify_extremal_segmentation(greedy_decompose(wm, star, check=True)).passed


def test_verify_rejects_point_mass_split():
    wm = WMarket.from_masses(0, {2: "1/2", 6: "1/2"})
    split = WSegmentation(
        segments=(
            WSegment(F(1, 2), extremal_market([F(2)], F(0))),
            WSegment(F(1, 2), extremal_market([F(6)], F(0))),
        ),
        parent=wm,
        star_price=F(6),
    )
    rep = verify_extremal_segmentation(split)
    assert not rep.passed
    assert "not in support" in rep.failure


def test_verify_rejects_perturbed_mass():
    wm = WMarket.from_masses(0, {2: "1/2", 6: "1/2"})
    ws = greedy_decompose(wm, F(6))
    first = ws.segments[0].market
    bad = type(first)(first.support, (first.masses[0] + F(1, 1000), first.masses[1]), first.cost)
    broken = WSegmentation((WSegment(ws.segments[0].weight, bad),) + ws.segments[1:], wm, F(6))
    rep = verify_extremal_segmentation(broken)
    assert not rep.passed
    assert "plausibility" in rep.failure


gap_markets = st.dictionaries(
    st.fractions(min_value=F(1, 12), max_value=10, max_denominator=12),
    st.integers(min_value=1, max_value=12),
    min_size=1,
    max_size=7,
)


@settings(max_examples=300, deadline=None)
@given(gap_markets, st.sampled_from([F(0), F(1, 24), F(1, 13)]))
def test_greedy_properties(raw, cost):
    total = sum(raw.values())
    wm = WMarket.from_masses(cost, {w: F(q, total) for w, q in raw.items() if w > cost} or {cost + 1: 1})
    star = uniform_monopoly_price(wm)
    ws = greedy_decompose(wm, star.price, check=True)

    assert len(ws.segments) <= len(wm.points)
    assert verify_extremal_segmentation(ws).passed
    pts = {p.w: p.mass for p in wm.points}
    for w, q in pts.items():
        assert sum(s.weight * s.market.mass_at(w) for s in ws.segments) == q
    for seg in ws.segments:
        y = dict(zip(seg.market.support, seg.market.masses))
        low = min(y)
        # lowest support price is optimal and earns what the star price earns
        assert revenue(y, cost, low) == revenue(y, cost, star.price)
        probes = list(pts) + [(a + b) / 2 for a, b in zip(sorted(pts), sorted(pts)[1:])]
        assert all(revenue(y, cost, p) <= revenue(y, cost, low) for p in probes)
    # total profit at the star price is preserved
    assert sum(s.weight * revenue(dict(zip(s.market.support, s.market.masses)), cost, star.price)
               for s in ws.segments) == star.profit
