from dataclasses import replace
from fractions import Fraction as F

from marketgen import random_markets
from segforge.designer import (
    SigmaStar,
    check_plausibility,
    consumer_choice,
    design_sigma_star,
    supported_equilibrium,
)
from segforge.market import efficient_surplus, validate_market, willingness_gap


def rows(s):
    return sorted((seg.weight, seg.composition, seg.owner) for seg in s.segments)


def test_design_vertical(vertical_market):
    s = design_sigma_star(vertical_market)
    assert [(seg.weight, seg.composition) for seg in s.segments] == [
        (F(3, 4), (F(1, 3), F(2, 3))),
        (F(1, 4), (F(1), F(0))),
    ]
    assert s.per_firm[0].star_price == 6 and s.per_firm[0].star_profit == 3
    assert 1 not in s.per_firm


def test_design_horizontal(horizontal_market):
    s = design_sigma_star(horizontal_market)
    third, two3 = F(1, 3), F(2, 3)
    assert rows(s) == sorted([
        (F(3, 8), (third, two3, F(0), F(0)), 0),
        (F(1, 8), (F(1), F(0), F(0), F(0)), 0),
        (F(1, 8), (F(0), F(0), F(0), F(1)), 1),
        (F(3, 8), (F(0), F(0), two3, third), 1),
    ])


def test_design_single_type():
    m = validate_market({"firms": 2, "costs": [0, 0], "types": [{"values": [4, 1], "mass": 1}]})
    s = design_sigma_star(m)
    assert len(s.segments) == 1 and s.segments[0].weight == 1
    out = supported_equilibrium(s)
    # rival at cost leaves the consumer surplus 1, so the gap is 4 - 1 = 3
    assert out.segments[0].prices == (3, 0)
    assert out.profits == (3, 0)
    assert out.consumer_surplus == 1


def test_residual_segment_last():
    m = validate_market({"firms": 2, "costs": [0, 0], "types": [
        {"values": [4, 2], "mass": "1/3"}, {"values": [2, 4], "mass": "1/3"}, {"values": [3, 3], "mass": "1/3"}]})
    s = design_sigma_star(m)
    assert s.segments[-1].owner is None
    assert s.segments[-1].weight == F(1, 3)
    assert s.segments[-1].composition == (0, 0, 1)
    out = supported_equilibrium(s)
    assert out.segments[-1].prices == (0, 0)
    assert out.segments[-1].allocation == {2: 0}


def test_no_residual_segment_when_empty(horizontal_market):
    assert all(seg.owner is not None for seg in design_sigma_star(horizontal_market).segments)


def test_lift_splits_shared_gap_by_type_mass():
    # types 0 and 1 both have gap 4 for firm 0; their 1:3 ratio is kept in every segment
    m = validate_market({"firms": 2, "costs": [0, 0], "types": [
        {"values": [5, 1], "mass": "1/8"}, {"values": [6, 2], "mass": "3/8"},
        {"values": [8, 1], "mass": "1/2"}]})
    s = design_sigma_star(m)
    assert willingness_gap(m, 0, 0) == willingness_gap(m, 0, 1) == 4
    for seg in s.segments:
        if seg.composition[0] or seg.composition[1]:
            assert seg.composition[1] == 3 * seg.composition[0]
    assert check_plausibility(s)


def test_supported_equilibrium_vertical(vertical_market):
    out = supported_equilibrium(design_sigma_star(vertical_market))
    assert [so.prices for so in out.segments] == [(2, 0), (6, 0)]
    assert out.profits == (3, 0)
    assert out.consumer_surplus == 2
    assert out.total_surplus == 5
    assert out.efficient


def test_supported_equilibrium_horizontal(horizontal_market):
    out = supported_equilibrium(design_sigma_star(horizontal_market))
    assert out.profits == (F(3, 2), F(3, 2))
    assert out.consumer_surplus == 2
    assert out.efficient


def test_plausibility_examples(vertical_market, horizontal_market):
    for m in (vertical_market, horizontal_market):
        s = design_sigma_star(m)
        assert check_plausibility(s)
        halved = replace(s.segments[0], weight=s.segments[0].weight / 2)
        broken = SigmaStar((halved,) + s.segments[1:], s.parent, s.partition, s.per_firm)
        assert not check_plausibility(broken)


def test_consumer_choice_tie_rules(horizontal_market):
    m = horizontal_market
    p = (F(7), F(7))
    # type (7,1): firm 0 gives 0, outside gives 0 -> firms preferred to not buying
    assert consumer_choice(m, 0, p) == 0
    assert consumer_choice(m, 0, p, shunned=0) is None
    # type (3,1) at prices (2,0): 1 vs 1 tie
    assert consumer_choice(m, 1, (F(2), F(0))) == 0
    assert consumer_choice(m, 1, (F(2), F(0)), favored=1) == 1
    assert consumer_choice(m, 1, (F(2), F(0)), shunned=0) == 1
    assert consumer_choice(m, 1, (F(7), F(7))) is None


def test_random_design_properties():
    for m in random_markets(300, offset=2):
        s = design_sigma_star(m)
        out = supported_equilibrium(s)
        assert check_plausibility(s)
        assert out.total_surplus == efficient_surplus(m)
        assert sum(out.profits) + out.consumer_surplus == out.total_surplus
        for i in range(m.firms):
            star = s.per_firm[i].star_profit if i in s.per_firm else 0
            assert out.profits[i] == star
        assert out.consumer_surplus == efficient_surplus(m) - sum(
            fd.star_profit for fd in s.per_firm.values()
        )
        # charging the star price in every owned segment earns the same as the lowest gap
        for seg in s.segments:
            if seg.owner is None:
                continue
            y = seg.gap_market
            assert y.revenue(s.per_firm[seg.owner].star_price) == y.revenue(y.support[0])
