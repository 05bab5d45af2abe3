import json
from fractions import Fraction as F

import pytest

from marketgen import random_markets
from segforge.designer import design_sigma_star
from segforge.documents import (
    candidate_from_doc,
    candidate_to_doc,
    dumps,
    market_from_doc,
    market_to_doc,
    read_market,
)
from segforge.errors import InputError, MalformedCandidate
from segforge.report import decimal6, fmt
from segforge.verifier import candidate_from_design


@pytest.mark.parametrize("name", ["vertical.json", "horizontal.json", "captive.json", "three_firms.json"])
def test_canonical_documents_round_trip_bytes(markets_dir, name):
    text = (markets_dir / name).read_text()
    assert dumps(market_to_doc(read_market(markets_dir / name))) == text


def test_objects_round_trip():
    for m in random_markets(200, offset=8):
        assert market_from_doc(json.loads(dumps(market_to_doc(m)))) == m


def test_integer_shorthand_and_lowest_terms():
    m = market_from_doc({"firms": 2, "costs": [0, "0/3"], "value_cap": "14/2",
                         "types": [{"values": [7, "2/2"], "mass": "2/2"}]})
    doc = market_to_doc(m)
    assert doc["costs"] == ["0", "0"] and doc["value_cap"] == "7"
    assert doc["types"] == [{"values": ["7", "1"], "mass": "1"}]


def test_non_object_document():
    with pytest.raises(InputError):
        market_from_doc([1, 2])


def test_candidate_round_trip(horizontal_market):
    cand = candidate_from_design(design_sigma_star(horizontal_market))
    assert candidate_from_doc(horizontal_market, json.loads(dumps(candidate_to_doc(cand)))) == cand


@pytest.mark.parametrize("doc", [
    {}, {"segments": [{"weight": "1"}]}, {"segments": [{"weight": 0.5, "composition": [], "prices": []}]},
    {"segments": [{"weight": "1", "composition": ["1/2", "1/2"], "prices": [0, 0], "owner": "a"}]},
    {"segments": [], "tie_policy": 3},
])
def test_bad_candidate_documents(vertical_market, doc):
    with pytest.raises(MalformedCandidate):
        candidate_from_doc(vertical_market, doc)


def test_rational_display():
    assert fmt(F(3, 4)) == "3/4 (0.750000)"
    assert decimal6(F(1, 3)) == "0.333333"
    assert decimal6(F(2, 3)) == "0.666667"
    assert fmt(F(-6)) == "-6 (-6.000000)"
