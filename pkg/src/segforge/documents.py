"""JSON documents for markets, priced candidates and design output.

Rationals are written as strings in lowest terms ("3/4", "7"); integers are
accepted on input as a shorthand. Canonical form is ``json.dumps`` with
sorted keys, two-space indent and a trailing newline.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from segforge.designer import EquilibriumOutcome, SigmaStar
from segforge.errors import InputError, MalformedCandidate, MalformedMarket
from segforge.market import Market, to_fraction, validate_market
from segforge.verifier import (
    CandidateSegment,
    MinimaxEntry,
    PublicEquilibriumCandidate,
    candidate_from_design,
)


def rat(x: Fraction) -> str:
    return str(Fraction(x))


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from exc


def market_from_doc(doc: Any) -> Market:
    if not isinstance(doc, dict):
        raise MalformedMarket("market document must be a JSON object")
    return validate_market(doc)


def market_to_doc(m: Market) -> dict[str, Any]:
    return {
        "firms": m.firms,
        "costs": [rat(c) for c in m.costs],
        "value_cap": rat(m.value_cap),
        "types": [{"values": [rat(v) for v in t.values], "mass": rat(t.mass)} for t in m.types],
    }


def read_market(path: str | Path) -> Market:
    return market_from_doc(load_json(path))


def write_market(m: Market, path: str | Path) -> None:
    Path(path).write_text(dumps(market_to_doc(m)))


def candidate_from_doc(m: Market, doc: Any) -> PublicEquilibriumCandidate:
    """Parse a candidate document against market ``m``.

    Expected keys: ``segments`` (each with ``weight``, ``composition``,
    ``prices`` and optional ``owner``) and optional ``tie_policy``. Other keys
    are ignored, so a design output file is itself a valid candidate.
    """
    if not isinstance(doc, dict) or not isinstance(doc.get("segments"), list):
        raise MalformedCandidate("candidate document needs a 'segments' list")
    segs = []
    for s, raw in enumerate(doc["segments"]):
        try:
            owner = raw.get("owner")
            if owner is not None and (isinstance(owner, bool) or not isinstance(owner, int)):
                raise MalformedCandidate(f"segment {s}: owner must be an integer or null")
            segs.append(
                CandidateSegment(
                    weight=to_fraction(raw["weight"]),
                    composition=tuple(to_fraction(q) for q in raw["composition"]),
                    prices=tuple(to_fraction(p) for p in raw["prices"]),
                    owner=owner,
                )
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise MalformedCandidate(f"segment {s}: needs weight, composition, prices") from exc
        except MalformedMarket as exc:
            raise MalformedCandidate(f"segment {s}: {exc}") from exc
    policy = doc.get("tie_policy", "favor-owner")
    if not isinstance(policy, str):
        raise MalformedCandidate("tie_policy must be a string")
    return PublicEquilibriumCandidate(m, tuple(segs), policy)


def candidate_to_doc(c: PublicEquilibriumCandidate) -> dict[str, Any]:
    return {
        "tie_policy": c.tie_policy,
        "segments": [
            {
                "weight": rat(seg.weight),
                "composition": [rat(q) for q in seg.composition],
                "prices": [rat(p) for p in seg.prices],
                "owner": seg.owner,
            }
            for seg in c.segments
        ],
    }


def design_to_doc(
    s: SigmaStar, outcome: EquilibriumOutcome, minimax: tuple[MinimaxEntry, ...]
) -> dict[str, Any]:
    doc = candidate_to_doc(candidate_from_design(s))
    doc["market"] = market_to_doc(s.parent)
    doc["firms"] = [
        {
            "firm": e.firm,
            "star_price": rat(s.per_firm[e.firm].star_price) if e.firm in s.per_firm else None,
            "star_profit": rat(s.per_firm[e.firm].star_profit) if e.firm in s.per_firm else "0",
            "equilibrium_profit": rat(outcome.profits[e.firm]),
            "minimax_profit": rat(e.minimax_profit),
            "minimax_witness": rat(e.witness_price),
        }
        for e in minimax
    ]
    doc["surplus"] = {
        "consumer": rat(outcome.consumer_surplus),
        "total": rat(outcome.total_surplus),
        "efficient": outcome.efficient,
    }
    return doc
