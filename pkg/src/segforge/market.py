"""Finite-type differentiated-products markets.

A market is a finite list of consumer types. Each type carries one valuation
per firm and a probability mass. Everything is kept as exact ``Fraction``
values; no floating point enters any computation in this module.

The outside option (not buying) is treated as a pseudo-firm with value 0 and
cost 0 whenever competing surpluses are compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from segforge.errors import (
    DuplicateType,
    EmptyCell,
    FewerThanTwoFirms,
    MalformedMarket,
    MassSumMismatch,
    NonPositiveSurplusType,
    ValueAboveCap,
)

def to_fraction(x: object) -> Fraction:
    """Convert an int, Fraction or rational string ("3/4", "7") to a Fraction.

    Binary floats are refused so that no rounding can sneak in.
    """
    if isinstance(x, bool):
        raise MalformedMarket(f"boolean is not a rational: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise MalformedMarket(f"binary float {x!r} not accepted; write it as a string like '1/2'")
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedMarket(f"cannot parse rational {x!r}") from exc
    raise MalformedMarket(f"cannot interpret {x!r} as a rational")


@dataclass(frozen=True)
class ConsumerType:
    values: tuple[Fraction, ...]
    mass: Fraction


@dataclass(frozen=True)
class Market:
    """A validated market. Build it with :func:`validate_market`."""

    costs: tuple[Fraction, ...]
    types: tuple[ConsumerType, ...]
    value_cap: Fraction

    @property
    def firms(self) -> int:
        return len(self.costs)

    def surplus(self, t: int, i: int) -> Fraction:
        """Trade surplus ``v_i - c_i`` of type ``t`` with firm ``i``."""
        return self.types[t].values[i] - self.costs[i]

    def best_surplus(self, t: int) -> Fraction:
        return max(self.surplus(t, i) for i in range(self.firms))

    def rival_surplus(self, t: int, i: int) -> Fraction:
        """Best surplus type ``t`` gets away from firm ``i`` (outside option included)."""
        return max(
            [Fraction(0)] + [self.surplus(t, j) for j in range(self.firms) if j != i]
        )

    def with_costs(self, costs: Sequence[object]) -> "Market":
        return validate_market(
            {
                "firms": self.firms,
                "costs": list(costs),
                "value_cap": self.value_cap,
                "types": [{"values": list(t.values), "mass": t.mass} for t in self.types],
            }
        )


@dataclass(frozen=True)
class DominancePartition:
    cells: tuple[tuple[int, ...], ...]
    residual: tuple[int, ...]
    cell_mass: tuple[Fraction, ...]
    residual_mass: Fraction

    def owner_of(self, t: int) -> int | None:
        for i, cell in enumerate(self.cells):
            if t in cell:
                return i
        return None


@dataclass(frozen=True)
class GapPoint:
    w: Fraction
    mass: Fraction


@dataclass(frozen=True)
class WMarket:
    """One-dimensional monopoly market of willingness gaps for a single firm.

    ``total_mass`` is the unnormalized mass of the firm's cell.
    """

    cost: Fraction
    points: tuple[GapPoint, ...]

    @property
    def total_mass(self) -> Fraction:
        return sum((p.mass for p in self.points), Fraction(0))

    @property
    def support(self) -> tuple[Fraction, ...]:
        return tuple(p.w for p in self.points)

    def mass_at(self, w: Fraction) -> Fraction:
        for p in self.points:
            if p.w == w:
                return p.mass
        return Fraction(0)

    @classmethod
    def from_masses(cls, cost: object, masses: Mapping[object, object]) -> "WMarket":
        pts = sorted((to_fraction(w), to_fraction(m)) for w, m in masses.items())
        for w, m in pts:
            if m <= 0:
                raise ValueError(f"gap {w} has non-positive mass {m}")
        return cls(cost=to_fraction(cost), points=tuple(GapPoint(w, m) for w, m in pts))


@dataclass(frozen=True)
class MonopolyPrice:
    price: Fraction
    profit: Fraction


def validate_market(raw: Mapping[str, object]) -> Market:
    """Build a :class:`Market` from a parsed description.

    ``raw`` holds ``firms``, ``costs``, ``types`` (each with ``values`` and
    ``mass``) and optionally ``value_cap``; a missing cap defaults to the
    largest valuation present. Masses must already sum to exactly 1.

    Raises:
        FewerThanTwoFirms, MalformedMarket, MassSumMismatch, ValueAboveCap,
        DuplicateType, NonPositiveSurplusType
    """
    try:
        costs = tuple(to_fraction(c) for c in raw["costs"])  # type: ignore[union-attr]
        raw_types = list(raw["types"])  # type: ignore[arg-type]
    except KeyError as exc:
        raise MalformedMarket(f"missing field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise MalformedMarket(str(exc)) from exc

    n = raw.get("firms", len(costs))
    if isinstance(n, bool) or not isinstance(n, int):
        raise MalformedMarket(f"firms must be an integer, got {n!r}")
    if n < 2:
        raise FewerThanTwoFirms(f"need at least 2 firms, got {n}")
    if len(costs) != n:
        raise MalformedMarket(f"expected {n} costs, got {len(costs)}")
    if any(c < 0 for c in costs):
        raise MalformedMarket(f"costs must be non-negative: {[str(c) for c in costs]}")
    if not raw_types:
        raise MalformedMarket("market has no consumer types")

    types = []
    for k, entry in enumerate(raw_types):
        try:
            values = tuple(to_fraction(v) for v in entry["values"])
            mass = to_fraction(entry["mass"])
        except (KeyError, TypeError) as exc:
            raise MalformedMarket(f"type {k}: needs 'values' and 'mass'") from exc
        if len(values) != n:
            raise MalformedMarket(f"type {k}: expected {n} values, got {len(values)}")
        if mass <= 0:
            raise MalformedMarket(f"type {k}: mass must be positive, got {mass}")
        if max(v - c for v, c in zip(values, costs)) <= 0:
            raise NonPositiveSurplusType(f"type {k} has no firm with positive surplus")
        types.append(ConsumerType(values, mass))

    cap_raw = raw.get("value_cap")
    cap = to_fraction(cap_raw) if cap_raw is not None else max(max(t.values) for t in types)
    if cap <= 0:
        raise MalformedMarket(f"value_cap must be positive, got {cap}")

    total = sum((t.mass for t in types), Fraction(0))
    if total != 1:
        raise MassSumMismatch(f"masses sum to {total}, not 1")

    seen: dict[tuple[Fraction, ...], int] = {}
    for k, t in enumerate(types):
        if max(t.values) > cap:
            raise ValueAboveCap(f"type {k} has a value above cap {cap}")
        if t.values in seen:
            raise DuplicateType(f"types {seen[t.values]} and {k} coincide")
        seen[t.values] = k

    return Market(costs=costs, types=tuple(types), value_cap=cap)


def partition_by_dominance(m: Market) -> DominancePartition:
    """Assign each type to the unique firm with the strictly largest surplus.

    Types where the maximal surplus is shared by two or more firms go to the
    residual.
    """
    cells: list[list[int]] = [[] for _ in range(m.firms)]
    residual = []
    for t in range(len(m.types)):
        owner = None
        for i in range(m.firms):
            if m.surplus(t, i) > m.rival_surplus(t, i):
                owner = i
                break
        if owner is None:
            residual.append(t)
        else:
            cells[owner].append(t)
    cell_mass = tuple(sum((m.types[t].mass for t in c), Fraction(0)) for c in cells)
    return DominancePartition(
        cells=tuple(tuple(c) for c in cells),
        residual=tuple(residual),
        cell_mass=cell_mass,
        residual_mass=sum((m.types[t].mass for t in residual), Fraction(0)),
    )


def willingness_gap(m: Market, i: int, t: int) -> Fraction:
    """``v_i`` minus the best competing surplus when all rivals price at cost."""
    return m.types[t].values[i] - m.rival_surplus(t, i)


def reduce_to_monopoly(m: Market, p: DominancePartition, i: int) -> WMarket:
    if p.cell_mass[i] == 0:
        raise EmptyCell(f"firm {i} dominates no consumer type")
    masses: dict[Fraction, Fraction] = {}
    for t in p.cells[i]:
        w = willingness_gap(m, i, t)
        masses[w] = masses.get(w, Fraction(0)) + m.types[t].mass
    return WMarket(
        cost=m.costs[i],
        points=tuple(GapPoint(w, masses[w]) for w in sorted(masses)),
    )


def monopoly_demand(wm: WMarket, price: Fraction) -> Fraction:
    """Mass of gaps at or above ``price`` (left-continuous step function)."""
    return sum((pt.mass for pt in wm.points if pt.w >= price), Fraction(0))


def revenue(wm: WMarket, price: Fraction) -> Fraction:
    return (price - wm.cost) * monopoly_demand(wm, price)


def uniform_monopoly_price(wm: WMarket) -> MonopolyPrice:
    """Smallest revenue-maximizing uniform price and the resulting profit.

    The objective increases linearly between consecutive support points, so
    scanning the support is enough.
    """
    if not wm.points:
        raise EmptyCell("monopoly market has no support")
    best_price, best_profit = None, None
    for w in wm.support:
        r = revenue(wm, w)
        if best_profit is None or r > best_profit:
            best_price, best_profit = w, r
    return MonopolyPrice(price=best_price, profit=best_profit)


def efficient_surplus(m: Market) -> Fraction:
    return sum((t.mass * m.best_surplus(k) for k, t in enumerate(m.types)), Fraction(0))

