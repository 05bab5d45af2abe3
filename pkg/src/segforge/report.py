"""Plain-text and CSV rendering of result tables.

Every rational is shown exactly and as a six-place decimal. The decimal is
for reading only and never feeds back into a computation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction


def decimal6(x: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(x.numerator) / Decimal(x.denominator)
        return str(d.quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


def fmt(x: Fraction | None) -> str:
    if x is None:
        return "-"
    x = Fraction(x)
    return f"{x} ({decimal6(x)})"


@dataclass
class Table:
    title: str
    headers: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def add(self, *cells: object) -> None:
        self.rows.append([c if isinstance(c, str) else fmt(c) if isinstance(c, Fraction) else str(c) for c in cells])

    def text(self) -> str:
        widths = [len(h) for h in self.headers]
        for row in self.rows:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]
        line = "  ".join(h.ljust(w) for h, w in zip(self.headers, widths))
        out = [self.title, line, "-" * len(line)]
        out += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in self.rows]
        return "\n".join(out)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"# {self.title}"])
        w.writerow(self.headers)
        w.writerows(self.rows)
        return buf.getvalue()


@dataclass
class RunReport:
    tables: list[Table] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def render(self, as_csv: bool = False) -> str:
        if as_csv:
            return "\n".join(t.csv() for t in self.tables)
        parts = [t.text() for t in self.tables]
        if self.notes:
            parts.append("\n".join(self.notes))
        return "\n\n".join(parts) + "\n"
