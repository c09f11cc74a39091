"""Result tables and their byte-reproducible CSV form.

Floats are written with :func:`repr` (shortest round-trip form), integers and
strings verbatim, values beyond double range as 17-digit decimals. Files are
UTF-8 with LF line endings.
"""

import csv
import io
import math
import re
from dataclasses import dataclass, field
from decimal import Decimal

_INT = re.compile(r"-?\d+\Z")

__all__ = ["ResultTable", "format_cell", "parse_cell"]


def format_cell(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite numeric cell {value!r}")
        return repr(float(value))
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite numeric cell {value!r}")
        return str(value)
    if hasattr(value, "item"):
        return format_cell(value.item())
    return str(value)


def parse_cell(text):
    if _INT.match(text):
        return int(text)
    try:
        value = float(text)
    except ValueError:
        return text
    if math.isfinite(value):
        return value
    if text.lower().lstrip("+-") in ("inf", "infinity", "nan"):
        return text
    return Decimal(text)


@dataclass
class ResultTable:
    header: list
    rows: list = field(default_factory=list)
    footer: list = None
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self.header = list(self.header)
        width = len(self.header)
        for row in self.rows + ([self.footer] if self.footer is not None else []):
            if len(row) != width:
                raise ValueError(f"row has {len(row)} cells, header has {width}")

    def column(self, name):
        i = self.header.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])
        if self.footer is not None:
            writer.writerow([format_cell(v) for v in self.footer])
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text, footer=False):
        """Parse CSV text; with ``footer=True`` the last line is the footer row."""
        lines = list(csv.reader(io.StringIO(text)))
        header, body = lines[0], [[parse_cell(c) for c in row] for row in lines[1:]]
        tail = None
        if footer and body:
            tail = body.pop()
        return cls(header, body, tail)

    @classmethod
    def read(cls, path, footer=False):
        with open(path, encoding="utf-8", newline="") as fh:
            return cls.from_csv(fh.read(), footer=footer)
