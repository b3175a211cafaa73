"""Printed reference Rayleigh values shipped as a CSV fixture."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class Table1Row:
    N: float
    a2: float
    Ra_fourier: float
    Ra_variational: float
    Ra_legendre: float


def load_table1() -> list[Table1Row]:
    text = resources.files("slpconv").joinpath("data/table1.csv").read_text()
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = [Table1Row(**{k: float(v) for k, v in rec.items()})
            for rec in csv.DictReader(io.StringIO("\n".join(lines)))]
    if len(rows) != 14:
        raise RuntimeError(f"reference fixture should hold 14 rows, found {len(rows)}")
    return rows
