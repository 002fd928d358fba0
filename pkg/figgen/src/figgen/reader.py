"""Reader for sublora result CSVs.

The files are self-describing: a comment block carries the artifact version,
the figure kind and the fully resolved configuration, followed by one CSV
header line and data rows. Lifetime cells may hold the ENERGY_NEUTRAL
sentinel and EPP cells may hold "inf"; both are preserved as typed markers,
never coerced to numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ReaderError(ValueError):
    pass


class _EnergyNeutral:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ENERGY_NEUTRAL"


ENERGY_NEUTRAL = _EnergyNeutral()


def _cell(text: str):
    if text == "ENERGY_NEUTRAL":
        return ENERGY_NEUTRAL
    if text == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class ResultTable:
    path: str
    version: str
    kind: str
    config: dict
    columns: list
    rows: list = field(default_factory=list)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def read_table(path) -> ResultTable:
    version = ""
    kind = ""
    config: dict = {}
    columns: list = []
    rows: list = []
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("sublora"):
                    version = body
                elif body.startswith("figure_kind"):
                    kind = body.partition("=")[2].strip()
                elif body.startswith("config."):
                    key, _, value = body.partition("=")
                    config[key.strip()[len("config."):]] = value.strip()
                continue
            if not columns:
                columns = line.split(",")
                continue
            cells = line.split(",")
            if len(cells) != len(columns):
                raise ReaderError(f"{path}: row width {len(cells)} != header {len(columns)}")
            rows.append([_cell(c) for c in cells])
    if not kind:
        raise ReaderError(f"{path}: no embedded figure_kind header")
    if not columns:
        raise ReaderError(f"{path}: no column header line")
    if not rows:
        raise ReaderError(f"{path}: no data rows")
    return ResultTable(path=str(path), version=version, kind=kind,
                       config=config, columns=columns, rows=rows)
