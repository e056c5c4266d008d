"""Result tables and their serializations."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Union

Cell = Union[float, str]
FORMATS = ("plain", "csv", "markdown", "json-lines")


@dataclass(frozen=True)
class ResultTable:
    caption: str
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: tuple[tuple[Cell, ...], ...]
    provenance: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        if len(self.cells) != len(self.rows):
            raise ValueError("one cell row per row label is required")
        for row in self.cells:
            if len(row) != len(self.cols):
                raise ValueError("table is not rectangular")
            for c in row:
                if isinstance(c, float) and not math.isfinite(c):
                    raise ValueError("numeric cells must be finite")

    def cell(self, row: str, col: str) -> Cell:
        return self.cells[self.rows.index(row)][self.cols.index(col)]


def fmt_cell(c: Cell) -> str:
    if isinstance(c, str):
        return c
    text = f"{c:.6g}"
    return "0" if text == "-0" else text


def _json_cell(c: Cell):
    if isinstance(c, str):
        return c
    return float(fmt_cell(c))


def emit(table: ResultTable, fmt: str = "plain") -> str:
    if fmt == "csv":
        return _csv(table)
    if fmt == "markdown":
        return _markdown(table)
    if fmt == "json-lines":
        return _json_lines(table)
    if fmt == "plain":
        return _plain(table)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def _grid(table: ResultTable) -> list[list[str]]:
    header = [table.caption, *table.cols]
    body = [[r, *(fmt_cell(c) for c in row)] for r, row in zip(table.rows, table.cells)]
    return [header, *body]


def _csv(table: ResultTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(_grid(table))
    return buf.getvalue()


def _markdown(table: ResultTable) -> str:
    def esc(s: str) -> str:
        return s.replace("|", "\\|")

    grid = _grid(table)
    grid[0][0] = ""
    lines = [f"**{esc(table.caption)}**", ""]
    lines.append("| " + " | ".join(esc(c) for c in grid[0]) + " |")
    lines.append("|" + "|".join([":---"] + ["---:"] * len(table.cols)) + "|")
    lines.extend("| " + " | ".join(esc(c) for c in row) + " |" for row in grid[1:])
    return "\n".join(lines) + "\n"


def _json_lines(table: ResultTable) -> str:
    out = []
    for r, row in zip(table.rows, table.cells):
        for col, c in zip(table.cols, row):
            out.append(json.dumps(
                {"table": table.caption, "row": r, "col": col, "value": _json_cell(c)},
                ensure_ascii=False,
            ))
    return "".join(line + "\n" for line in out)


def _plain(table: ResultTable) -> str:
    grid = _grid(table)
    grid[0][0] = ""
    widths = [max(len(row[i]) for row in grid) for i in range(len(grid[0]))]
    lines = [table.caption]
    if table.provenance:
        lines.append("  " + "  ".join(f"{k}={v}" for k, v in table.provenance))
    for row in grid:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"
