"""Figure specification: which CSV columns become axes and series."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class FigureSpec:
    input_csv: str
    output_path: str
    x_column: str = "swept_value"
    series_columns: list = field(default_factory=lambda: ["scheme"])
    value_column: str = "value"
    ci_column: str | None = "ci_halfwidth"
    filters: dict = field(default_factory=dict)     # column -> required value
    title: str = ""
    x_label: str = ""
    y_label: str = ""

    @classmethod
    def from_json(cls, path) -> "FigureSpec":
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown figure spec fields: {sorted(unknown)}")
        if "input_csv" not in data or "output_path" not in data:
            raise ValueError("figure spec needs 'input_csv' and 'output_path'")
        return cls(**data)
