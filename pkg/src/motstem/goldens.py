"""The chart renders frozen as golden files under ``tests/golden``."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .fieldcat import Field, parse_field
from .manss import assemble_e2_column
from .render import render_ascii, render_svg


@dataclass(frozen=True)
class GoldenCase:
    filename: str
    field: str
    prime: int
    weight: int
    stems: tuple[int, ...] = (0, 1, 2)
    fmt: str = "ascii"
    skeleton: bool = False


GOLDEN_CASES = {
    "table1-golden": (
        GoldenCase("chart_Fq5_l2_w0.txt", "Fq=5", 2, 0),
        GoldenCase("chart_Fq5_l2_w0.json", "Fq=5", 2, 0, fmt="json"),
        GoldenCase("chart_Fq5_l2_w0.svg", "Fq=5", 2, 0, fmt="svg"),
        GoldenCase("chart_algclosed0_l2_w0.txt", "algclosed:p=0", 2, 0),
        GoldenCase("chart_algclosed0_l2_w0.json", "algclosed:p=0", 2, 0, fmt="json"),
        GoldenCase("chart_skeleton_l2_w0.txt", "numberfield:r2=1", 2, 0, skeleton=True),
        GoldenCase("chart_skeleton_l2_w0.json", "numberfield:r2=1", 2, 0, fmt="json",
                   skeleton=True),
    ),
    "table3-golden": (
        GoldenCase("chart_Fq5_l2_w5.txt", "Fq=5", 2, 5),
        GoldenCase("chart_Fq5_l2_w5.json", "Fq=5", 2, 5, fmt="json"),
        GoldenCase("chart_Fq5_l2_w6.json", "Fq=5", 2, 6, fmt="json"),
    ),
}


def columns_for(case: GoldenCase):
    f: Field = parse_field(case.field)
    return [assemble_e2_column(f, case.prime, st, case.weight, strict=False,
                               keep_zero=case.skeleton, resolve_mod_l=not case.skeleton)
            for st in case.stems]


def render_golden(case: GoldenCase) -> str:
    cols = columns_for(case)
    if case.fmt == "ascii":
        return render_ascii(cols)
    if case.fmt == "svg":
        return render_svg(cols)
    return json.dumps([c.to_json() for c in cols], ensure_ascii=False, indent=1) + "\n"


def write_goldens(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for cases in GOLDEN_CASES.values():
        for case in cases:
            path = directory / case.filename
            path.write_text(render_golden(case), encoding="utf-8")
            written.append(path)
    return written
