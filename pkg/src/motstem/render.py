"""Deterministic ASCII and SVG renderings of assembled chart columns."""

from __future__ import annotations

from html import escape

from .manss import ChartColumn, ChartEntry, EntryKind

_COLORS = {EntryKind.TENSOR: "#cfe0ff", EntryKind.TOR: "#ffd3d3", EntryKind.MERGED: "#e4e4e4"}


def entry_text(e: ChartEntry) -> str:
    text = f"{e.group.render(False)} {e.label}"
    if "unknown" in e.flags:
        text += " ?"
    if "mod-l" in e.flags or "merged" in e.flags:
        text += " (mod l)"
    return text


def _grid(columns: list[ChartColumn]):
    s_max = max((e.s for c in columns for e in c.entries), default=0)
    cells = {(c.stem, s): [entry_text(e) for e in c.at(s)] for c in columns for s in range(s_max + 1)}
    return s_max, cells


def render_ascii(columns: list[ChartColumn]) -> str:
    """Stems run left to right, filtration s bottom to top; empty cells stay blank."""
    if not columns:
        return ""
    s_max, cells = _grid(columns)
    stems = [c.stem for c in columns]
    widths = {st: max([len(f"stem {st}")] + [len(t) for s in range(s_max + 1) for t in cells[(st, s)]])
              for st in stems}
    gutter = max(len(f"s={s_max}"), 4)
    sep = "+" + "-" * (gutter + 2) + "+" + "+".join("-" * (widths[st] + 2) for st in stems) + "+"
    head = columns[0]
    lines = [f"{head.page} l={head.prime} weight={head.weight}", sep]
    for s in range(s_max, -1, -1):
        height = max(1, max(len(cells[(st, s)]) for st in stems))
        for i in range(height):
            label = f"s={s}" if i == 0 else ""
            row = [f" {label:<{gutter}} "]
            for st in stems:
                items = cells[(st, s)]
                text = items[i] if i < len(items) else ""
                row.append(f" {text:<{widths[st]}} ")
            lines.append("|" + "|".join(row) + "|")
        lines.append(sep)
    lines.append("|" + " " * (gutter + 2) + "|"
                 + "|".join(f" {'stem ' + str(st):<{widths[st]}} " for st in stems) + "|")
    return "\n".join(line.rstrip() for line in lines) + "\n"


CELL_W = 260
LINE_H = 18
PAD = 6


def render_svg(columns: list[ChartColumn]) -> str:
    """Standalone SVG; tensor entries blue, Tor entries red, merged entries grey."""
    s_max, _ = _grid(columns)
    entries = {(c.stem, s): c.at(s) for c in columns for s in range(s_max + 1)}
    heights = [max(1, max((len(entries[(c.stem, s)]) for c in columns), default=1))
               for s in range(s_max + 1)]
    gutter = 50
    width = gutter + CELL_W * len(columns)
    row_px = [h * LINE_H + 2 * PAD for h in heights]
    height = sum(row_px) + 2 * LINE_H
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    y = LINE_H
    for s in range(s_max, -1, -1):
        h = row_px[s]
        out.append(f'<text x="4" y="{y + LINE_H}">s={s}</text>')
        for k, c in enumerate(columns):
            x = gutter + k * CELL_W
            out.append(f'<rect x="{x}" y="{y}" width="{CELL_W}" height="{h}" '
                       f'fill="none" stroke="black"/>')
            for i, e in enumerate(entries[(c.stem, s)]):
                ey = y + PAD + i * LINE_H
                out.append(f'<rect x="{x + 2}" y="{ey}" width="{CELL_W - 4}" height="{LINE_H - 2}" '
                           f'fill="{_COLORS[e.kind]}"/>')
                out.append(f'<text x="{x + 6}" y="{ey + LINE_H - 5}">{escape(entry_text(e))}</text>')
        y += h
    for k, c in enumerate(columns):
        out.append(f'<text x="{gutter + k * CELL_W + 6}" y="{y + LINE_H - 4}">stem {c.stem}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
