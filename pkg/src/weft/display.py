"""Display list emission and a minimal software painter.

Painting order is a single stacking context: depth-first pre-order over the
flow tree, each flow's background rectangle before its content and children.
Text paints as placeholder glyph boxes so output is bit-identical across
platforms; the raster format is binary PPM (P6).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import LayoutIncomplete
from .flow import INLINE, Flow
from .layout import char_advance
from .style import format_color

GLYPH_HEIGHT = 0.8  # fraction of font size; boxes sit on the baseline


@dataclass
class SolidRect:
    x: float
    y: float
    w: float
    h: float
    color: tuple


@dataclass
class TextRun:
    x: float            # baseline-left origin
    y: float
    text: str
    font_size: float
    color: tuple


DisplayItem = SolidRect | TextRun


@dataclass
class RasterImage:
    width: int
    height: int
    pixels: bytes       # row-major rgb, len == width * height * 3


def build_display_list(root: Flow | None) -> list[DisplayItem]:
    """Flatten the laid-out flow tree into ordered paint commands."""
    items: list[DisplayItem] = []
    if root is None:
        return items
    stack = [root]
    while stack:
        flow = stack.pop()
        m = flow.metrics
        if m is None or not m.complete:
            raise LayoutIncomplete(f"{flow!r} has unfilled geometry")
        bg = flow.style.background_color
        if bg is not None:
            items.append(SolidRect(m.x, m.y, m.used_width, m.used_height, bg))
        if flow.kind == INLINE and flow.lines:
            for line in flow.lines:
                items.extend(_line_runs(flow, line))
        for i in range(len(flow.children) - 1, -1, -1):
            stack.append(flow.children[i])
    return items


def _line_runs(flow: Flow, line) -> list[TextRun]:
    """One TextRun per marker and per same-style word run within the line."""
    runs = []
    base_x = flow.metrics.x
    base_y = flow.metrics.y + line.baseline_rel
    pending = None  # (style, rel_x, [words])
    for item in line.items:
        if item.is_marker:
            if pending is not None:
                runs.append(_close_run(pending, base_x, base_y))
                pending = None
            runs.append(TextRun(base_x + item.rel_x, base_y, item.text,
                                item.style.font_size, item.style.color))
        elif pending is not None and item.style is pending[0]:
            pending[2].append(item.text)
        else:
            if pending is not None:
                runs.append(_close_run(pending, base_x, base_y))
            pending = (item.style, item.rel_x, [item.text])
    if pending is not None:
        runs.append(_close_run(pending, base_x, base_y))
    return runs


def _close_run(pending, base_x, base_y) -> TextRun:
    style, rel_x, words = pending
    return TextRun(base_x + rel_x, base_y, " ".join(words),
                   style.font_size, style.color)


# ---------------------------------------------------------------------------
# painting
# ---------------------------------------------------------------------------

def paint(items: list[DisplayItem], width: int, height: int) -> RasterImage:
    """Apply items in order onto a white canvas (painter's algorithm)."""
    canvas = np.full((height, width, 3), 255, dtype=np.uint8)
    for item in items:
        if isinstance(item, SolidRect):
            _fill(canvas, item.x, item.y, item.w, item.h, item.color)
        else:
            adv = char_advance(item.font_size)
            box_h = GLYPH_HEIGHT * item.font_size
            for i, ch in enumerate(item.text):
                if ch.isspace():
                    continue  # spaces have no glyph box
                _fill(canvas, item.x + i * adv, item.y - box_h, adv, box_h,
                      item.color)
    return RasterImage(width, height, canvas.tobytes())


def _fill(canvas, x, y, w, h, color):
    height, width, _ = canvas.shape
    x0 = max(0, int(round(x)))
    y0 = max(0, int(round(y)))
    x1 = min(width, int(round(x + w)))
    y1 = min(height, int(round(y + h)))
    if x0 < x1 and y0 < y1:
        canvas[y0:y1, x0:x1] = color


def write_ppm(image: RasterImage) -> bytes:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels


# ---------------------------------------------------------------------------
# JSON serialization (fixed key order, two-decimal fixed-point numbers)
# ---------------------------------------------------------------------------

def _num(v: float) -> str:
    return f"{v:.2f}"


def display_list_json(items: list[DisplayItem]) -> str:
    if not items:
        return "[]"
    parts = []
    for item in items:
        if isinstance(item, SolidRect):
            parts.append(
                '{"type":"rect"'
                f',"x":{_num(item.x)},"y":{_num(item.y)}'
                f',"w":{_num(item.w)},"h":{_num(item.h)}'
                f',"color":"{format_color(item.color)}"}}'
            )
        else:
            parts.append(
                '{"type":"text"'
                f',"x":{_num(item.x)},"y":{_num(item.y)}'
                f',"text":{json.dumps(item.text)}'
                f',"font_size":{_num(item.font_size)}'
                f',"color":"{format_color(item.color)}"}}'
            )
    return "[\n" + ",\n".join(parts) + "\n]"
