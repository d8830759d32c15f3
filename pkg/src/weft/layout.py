"""Geometry over the flow tree: three dependency-ordered tree traversals.

1. bottom-up  intrinsic min/preferred widths
2. top-down   used-width assignment (and containing-width recording)
3. bottom-up  line wrapping, height assignment, child offsets within the
   parent, followed by a top-down placement sweep that turns the relative
   offsets into viewport coordinates

Text uses a fixed-advance model (0.5em per character, 1.2em line height) so
geometry is exactly reproducible.  Width and height properties are
content-box: used_width/used_height cover content plus padding.  Vertical
margins do not collapse.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .flow import BLOCK, INLINE, Flow, MarkerFragment, iter_flows
from .scheduler import BOTTOM_UP, DEFAULT_CUTOFF, TOP_DOWN, execute_traversal

CHAR_ADVANCE = 0.5   # fraction of font size per character
LINE_HEIGHT = 1.2    # fraction of font size per line box


def char_advance(font_size: float) -> float:
    return CHAR_ADVANCE * font_size


def line_height(font_size: float) -> float:
    return LINE_HEIGHT * font_size


_EPS = 1e-9


class LayoutMetrics:
    __slots__ = (
        "intrinsic_min_width", "intrinsic_pref_width",
        "used_width", "used_height", "x", "y",
        "rel_x", "rel_y", "containing_width",
        "width_changed", "subtree_width_changed", "moved",
    )

    def __init__(self):
        self.intrinsic_min_width = None
        self.intrinsic_pref_width = None
        self.used_width = None
        self.used_height = None
        self.x = None
        self.y = None
        self.rel_x = 0.0
        self.rel_y = 0.0
        self.containing_width = None
        self.width_changed = False
        self.subtree_width_changed = False
        self.moved = False

    @property
    def complete(self) -> bool:
        return None not in (self.used_width, self.used_height, self.x, self.y)


@dataclass
class Atom:
    """One unbreakable wrap unit: a word or a list marker glyph."""
    text: str
    style: object
    is_marker: bool
    advance: float


@dataclass
class LineItem:
    text: str
    style: object
    rel_x: float
    is_marker: bool


@dataclass
class Line:
    rel_y: float
    height: float
    baseline_rel: float
    items: list


def _ensure_metrics(flow: Flow) -> LayoutMetrics:
    if flow.metrics is None:
        flow.metrics = LayoutMetrics()
    return flow.metrics


def _atoms(flow: Flow) -> list[Atom]:
    if flow.atoms is None:
        atoms = []
        for frag in flow.fragments:
            if isinstance(frag, MarkerFragment):
                atoms.append(Atom(frag.glyph, frag.style, True,
                                  len(frag.glyph) * char_advance(frag.style.font_size)))
            else:
                adv = char_advance(frag.style.font_size)
                for word in frag.text.split(" "):
                    atoms.append(Atom(word, frag.style, False, len(word) * adv))
        flow.atoms = atoms
    return flow.atoms


def _separator(prev: Atom, cur: Atom) -> float:
    # a marker glyph carries its own trailing space; words get one space
    if prev.is_marker:
        return 0.0
    return char_advance(prev.style.font_size)


# ---------------------------------------------------------------------------
# per-node computations, shared by the full traversals and incremental walks
# ---------------------------------------------------------------------------

def compute_intrinsics_at(flow: Flow) -> bool:
    """Fill intrinsic widths from completed children; True when they changed."""
    m = _ensure_metrics(flow)
    style = flow.style
    if flow.kind == INLINE:
        min_w = 0.0
        pref_w = 0.0
        prev = None
        for atom in _atoms(flow):
            min_w = max(min_w, atom.advance)
            pref_w += (_separator(prev, atom) if prev is not None else 0.0) + atom.advance
            prev = atom
    else:
        margins = style.margin_left + style.margin_right
        padding = style.padding_left + style.padding_right
        if style.width is not None:
            min_w = pref_w = style.width + padding + margins
        else:
            min_w = pref_w = 0.0
            for child in flow.children:
                cm = child.metrics
                min_w = max(min_w, cm.intrinsic_min_width)
                pref_w = max(pref_w, cm.intrinsic_pref_width)
            min_w += padding + margins
            pref_w += padding + margins
    changed = (m.intrinsic_min_width != min_w or m.intrinsic_pref_width != pref_w)
    m.intrinsic_min_width = min_w
    m.intrinsic_pref_width = pref_w
    return changed


def content_width(flow: Flow) -> float:
    m = flow.metrics
    return max(0.0, m.used_width - flow.style.padding_left - flow.style.padding_right)


def assign_width_at(flow: Flow, containing: float) -> bool:
    """Set used_width from the containing width; True when it changed."""
    m = _ensure_metrics(flow)
    m.containing_width = containing
    style = flow.style
    if flow.kind == INLINE:
        used = max(0.0, containing)
    elif style.width is None:
        used = max(0.0, containing - style.margin_left - style.margin_right)
    else:
        used = style.width + style.padding_left + style.padding_right
    changed = m.used_width != used
    m.used_width = used
    if changed:
        m.width_changed = True
    return changed


def wrap_lines(flow: Flow, width: float) -> list[Line]:
    """Greedy word wrap of the inline flow's atoms into line boxes."""
    lines = []
    cur_items: list[LineItem] = []
    cur_max_fs = 0.0
    cur_x = 0.0
    y = 0.0
    prev = None

    def close_line():
        nonlocal y, cur_items, cur_max_fs, cur_x
        h = line_height(cur_max_fs)
        lines.append(Line(y, h, y + cur_max_fs, cur_items))
        y += h
        cur_items = []
        cur_max_fs = 0.0
        cur_x = 0.0

    for atom in _atoms(flow):
        sep = _separator(prev, atom) if cur_items else 0.0
        if cur_items and cur_x + sep + atom.advance > width + _EPS:
            close_line()
            sep = 0.0
        cur_items.append(LineItem(atom.text, atom.style, cur_x + sep, atom.is_marker))
        cur_x += sep + atom.advance
        cur_max_fs = max(cur_max_fs, atom.style.font_size)
        prev = atom
    if cur_items:
        close_line()
    return lines


def assign_height_at(flow: Flow) -> bool:
    """Wrap text / stack children and set used_height; True when the height
    or any child offset changed."""
    m = flow.metrics
    style = flow.style
    changed = m.width_changed
    m.width_changed = False
    if flow.kind == INLINE:
        flow.lines = wrap_lines(flow, content_width(flow))
        used = sum(line.height for line in flow.lines)
    else:
        cursor = style.padding_top
        for child in flow.children:
            cm = child.metrics
            cstyle = child.style
            rel_x = style.padding_left + cstyle.margin_left
            rel_y = cursor + cstyle.margin_top
            if cm.rel_x != rel_x or cm.rel_y != rel_y:
                cm.rel_x = rel_x
                cm.rel_y = rel_y
                cm.moved = True
                changed = True
            cursor = rel_y + cm.used_height + cstyle.margin_bottom
        stacked = cursor - style.padding_top
        if style.height is None:
            used = stacked + style.padding_top + style.padding_bottom
        else:
            used = style.height + style.padding_top + style.padding_bottom
    if m.used_height != used:
        m.used_height = used
        changed = True
    return changed


def place_at(flow: Flow) -> bool:
    """Convert relative offsets into viewport coordinates; True on movement."""
    m = flow.metrics
    if flow.parent is None:
        x = flow.style.margin_left
        y = flow.style.margin_top
    else:
        pm = flow.parent.metrics
        x = pm.x + m.rel_x
        y = pm.y + m.rel_y
    changed = (m.x != x) or (m.y != y)
    m.x = x
    m.y = y
    return changed


def clear_flags(flow: Flow) -> None:
    flow.self_dirty = False
    flow.descendant_dirty = False
    m = flow.metrics
    if m is not None:
        m.width_changed = False
        m.subtree_width_changed = False
        m.moved = False


# ---------------------------------------------------------------------------
# full layout: the traversals dispatched through the scheduler
# ---------------------------------------------------------------------------

class VisitCounter:
    """Thread-safe per-pass visit counters (used by tests and benchmarks)."""

    def __init__(self):
        self._lock = threading.Lock()
        self.counts = {"intrinsics": 0, "widths": 0, "heights": 0, "place": 0}

    def bump(self, pass_name):
        with self._lock:
            self.counts[pass_name] += 1

    @property
    def total(self):
        return sum(self.counts.values())


def compute_intrinsic_widths(root: Flow, workers=1, cutoff=DEFAULT_CUTOFF,
                             stats: VisitCounter | None = None) -> None:
    def visit(flow):
        if stats:
            stats.bump("intrinsics")
        compute_intrinsics_at(flow)

    execute_traversal(root, BOTTOM_UP, visit, workers, cutoff=cutoff)


def assign_widths(root: Flow, containing_width: float, workers=1,
                  cutoff=DEFAULT_CUTOFF, stats: VisitCounter | None = None) -> None:
    def visit(flow):
        if stats:
            stats.bump("widths")
        containing = (containing_width if flow.parent is None
                      else content_width(flow.parent))
        assign_width_at(flow, containing)

    execute_traversal(root, TOP_DOWN, visit, workers, cutoff=cutoff)


def assign_heights(root: Flow, workers=1, cutoff=DEFAULT_CUTOFF,
                   stats: VisitCounter | None = None) -> None:
    def stack(flow):
        if stats:
            stats.bump("heights")
        assign_height_at(flow)

    def place(flow):
        if stats:
            stats.bump("place")
        place_at(flow)
        clear_flags(flow)

    execute_traversal(root, BOTTOM_UP, stack, workers, cutoff=cutoff)
    execute_traversal(root, TOP_DOWN, place, workers, cutoff=cutoff)


def layout(root: Flow | None, viewport_width: float, workers=1,
           cutoff=DEFAULT_CUTOFF, stats: VisitCounter | None = None) -> None:
    """Run all traversals; geometry is identical for every worker count."""
    if root is None:
        return
    compute_intrinsic_widths(root, workers, cutoff, stats)
    assign_widths(root, viewport_width, workers, cutoff, stats)
    assign_heights(root, workers, cutoff, stats)


# ---------------------------------------------------------------------------
# dump
# ---------------------------------------------------------------------------

def dump_layout(root: Flow | None) -> str:
    """`kind origin x y w h` per flow, two decimals, depth-first pre-order."""
    lines = []
    for flow in iter_flows(root):
        m = flow.metrics
        origin = (f"{flow.origin_name}#{flow.dom_origin}"
                  if flow.dom_origin is not None else "anon")
        lines.append(f"{flow.kind} {origin} "
                     f"{m.x:.2f} {m.y:.2f} {m.used_width:.2f} {m.used_height:.2f}")
    return "\n".join(lines) + "\n" if lines else ""
