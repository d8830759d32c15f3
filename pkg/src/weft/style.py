"""CSS subset: parsing, selector matching, and the cascade.

Supported properties: display, width, height, margin-*, padding-*, color,
background-color, font-size.  Lengths are px or em (em resolves against the
node's computed font size; for font-size itself, against the parent's).
Selectors are compounds of type/class/id joined by descendant or child
combinators.  Unparseable rules and declarations are skipped with a
diagnostic, never an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .dom import ELEMENT, DomTree, NodeId
from .errors import NotAnElement

ROOT_FONT_SIZE = 16.0

NAMED_COLORS = {
    "aqua": (0, 255, 255), "black": (0, 0, 0), "blue": (0, 0, 255),
    "fuchsia": (255, 0, 255), "gray": (128, 128, 128), "green": (0, 128, 0),
    "lime": (0, 255, 0), "maroon": (128, 0, 0), "navy": (0, 0, 128),
    "olive": (128, 128, 0), "purple": (128, 0, 128), "red": (255, 0, 0),
    "silver": (192, 192, 192), "teal": (0, 128, 128), "white": (255, 255, 255),
    "yellow": (255, 255, 0),
}

DEFAULT_BLOCK = {"html", "body", "div", "p", "h1", "h2", "h3", "h4", "h5", "h6", "ul"}
DEFAULT_LIST_ITEM = {"li"}
# user-agent baseline: document metadata and script/style sources never render
DEFAULT_NONE = {"head", "title", "style", "script"}

PROPERTIES = (
    "background-color", "color", "display", "font-size", "height",
    "margin-bottom", "margin-left", "margin-right", "margin-top",
    "padding-bottom", "padding-left", "padding-right", "padding-top",
    "width",
)

INLINE_STYLE_SPECIFICITY = (2, 0, 0)  # above any id selector


@dataclass(frozen=True)
class Compound:
    type: str | None = None          # element name, None matches anything ('*')
    classes: tuple[str, ...] = ()
    id: str | None = None


@dataclass(frozen=True)
class Selector:
    compounds: tuple[Compound, ...]
    combinators: tuple[str, ...]     # between compounds: ">" or " "


@dataclass
class Rule:
    selector: Selector
    declarations: list          # [(property, parsed value), ...] in source order
    source_order: int


@dataclass
class ComputedStyle:
    display: str = "block"
    width: float | None = None       # None means auto
    height: float | None = None
    margin_top: float = 0.0
    margin_right: float = 0.0
    margin_bottom: float = 0.0
    margin_left: float = 0.0
    padding_top: float = 0.0
    padding_right: float = 0.0
    padding_bottom: float = 0.0
    padding_left: float = 0.0
    font_size: float = ROOT_FONT_SIZE
    color: tuple = (0, 0, 0)
    background_color: tuple | None = None


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_COMMENT_RE = re.compile(r"/\*.*?\*/", re.DOTALL)
_COMPOUND_RE = re.compile(r"^(\*|[a-zA-Z][a-zA-Z0-9-]*)?((?:[.#][a-zA-Z0-9_-]+)*)$")
_LENGTH_RE = re.compile(r"^(\d+(?:\.\d+)?)(px|em)?$")
_HEX_COLOR_RE = re.compile(r"^#([0-9a-fA-F]{3}|[0-9a-fA-F]{6})$")


def parse_selector(text: str) -> Selector:
    """Parse a single selector; raises ValueError on anything unsupported."""
    parts = re.split(r"(\s*>\s*|\s+)", text.strip())
    compounds = []
    combinators = []
    expect_compound = True
    for part in parts:
        if part == "":
            continue
        if expect_compound:
            compounds.append(_parse_compound(part))
            expect_compound = False
        else:
            combinators.append(">" if ">" in part else " ")
            expect_compound = True
    if not compounds or expect_compound:
        raise ValueError(f"bad selector {text!r}")
    return Selector(tuple(compounds), tuple(combinators))


def _parse_compound(text: str) -> Compound:
    m = _COMPOUND_RE.match(text)
    if not m or (not m.group(1) and not m.group(2)):
        raise ValueError(f"bad compound {text!r}")
    type_name = m.group(1)
    if type_name == "*":
        type_name = None
    elif type_name:
        type_name = type_name.lower()
    classes = []
    id_name = None
    for token in re.findall(r"[.#][a-zA-Z0-9_-]+", m.group(2) or ""):
        if token[0] == ".":
            classes.append(token[1:])
        else:
            if id_name is not None:
                raise ValueError(f"multiple ids in compound {text!r}")
            id_name = token[1:]
    return Compound(type_name, tuple(classes), id_name)


def _parse_length(text: str):
    m = _LENGTH_RE.match(text)
    if not m:
        return None
    value = float(m.group(1))
    unit = m.group(2)
    if unit is None and value != 0.0:
        return None
    return (unit or "px", value)


def _parse_color(text: str):
    m = _HEX_COLOR_RE.match(text)
    if m:
        h = m.group(1)
        if len(h) == 3:
            h = "".join(c * 2 for c in h)
        return tuple(int(h[i:i + 2], 16) for i in (0, 2, 4))
    return NAMED_COLORS.get(text.lower())


def parse_value(prop: str, raw: str):
    """Parse one declaration value; returns None when invalid."""
    raw = raw.strip()
    if not raw:
        return None
    if prop == "display":
        kw = raw.lower()
        return kw if kw in ("block", "inline", "none", "list-item") else None
    if prop in ("width", "height"):
        if raw.lower() == "auto":
            return ("auto",)
        return _parse_length(raw)
    if prop.startswith("margin-") or prop.startswith("padding-"):
        return _parse_length(raw)
    if prop == "font-size":
        length = _parse_length(raw)
        return length if length and length[1] > 0 else None
    if prop == "color":
        c = _parse_color(raw)
        return ("color", c) if c else None
    if prop == "background-color":
        if raw.lower() == "transparent":
            return ("transparent",)
        c = _parse_color(raw)
        return ("color", c) if c else None
    return None


def parse_declarations(text: str):
    """Parse a declaration block body; bad declarations are skipped."""
    decls = []
    diagnostics = []
    for piece in text.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        name, sep, raw = piece.partition(":")
        name = name.strip().lower()
        if not sep or name not in PROPERTIES:
            diagnostics.append(f"skipped declaration {piece!r}")
            continue
        value = parse_value(name, raw)
        if value is None:
            diagnostics.append(f"bad value in {piece!r}")
            continue
        decls.append((name, value))
    return decls, diagnostics


def parse_stylesheet(text: str, start_order: int = 0):
    """Parse rules; returns (rules, diagnostics).  Never raises."""
    text = _COMMENT_RE.sub("", text)
    rules = []
    diagnostics = []
    order = start_order
    pos = 0
    while True:
        brace = text.find("{", pos)
        if brace == -1:
            if text[pos:].strip():
                diagnostics.append(f"trailing junk {text[pos:].strip()!r}")
            break
        close = text.find("}", brace)
        if close == -1:
            diagnostics.append("unclosed rule block")
            break
        selector_text = text[pos:brace].strip()
        body = text[brace + 1:close]
        pos = close + 1
        try:
            selector = parse_selector(selector_text)
        except ValueError as err:
            diagnostics.append(str(err))
            continue
        decls, decl_diags = parse_declarations(body)
        diagnostics.extend(decl_diags)
        rules.append(Rule(selector, decls, order))
        order += 1
    return rules, diagnostics


# ---------------------------------------------------------------------------
# specificity and matching
# ---------------------------------------------------------------------------

def specificity(selector: Selector) -> tuple[int, int, int]:
    a = b = c = 0
    for comp in selector.compounds:
        if comp.id is not None:
            a += 1
        b += len(comp.classes)
        if comp.type is not None:
            c += 1
    return (a, b, c)


def _compound_matches(comp: Compound, node) -> bool:
    if comp.type is not None and node.name != comp.type:
        return False
    if comp.id is not None and node.attributes.get("id") != comp.id:
        return False
    if comp.classes:
        have = node.attributes.get("class", "").split()
        return all(c in have for c in comp.classes)
    return True


def matches(selector: Selector, node_id: NodeId, tree: DomTree) -> bool:
    """Right-to-left matching: the subject compound against the node itself,
    earlier compounds against ancestors per their combinators."""
    node = tree.node(node_id)
    if node.kind != ELEMENT:
        raise NotAnElement(f"node {node_id} is a {node.kind}")
    if not _compound_matches(selector.compounds[-1], node):
        return False
    return _match_ancestors(selector, len(selector.compounds) - 2, node, tree)


def _match_ancestors(selector, index, node, tree) -> bool:
    if index < 0:
        return True
    combinator = selector.combinators[index]
    comp = selector.compounds[index]
    parent_id = node.parent
    if combinator == ">":
        if parent_id is None:
            return False
        parent = tree.node(parent_id)
        if parent.kind != ELEMENT or not _compound_matches(comp, parent):
            return False
        return _match_ancestors(selector, index - 1, parent, tree)
    while parent_id is not None:
        parent = tree.node(parent_id)
        if parent.kind == ELEMENT and _compound_matches(comp, parent):
            if _match_ancestors(selector, index - 1, parent, tree):
                return True
        parent_id = parent.parent
    return False


# ---------------------------------------------------------------------------
# cascade
# ---------------------------------------------------------------------------

def default_display(name: str) -> str:
    if name in DEFAULT_BLOCK:
        return "block"
    if name in DEFAULT_LIST_ITEM:
        return "list_item"
    if name in DEFAULT_NONE:
        return "none"
    return "inline"


def cascade(node_id: NodeId, tree: DomTree, rules: list[Rule],
            parent_style: ComputedStyle | None) -> ComputedStyle:
    """Resolve the node's style from matching rules, inline style, defaults,
    and inheritance (color and font-size inherit)."""
    node = tree.node(node_id)
    if node.kind != ELEMENT:
        raise NotAnElement(f"node {node_id} is a {node.kind}")

    contributions = []
    for rule in rules:
        if rule.declarations and matches(rule.selector, node_id, tree):
            contributions.append((specificity(rule.selector), rule.source_order,
                                  rule.declarations))
    inline = node.attributes.get("style")
    if inline:
        decls, _ = parse_declarations(inline)
        if decls:
            contributions.append((INLINE_STYLE_SPECIFICITY, 1 << 30, decls))
    contributions.sort(key=lambda item: (item[0], item[1]))

    declared = {}
    for _, _, decls in contributions:
        for prop, value in decls:
            declared[prop] = value

    parent_fs = parent_style.font_size if parent_style else ROOT_FONT_SIZE
    fs = declared.get("font-size")
    if fs is None:
        font_size = parent_fs
    else:
        unit, value = fs
        font_size = value * parent_fs if unit == "em" else value

    def length(prop, default=0.0):
        val = declared.get(prop)
        if val is None:
            return default
        unit, value = val
        return value * font_size if unit == "em" else value

    def box(prop):
        val = declared.get(prop)
        if val is None or val == ("auto",):
            return None
        unit, value = val
        return value * font_size if unit == "em" else value

    color_val = declared.get("color")
    if color_val is not None:
        color = color_val[1]
    else:
        color = parent_style.color if parent_style else (0, 0, 0)

    bg_val = declared.get("background-color")
    if bg_val is None or bg_val == ("transparent",):
        background = None
    else:
        background = bg_val[1]

    display = declared.get("display", default_display(node.name))
    if display == "list-item":
        display = "list_item"

    return ComputedStyle(
        display=display,
        width=box("width"),
        height=box("height"),
        margin_top=length("margin-top"),
        margin_right=length("margin-right"),
        margin_bottom=length("margin-bottom"),
        margin_left=length("margin-left"),
        padding_top=length("padding-top"),
        padding_right=length("padding-right"),
        padding_bottom=length("padding-bottom"),
        padding_left=length("padding-left"),
        font_size=font_size,
        color=color,
        background_color=background,
    )


def compute_styles(tree: DomTree, rules: list[Rule],
                   root: NodeId | None = None,
                   parent_style: ComputedStyle | None = None) -> dict:
    """Sequentially cascade every element under `root` (default: whole tree)."""
    styles = {}
    start = tree.root if root is None else root

    def walk(node_id, parent):
        node = tree.node(node_id)
        if node.kind == ELEMENT:
            style = cascade(node_id, tree, rules, parent)
            styles[node_id] = style
            parent = style
        for child in node.children:
            walk(child, parent)

    walk(start, parent_style)
    return styles


# ---------------------------------------------------------------------------
# dump
# ---------------------------------------------------------------------------

def format_color(color) -> str:
    if color is None:
        return "transparent"
    return "#%02x%02x%02x" % color


def _format_style_value(prop: str, style: ComputedStyle) -> str:
    attr = prop.replace("-", "_")
    if prop == "display":
        return style.display
    if prop == "color":
        return format_color(style.color)
    if prop == "background-color":
        return format_color(style.background_color)
    if prop == "font-size":
        return f"{style.font_size:.2f}px"
    value = getattr(style, attr)
    if value is None:
        return "auto"
    return f"{value:.2f}px"


def dump_styles(tree: DomTree, styles: dict) -> str:
    """One `nodeId: property=value` line per property, sorted, in pre-order."""
    lines = []
    for node_id in tree.iter_pre_order():
        if node_id in styles:
            style = styles[node_id]
            for prop in PROPERTIES:
                lines.append(f"{node_id}: {prop}={_format_style_value(prop, style)}")
    return "\n".join(lines) + "\n"
