"""Flow tree construction from the styled DOM.

Every inline run is wrapped in an anonymous inline flow holding fragments;
inline elements themselves are flattened into fragments carrying their own
style, and block children found inside inline content are hoisted to the
nearest block ancestor in document order.  display:none subtrees vanish, and
list items grow a marker fragment ahead of their first content.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dom import COMMENT, ELEMENT, TEXT, DomTree, NodeId
from .errors import MissingStyle
from .scheduler import SmallBuffer
from .style import ComputedStyle
from .tokens import escape_payload

BLOCK = "block"
INLINE = "inline"

MARKER_GLYPH = "• "  # bullet + its own trailing space


@dataclass
class TextFragment:
    text: str               # whitespace-collapsed, never empty
    style: ComputedStyle
    dom_origin: NodeId


@dataclass
class MarkerFragment:
    glyph: str
    style: ComputedStyle
    dom_origin: NodeId


Fragment = TextFragment | MarkerFragment


class Flow:
    __slots__ = (
        "kind", "style", "dom_origin", "origin_name", "children", "fragments",
        "metrics", "lines", "atoms", "parent", "self_dirty", "descendant_dirty",
    )

    def __init__(self, kind, style, dom_origin=None, origin_name=None):
        self.kind = kind
        self.style = style
        self.dom_origin = dom_origin
        self.origin_name = origin_name
        self.children = SmallBuffer()
        self.fragments = SmallBuffer()
        self.metrics = None     # filled by the layout traversals
        self.lines = None       # wrapped line boxes (inline flows)
        self.atoms = None       # wrap units derived from fragments, cached
        self.parent = None
        self.self_dirty = False
        self.descendant_dirty = False

    def add_child(self, child: "Flow") -> None:
        child.parent = self
        self.children.push(child)

    def __repr__(self):
        origin = f"{self.origin_name}#{self.dom_origin}" if self.dom_origin is not None else "anon"
        return f"<Flow {self.kind} {origin}>"


def make_anonymous_style(parent: ComputedStyle) -> ComputedStyle:
    return ComputedStyle(display=INLINE, font_size=parent.font_size,
                         color=parent.color)


def collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


def build_flow_tree(tree: DomTree, styles: dict) -> Flow | None:
    """Build the flow tree; returns None when the page renders nothing."""
    root_element = None
    for child in tree.children(tree.root):
        if tree.node(child).kind == ELEMENT:
            root_element = child
            break
    if root_element is None:
        return None
    style = styles.get(root_element)
    if style is None:
        raise MissingStyle(root_element)
    if style.display == "none":
        return None
    return build_flow_subtree(tree, root_element, styles)


def build_flow_subtree(tree: DomTree, element_id: NodeId, styles: dict) -> Flow:
    """Build the block flow for one element (display must not be none)."""
    style = styles.get(element_id)
    if style is None:
        raise MissingStyle(element_id)
    node = tree.node(element_id)
    block = Flow(BLOCK, style, element_id, node.name)
    pending: list[Fragment] = []
    if style.display == "list_item":
        pending.append(MarkerFragment(MARKER_GLYPH, style, element_id))

    def flush():
        if pending:
            wrapper = Flow(INLINE, make_anonymous_style(style))
            for frag in pending:
                wrapper.fragments.push(frag)
            pending.clear()
            block.add_child(wrapper)

    def walk_inline(parent_id, active_style):
        for child_id in tree.children(parent_id):
            child = tree.node(child_id)
            if child.kind == TEXT:
                text = collapse_whitespace(child.data)
                if text:
                    pending.append(TextFragment(text, active_style, child_id))
            elif child.kind == COMMENT:
                continue
            elif child.kind == ELEMENT:
                child_style = styles.get(child_id)
                if child_style is None:
                    raise MissingStyle(child_id)
                if child_style.display == "none":
                    continue
                if child_style.display == "inline":
                    walk_inline(child_id, child_style)
                else:
                    flush()  # block inside inline content hoists here
                    block.add_child(build_flow_subtree(tree, child_id, styles))

    walk_inline(element_id, style)
    flush()
    return block


# ---------------------------------------------------------------------------
# queries and dumps
# ---------------------------------------------------------------------------

def iter_flows(root: Flow | None):
    if root is None:
        return
    stack = [root]
    while stack:
        flow = stack.pop()
        yield flow
        for i in range(len(flow.children) - 1, -1, -1):
            stack.append(flow.children[i])


def count_flows(root: Flow | None) -> int:
    return sum(1 for _ in iter_flows(root))


def flow_index(root: Flow | None) -> dict:
    """Map dom_origin -> flow for every flow that has an origin."""
    index = {}
    for flow in iter_flows(root):
        if flow.dom_origin is not None:
            index[flow.dom_origin] = flow
    return index


def _format_fragment(frag: Fragment) -> str:
    if isinstance(frag, MarkerFragment):
        return f'marker "{escape_payload(frag.glyph)}"'
    return f'text "{escape_payload(frag.text)}"'


def dump_flow_tree(root: Flow | None) -> str:
    lines = []

    def walk(flow, depth):
        pad = "  " * depth
        origin = (f"{flow.origin_name}#{flow.dom_origin}"
                  if flow.dom_origin is not None else "anon")
        if flow.kind == INLINE:
            frags = ", ".join(_format_fragment(f) for f in flow.fragments)
            lines.append(f"{pad}inline {origin} [{frags}]")
        else:
            lines.append(f"{pad}block {origin}")
        for child in flow.children:
            walk(child, depth + 1)

    if root is not None:
        walk(root, 0)
    return "\n".join(lines) + "\n" if lines else ""
