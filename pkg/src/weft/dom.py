"""Document tree: token consumption with error recovery, plus mutation ops.

Recovery subset applied by the builder:
  R1  at end-of-stream every open element is implicitly closed
  R2  an end tag with no matching open element is ignored
  R3  an end tag matching a non-innermost open element closes the elements
      between it and the match
  R4  character/element tokens arriving before html/body synthesize them
      (whitespace-only character runs before body are dropped; they have no
      valid home and browsers discard them too)

Additionally: duplicate html/body start tags are ignored, and html/body end
tags are ignored so stray content after them still lands in body; R1 closes
both at end-of-stream.  Doctype tokens carry no DOM node kind and are dropped.
"""

from __future__ import annotations

from .errors import CannotRemoveRoot, InvalidParent, NoSuchNode, NotAnElement
from .tokens import Character, Comment, Doctype, EndOfStream, EndTag, StartTag

NodeId = int

DOCUMENT = "document"
ELEMENT = "element"
TEXT = "text"
COMMENT = "comment"

VOID_ELEMENTS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}


class DomNode:
    __slots__ = ("id", "kind", "name", "attributes", "data", "parent", "children")

    def __init__(self, node_id, kind, name=None, attributes=None, data=None):
        self.id = node_id
        self.kind = kind
        self.name = name
        self.attributes = attributes if attributes is not None else {}
        self.data = data
        self.parent = None
        self.children = []

    def __repr__(self):
        if self.kind == ELEMENT:
            return f"<DomNode {self.id} element {self.name}>"
        return f"<DomNode {self.id} {self.kind}>"


class DomTree:
    """Identifier-addressed tree with a single document root.

    `generation` increases on every structural or attribute mutation and is
    never reset; node ids are never reused within one tree's lifetime.
    """

    def __init__(self):
        self.nodes: dict[NodeId, DomNode] = {}
        self._next_id = 0
        self.generation = 0
        self.root = self._create(DOCUMENT)

    def _create(self, kind, name=None, attributes=None, data=None) -> NodeId:
        node_id = self._next_id
        self._next_id += 1
        self.nodes[node_id] = DomNode(node_id, kind, name, attributes, data)
        return node_id

    def node(self, node_id: NodeId) -> DomNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise NoSuchNode(node_id) from None

    def children(self, node_id: NodeId) -> list[NodeId]:
        return self.node(node_id).children

    # -- construction / mutation -----------------------------------------

    def append_child(self, parent: NodeId, payload) -> NodeId:
        """Append a new node under `parent`.

        `payload` is ("element", name) | ("element", name, attrs) |
        ("text", data) | ("comment", text).
        """
        pnode = self.node(parent)
        if pnode.kind in (TEXT, COMMENT):
            raise InvalidParent(f"node {parent} ({pnode.kind}) cannot have children")
        kind = payload[0]
        if kind == ELEMENT:
            name = payload[1].lower()
            attrs = dict(payload[2]) if len(payload) > 2 else {}
            child = self._create(ELEMENT, name=name, attributes=attrs)
        elif kind == TEXT:
            child = self._create(TEXT, data=payload[1])
        elif kind == COMMENT:
            child = self._create(COMMENT, data=payload[1])
        else:
            raise InvalidParent(f"unknown node kind {kind!r}")
        self.nodes[child].parent = parent
        pnode.children.append(child)
        self.generation += 1
        return child

    def set_attribute(self, node_id: NodeId, name: str, value: str) -> None:
        node = self.node(node_id)
        if node.kind != ELEMENT:
            raise NotAnElement(f"node {node_id} is a {node.kind}")
        node.attributes[name.lower()] = value
        self.generation += 1

    def remove_node(self, node_id: NodeId) -> None:
        node = self.node(node_id)
        if node_id == self.root:
            raise CannotRemoveRoot("cannot remove the document root")
        parent = self.nodes[node.parent]
        parent.children.remove(node_id)
        stack = [node_id]
        while stack:
            nid = stack.pop()
            stack.extend(self.nodes[nid].children)
            del self.nodes[nid]
        self.generation += 1

    # -- queries -----------------------------------------------------------

    def is_element(self, node_id: NodeId, name=None) -> bool:
        node = self.nodes.get(node_id)
        return (
            node is not None
            and node.kind == ELEMENT
            and (name is None or node.name == name)
        )

    def text_content(self, node_id: NodeId) -> str:
        out = []
        stack = [node_id]
        while stack:
            node = self.node(stack.pop())
            if node.kind == TEXT:
                out.append(node.data)
            else:
                stack.extend(reversed(node.children))
        return "".join(out)

    def iter_pre_order(self, start=None):
        stack = [self.root if start is None else start]
        while stack:
            nid = stack.pop()
            yield nid
            stack.extend(reversed(self.nodes[nid].children))

    def audit(self) -> None:
        """Full-tree link consistency check; raises on any violation."""
        seen = set()
        stack = [(self.root, None)]
        while stack:
            nid, parent = stack.pop()
            assert nid in self.nodes, f"dangling id {nid}"
            assert nid not in seen, f"cycle through {nid}"
            seen.add(nid)
            node = self.nodes[nid]
            assert node.parent == parent, f"bad parent link on {nid}"
            if node.kind in (TEXT, COMMENT):
                assert not node.children, f"{node.kind} node {nid} has children"
            stack.extend((c, nid) for c in node.children)
        assert seen == set(self.nodes), "orphaned nodes in store"
        assert self.nodes[self.root].kind == DOCUMENT


class TreeBuilder:
    """Incremental token consumer.

    process() returns the NodeId of a script element the moment its end tag
    closes it, so the driver can execute the script before pulling the next
    token; it returns None otherwise.
    """

    def __init__(self):
        self.tree = DomTree()
        self._stack = [self.tree.root]
        self._html = None
        self._body = None
        self._text = []
        self._done = False

    def process(self, token) -> NodeId | None:
        if isinstance(token, Character):
            top = self.tree.nodes[self._stack[-1]]
            if top.kind == DOCUMENT or (top.kind == ELEMENT and top.name == "html"
                                        and self._body is None):
                if token.ch.isspace():
                    return None
                self._ensure_body()
            self._text.append(token.ch)
            return None
        self._flush_text()
        if isinstance(token, StartTag):
            return self._start_tag(token)
        if isinstance(token, EndTag):
            return self._end_tag(token)
        if isinstance(token, Comment):
            self.tree.append_child(self._stack[-1], (COMMENT, token.text))
            return None
        if isinstance(token, Doctype):
            return None
        if isinstance(token, EndOfStream):
            del self._stack[1:]  # R1
            self._done = True
            return None
        raise TypeError(f"unexpected token {token!r}")

    def finish(self) -> DomTree:
        if not self._done:
            self.process(EndOfStream())
        return self.tree

    # -- internals ---------------------------------------------------------

    def _flush_text(self):
        if self._text:
            self.tree.append_child(self._stack[-1], (TEXT, "".join(self._text)))
            self._text = []

    def _ensure_html(self):
        if self._html is None:
            self._html = self.tree.append_child(self.tree.root, (ELEMENT, "html"))
            self._stack.append(self._html)

    def _ensure_body(self):
        self._ensure_html()
        if self._body is None:
            self._body = self.tree.append_child(self._html, (ELEMENT, "body"))
            self._stack.append(self._body)

    def _start_tag(self, token):
        name = token.name
        if name == "html":
            if self._html is None:
                self._html = self.tree.append_child(
                    self.tree.root, (ELEMENT, "html", token.attributes))
                self._stack.append(self._html)
            return None
        if name == "body":
            if self._body is None:
                self._ensure_html()
                self._body = self.tree.append_child(
                    self._html, (ELEMENT, "body", token.attributes))
                self._stack.append(self._body)
            return None
        self._ensure_html()
        top = self.tree.nodes[self._stack[-1]]
        if top.kind == ELEMENT and top.name == "html" and name != "head":
            self._ensure_body()
        node = self.tree.append_child(
            self._stack[-1], (ELEMENT, name, token.attributes))
        if not token.self_closing and name not in VOID_ELEMENTS:
            self._stack.append(node)
        return None

    def _end_tag(self, token):
        name = token.name
        if name in ("html", "body"):
            return None
        for i in range(len(self._stack) - 1, 0, -1):
            node = self.tree.nodes[self._stack[i]]
            if node.kind == ELEMENT and node.name == name:
                del self._stack[i:]  # R3 closes intervening elements too
                return node.id if name == "script" else None
        return None  # R2


def build(tokens) -> DomTree:
    """Build a tree from a complete token stream (must end with EndOfStream)."""
    builder = TreeBuilder()
    for token in tokens:
        builder.process(token)
    return builder.finish()


# ---------------------------------------------------------------------------
# serialization and dumps
# ---------------------------------------------------------------------------

def _escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(value: str) -> str:
    return value.replace("&", "&amp;").replace('"', "&quot;")


def serialize(tree: DomTree, node_id: NodeId | None = None) -> str:
    """Canonical markup: lowercase names, double-quoted attributes."""
    node = tree.node(tree.root if node_id is None else node_id)
    if node.kind == DOCUMENT:
        return "".join(serialize(tree, c) for c in node.children)
    if node.kind == TEXT:
        return _escape_text(node.data)
    if node.kind == COMMENT:
        return f"<!--{node.data}-->"
    attrs = "".join(f' {n}="{_escape_attr(v)}"' for n, v in node.attributes.items())
    if node.name in VOID_ELEMENTS:
        return f"<{node.name}{attrs}>"
    if node.name == "script":
        # script content re-parses as raw text, so it must serialize raw
        inner = "".join(tree.node(c).data for c in node.children
                        if tree.node(c).kind == TEXT)
    else:
        inner = "".join(serialize(tree, c) for c in node.children)
    return f"<{node.name}{attrs}>{inner}</{node.name}>"


def dump_tree(tree: DomTree) -> str:
    """Indented tree dump, two spaces per depth level."""
    from .tokens import escape_payload

    lines = []

    def walk(node_id, depth):
        node = tree.node(node_id)
        pad = "  " * depth
        if node.kind == DOCUMENT:
            lines.append(pad + "document")
        elif node.kind == ELEMENT:
            attrs = " ".join(f'{n}="{escape_payload(v)}"'
                             for n, v in node.attributes.items())
            lines.append(pad + f"element {node.name}" + (f" [{attrs}]" if attrs else ""))
        elif node.kind == TEXT:
            lines.append(pad + f'text "{escape_payload(node.data)}"')
        else:
            lines.append(pad + f'comment "{escape_payload(node.data)}"')
        for child in node.children:
            walk(child, depth + 1)

    walk(tree.root, 0)
    return "\n".join(lines) + "\n"
