"""Script command mini-language.

One command per line; unknown lines become diagnostics, never errors:

    write TEXT
    set-attribute PATH NAME VALUE
    append-child PATH element NAME | append-child PATH text TEXT | ... comment TEXT
    remove-node PATH

PATH is a slash-separated list of child indices from the document root,
e.g. 0/1/2.  `write` is only honored while parsing; the mutation verbs only
after the initial load.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .dom import COMMENT, ELEMENT, TEXT, DomTree, NodeId
from .errors import BadPath


@dataclass
class Write:
    text: str


@dataclass
class SetAttribute:
    path: tuple
    name: str
    value: str


@dataclass
class AppendChild:
    parent_path: tuple
    payload: tuple


@dataclass
class RemoveNode:
    path: tuple


ScriptCommand = Write | SetAttribute | AppendChild | RemoveNode

_PATH_RE = re.compile(r"^\d+(/\d+)*$")


def parse_path(text: str) -> tuple | None:
    if not _PATH_RE.match(text):
        return None
    return tuple(int(p) for p in text.split("/"))


def parse_commands(text: str):
    """Parse command lines; returns (commands, diagnostics)."""
    commands = []
    diagnostics = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        verb, _, rest = line.partition(" ")
        if verb == "write":
            commands.append(Write(rest))
            continue
        if verb == "set-attribute":
            parts = rest.split(None, 2)
            path = parse_path(parts[0]) if parts else None
            if path is None or len(parts) < 2:
                diagnostics.append(f"bad set-attribute: {line!r}")
                continue
            value = parts[2] if len(parts) > 2 else ""
            commands.append(SetAttribute(path, parts[1].lower(), value))
            continue
        if verb == "append-child":
            parts = rest.split(None, 2)
            path = parse_path(parts[0]) if parts else None
            kind = parts[1] if len(parts) > 1 else ""
            arg = parts[2] if len(parts) > 2 else ""
            if path is None or kind not in (ELEMENT, TEXT, COMMENT) or \
                    (kind == ELEMENT and not arg):
                diagnostics.append(f"bad append-child: {line!r}")
                continue
            payload = (ELEMENT, arg.lower()) if kind == ELEMENT else (kind, arg)
            commands.append(AppendChild(path, payload))
            continue
        if verb == "remove-node":
            path = parse_path(rest.strip())
            if path is None:
                diagnostics.append(f"bad remove-node: {line!r}")
                continue
            commands.append(RemoveNode(path))
            continue
        diagnostics.append(f"unknown command: {line!r}")
    return commands, diagnostics


def resolve_path(tree: DomTree, path: tuple) -> NodeId:
    """Follow child indices from the root; BadPath when it dangles."""
    node_id = tree.root
    for index in path:
        kids = tree.node(node_id).children
        if index >= len(kids):
            raise BadPath("/".join(str(p) for p in path))
        node_id = kids[index]
    return node_id


def path_of(tree: DomTree, node_id: NodeId) -> tuple:
    """Inverse of resolve_path (fails on detached nodes)."""
    path = []
    cur = node_id
    while cur != tree.root:
        parent = tree.node(cur).parent
        path.append(tree.node(parent).children.index(cur))
        cur = parent
    return tuple(reversed(path))
