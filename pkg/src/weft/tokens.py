"""Token types emitted by the HTML tokenizer."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class StartTag:
    name: str
    attributes: dict[str, str] = field(default_factory=dict)
    self_closing: bool = False


@dataclass
class EndTag:
    name: str


@dataclass
class Character:
    ch: str  # exactly one Unicode scalar


@dataclass
class Comment:
    text: str


@dataclass
class Doctype:
    name: str


@dataclass
class EndOfStream:
    pass


Token = StartTag | EndTag | Character | Comment | Doctype | EndOfStream


def escape_payload(text: str) -> str:
    """Backslash-escape control characters for one-line debug dumps."""
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\x{ord(ch):02x}")
        else:
            out.append(ch)
    return "".join(out)


def format_token(token: Token) -> str:
    """One token per line: KIND<TAB>payload."""
    if isinstance(token, StartTag):
        parts = [token.name]
        parts += [f'{n}="{escape_payload(v)}"' for n, v in token.attributes.items()]
        if token.self_closing:
            parts.append("/")
        return "START_TAG\t" + " ".join(parts)
    if isinstance(token, EndTag):
        return "END_TAG\t" + token.name
    if isinstance(token, Character):
        return "CHARACTER\t" + escape_payload(token.ch)
    if isinstance(token, Comment):
        return "COMMENT\t" + escape_payload(token.text)
    if isinstance(token, Doctype):
        return "DOCTYPE\t" + token.name
    return "EOF\t"
