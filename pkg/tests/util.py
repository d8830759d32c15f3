"""Shared test helpers: independent oracles and corpus access."""

from __future__ import annotations

import random
from html.parser import HTMLParser
from pathlib import Path

from weft.tokens import Character, Comment, Doctype, EndOfStream, EndTag, StartTag

CORPUS_DIR = Path(__file__).parent / "corpus"


def corpus_documents():
    return sorted(CORPUS_DIR.glob("*.html"))


def random_partition(text: str, rng: random.Random, max_cuts: int = 8) -> list[str]:
    """Split text into 1..max_cuts+1 contiguous chunks at random positions."""
    if len(text) < 2:
        return [text]
    n_cuts = rng.randint(1, max_cuts)
    cuts = sorted(rng.sample(range(1, len(text)), min(n_cuts, len(text) - 1)))
    chunks = []
    prev = 0
    for c in cuts:
        chunks.append(text[prev:c])
        prev = c
    chunks.append(text[prev:])
    return chunks


_WORDS = (
    "lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod "
    "tempor incididunt ut labore et dolore magna aliqua".split()
)


def synthetic_page(n_elements: int, branching: int, seed: int) -> str:
    """Deterministic page with ~n_elements styled elements, fixed branching."""
    rng = random.Random(seed)

    def style_attr():
        if rng.random() >= 0.3:
            return ""
        bits = []
        if rng.random() < 0.4:
            bits.append(f"width: {rng.randrange(40, 200)}px")
        if rng.random() < 0.4:
            bits.append(f"padding-left: {rng.randrange(0, 12)}px")
        if rng.random() < 0.3:
            bits.append(f"margin-top: {rng.randrange(0, 10)}px")
        if rng.random() < 0.3:
            bits.append(f"background-color: {rng.choice(('silver', 'teal', 'olive'))}")
        return ' style="' + "; ".join(bits) + '"' if bits else ""

    def render(i):
        kids = [i * branching + k for k in range(1, branching + 1)
                if i * branching + k < n_elements]
        attr = style_attr()
        if not kids:
            tag = rng.choice(("p", "p", "div"))
            text = " ".join(rng.choice(_WORDS) for _ in range(rng.randint(2, 6)))
            return f"<{tag}{attr}>{text}</{tag}>"
        inner = "".join(render(k) for k in kids)
        return f"<div{attr}>{inner}</div>"

    return "<html><body>" + render(0) + "</body></html>"


class _StdlibSink(HTMLParser):
    """Adapter turning stdlib parser events into weft tokens.

    Serves as an independent reference for well-formed documents that stay
    inside the supported feature subset (named references limited to
    amp/lt/gt/quot/apos, no rawtext elements other than script).
    """

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.tokens = []

    def handle_starttag(self, tag, attrs):
        merged = {}
        for name, value in attrs:
            if name not in merged:
                merged[name] = value if value is not None else ""
        self.tokens.append(StartTag(tag, merged, False))

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)
        self.tokens[-1].self_closing = True

    def handle_endtag(self, tag):
        self.tokens.append(EndTag(tag))

    def handle_data(self, data):
        self.tokens.extend(Character(c) for c in data)

    def handle_comment(self, data):
        self.tokens.append(Comment(data))

    def handle_decl(self, decl):
        if decl.lower().startswith("doctype"):
            self.tokens.append(Doctype(decl[7:].strip().lower()))


def stdlib_tokenize(text: str) -> list:
    sink = _StdlibSink()
    sink.feed(text)
    sink.close()
    sink.tokens.append(EndOfStream())
    return sink.tokens


def scan_prefetch_oracle(text: str) -> list[str]:
    """Character-walk prefetch reference, independent of the regex scanner."""
    urls = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] != "<":
            i += 1
            continue
        j = i + 1
        name = []
        while j < n and (text[j].isalnum()):
            name.append(text[j].lower())
            j += 1
        tag = "".join(name)
        if tag not in ("img", "script", "link"):
            i += 1
            continue
        end = text.find(">", j)
        attr_text = text[j:end] if end != -1 else text[j:]
        wanted = "href" if tag == "link" else "src"
        url = _find_attr(attr_text, wanted)
        if url:
            urls.append(url)
        i = j
    return urls


def _find_attr(attr_text: str, name: str) -> str | None:
    k = 0
    low = attr_text.lower()
    while True:
        k = low.find(name, k)
        if k == -1:
            return None
        before_ok = k == 0 or not (low[k - 1].isalnum() or low[k - 1] in "-_")
        rest = attr_text[k + len(name):].lstrip()
        if before_ok and rest.startswith("="):
            value = rest[1:].lstrip()
            if value[:1] in ("'", '"'):
                quote = value[0]
                stop = value.find(quote, 1)
                return value[1:stop] if stop != -1 else value[1:]
            out = []
            for ch in value:
                if ch.isspace() or ch in ">\"'":
                    break
                out.append(ch)
            return "".join(out)
        k += len(name)
