import random

import pytest

from weft.dom import (
    COMMENT,
    DOCUMENT,
    ELEMENT,
    TEXT,
    DomTree,
    TreeBuilder,
    build,
    dump_tree,
    serialize,
)
from weft.errors import CannotRemoveRoot, InvalidParent, NoSuchNode, NotAnElement
from weft.tokenizer import tokenize
from weft.tokens import Character, EndOfStream, EndTag, StartTag


def names_along(tree, *path):
    """Follow child indices from the root, returning node kinds/names."""
    nid = tree.root
    for idx in path:
        nid = tree.children(nid)[idx]
    node = tree.node(nid)
    return node.name if node.kind == ELEMENT else (node.kind, node.data)


# ---------------------------------------------------------------------------
# building with recovery
# ---------------------------------------------------------------------------

def test_build_autocloses_open_elements():
    tree = build([StartTag("html"), StartTag("body"), Character("a"), EndOfStream()])
    assert names_along(tree, 0) == "html"
    assert names_along(tree, 0, 0) == "body"
    assert names_along(tree, 0, 0, 0) == (TEXT, "a")
    tree.audit()


def test_build_well_formed_nesting():
    tree = build(tokenize("<html><body><p>x</p></body></html>"))
    assert names_along(tree, 0) == "html"
    assert names_along(tree, 0, 0) == "body"
    assert names_along(tree, 0, 0, 0) == "p"
    assert names_along(tree, 0, 0, 0, 0) == (TEXT, "x")
    assert len(tree.children(tree.children(tree.root)[0])) == 1


def test_stray_end_tag_ignored():
    tree = build([EndTag("p"), Character("a"), EndOfStream()])
    assert names_along(tree, 0, 0, 0) == (TEXT, "a")
    tree.audit()


def test_end_tag_closes_intervening():
    tree = build(tokenize("<div><p><b>x</div>y"))
    body = tree.children(tree.children(tree.root)[0])[0]
    div, text = tree.children(body)
    assert tree.node(div).name == "div"
    assert tree.node(text).data == "y"
    tree.audit()


def test_synthesis_before_html_and_body():
    tree = build(tokenize("<p>x</p>"))
    assert names_along(tree, 0) == "html"
    assert names_along(tree, 0, 0) == "body"
    assert names_along(tree, 0, 0, 0) == "p"


def test_head_does_not_force_body():
    tree = build(tokenize("<head><title>t</title></head><p>x</p>"))
    html = tree.children(tree.root)[0]
    kids = [tree.node(c).name for c in tree.children(html)]
    assert kids == ["head", "body"]


def test_adjacent_characters_coalesce():
    tree = build(tokenize("<p>a b</p>"))
    p = tree.children(tree.children(tree.children(tree.root)[0])[0])[0]
    texts = tree.children(p)
    assert len(texts) == 1
    assert tree.node(texts[0]).data == "a b"


def test_whitespace_only_text_preserved_inside_body():
    tree = build(tokenize("<div>a</div> <div>b</div>"))
    body = tree.children(tree.children(tree.root)[0])[0]
    kinds = [tree.node(c).kind for c in tree.children(body)]
    assert kinds == [ELEMENT, TEXT, ELEMENT]


def test_pre_html_whitespace_dropped():
    tree = build(tokenize("\n  <html><body>x"))
    assert len(tree.children(tree.root)) == 1


def test_comment_before_html_attaches_to_document():
    tree = build(tokenize("<!--hi--><p>x</p>"))
    kinds = [tree.node(c).kind for c in tree.children(tree.root)]
    assert kinds == [COMMENT, ELEMENT]


def test_void_elements_do_not_nest():
    tree = build(tokenize("<div><br><img src=x>y</div>"))
    body = tree.children(tree.children(tree.root)[0])[0]
    div = tree.children(body)[0]
    kids = tree.children(div)
    assert [tree.node(c).name or tree.node(c).kind for c in kids] == ["br", "img", TEXT]


def test_duplicate_html_body_ignored():
    tree = build(tokenize("<html><body>a<body>b<html>c"))
    html_nodes = [n for n in tree.nodes.values() if n.kind == ELEMENT and n.name == "html"]
    body_nodes = [n for n in tree.nodes.values() if n.kind == ELEMENT and n.name == "body"]
    assert len(html_nodes) == 1 and len(body_nodes) == 1


def test_build_deterministic():
    doc = "<div><p>a</p><!--c--><ul><li>x</ul></div>"
    t1 = build(tokenize(doc))
    t2 = build(tokenize(doc))
    assert dump_tree(t1) == dump_tree(t2)


def test_script_close_signal():
    builder = TreeBuilder()
    closed = []
    for tok in tokenize("<p><script>cmd</script>rest</p>"):
        sid = builder.process(tok)
        if sid is not None:
            closed.append(sid)
    tree = builder.finish()
    assert len(closed) == 1
    assert tree.node(closed[0]).name == "script"
    assert tree.text_content(closed[0]) == "cmd"


# ---------------------------------------------------------------------------
# round-trip through the canonical form
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("doc", [
    "<html><body><p>x</p></body></html>",
    '<div CLASS="A">one &lt;two&gt;</div>',
    "<ul><li>a<li>b</ul>",
    "text only",
    "<!-- note --><p>tail</p>",
    "<div><p><b>deep</div>after",
    '<img src="i.png"><br>',
])
def test_serialize_is_canonical_fixed_point(doc):
    once = serialize(build(tokenize(doc)))
    twice = serialize(build(tokenize(once)))
    assert once == twice


def test_serialize_fixed_point_on_corpus():
    from .util import corpus_documents

    for path in corpus_documents():
        once = serialize(build(tokenize(path.read_text())))
        twice = serialize(build(tokenize(once)))
        assert once == twice, path.name


# ---------------------------------------------------------------------------
# mutation primitives
# ---------------------------------------------------------------------------

def body_of(tree):
    return tree.children(tree.children(tree.root)[0])[0]


def test_set_attribute():
    tree = build(tokenize("<div></div>"))
    div = tree.children(body_of(tree))[0]
    gen = tree.generation
    tree.set_attribute(div, "class", "x")
    assert tree.node(div).attributes == {"class": "x"}
    tree.set_attribute(div, "class", "y")
    assert tree.node(div).attributes == {"class": "y"}
    assert tree.generation == gen + 2


def test_set_attribute_on_text_rejected():
    tree = build(tokenize("<div>t</div>"))
    div = tree.children(body_of(tree))[0]
    text = tree.children(div)[0]
    with pytest.raises(NotAnElement):
        tree.set_attribute(text, "class", "x")


def test_set_attribute_missing_node():
    tree = build(tokenize("<div></div>"))
    with pytest.raises(NoSuchNode):
        tree.set_attribute(10_000, "a", "b")


def test_append_child():
    tree = build(tokenize("<body></body>"))
    body = body_of(tree)
    t = tree.append_child(body, (TEXT, "hi"))
    assert tree.children(body) == [t]
    d1 = tree.append_child(body, (ELEMENT, "div"))
    d2 = tree.append_child(body, (ELEMENT, "div"))
    assert d1 != d2
    assert tree.children(body) == [t, d1, d2]
    tree.audit()


def test_append_to_text_rejected():
    tree = build(tokenize("<div>t</div>"))
    div = tree.children(body_of(tree))[0]
    text = tree.children(div)[0]
    with pytest.raises(InvalidParent):
        tree.append_child(text, (TEXT, "x"))


def test_remove_leaf():
    tree = build(tokenize("<div>a<b>c</b></div>"))
    div = tree.children(body_of(tree))[0]
    first = tree.children(div)[0]
    tree.remove_node(first)
    assert len(tree.children(div)) == 1
    tree.audit()


def test_remove_subtree_invalidates_descendants():
    tree = build(tokenize("<div><p><b>x</b></p></div>"))
    div = tree.children(body_of(tree))[0]
    p = tree.children(div)[0]
    b = tree.children(p)[0]
    tree.remove_node(p)
    for nid in (p, b):
        with pytest.raises(NoSuchNode):
            tree.node(nid)
    tree.audit()


def test_remove_root_rejected():
    tree = build(tokenize("<p>x</p>"))
    with pytest.raises(CannotRemoveRoot):
        tree.remove_node(tree.root)


def test_node_ids_never_reused():
    tree = build(tokenize("<div>a</div>"))
    div = tree.children(body_of(tree))[0]
    seen = set(tree.nodes)
    tree.remove_node(div)
    fresh = tree.append_child(body_of(tree), (ELEMENT, "span"))
    assert fresh not in seen


def test_random_mutations_keep_links_consistent():
    rng = random.Random(11)
    tree = build(tokenize("<div><p>a</p><p>b</p></div>"))
    for _ in range(300):
        ids = [n for n in tree.nodes if n != tree.root]
        choice = rng.random()
        if choice < 0.45:
            parent = rng.choice([n for n in tree.nodes
                                 if tree.nodes[n].kind in (DOCUMENT, ELEMENT)])
            payload = rng.choice([(ELEMENT, "div"), (TEXT, "t"), (COMMENT, "c")])
            tree.append_child(parent, payload)
        elif choice < 0.7 and ids:
            victim = rng.choice(ids)
            tree.remove_node(victim)
        else:
            elems = [n for n in tree.nodes if tree.nodes[n].kind == ELEMENT]
            if elems:
                tree.set_attribute(rng.choice(elems), "class", "x")
        tree.audit()


def test_generation_strictly_increases():
    tree = build(tokenize("<div></div>"))
    div = tree.children(body_of(tree))[0]
    gens = [tree.generation]
    tree.set_attribute(div, "a", "1")
    gens.append(tree.generation)
    tree.append_child(div, (TEXT, "x"))
    gens.append(tree.generation)
    tree.remove_node(div)
    gens.append(tree.generation)
    assert gens == sorted(set(gens))


# ---------------------------------------------------------------------------
# dump format
# ---------------------------------------------------------------------------

def test_dump_tree_format():
    tree = build(tokenize('<div class="x">a\nb<!--c--></div>'))
    assert dump_tree(tree) == (
        "document\n"
        "  element html\n"
        "    element body\n"
        '      element div [class="x"]\n'
        '        text "a\\nb"\n'
        '        comment "c"\n'
    )
