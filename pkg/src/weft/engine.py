"""Engine orchestration.

Three long-lived tasks connected by multiple-writer/single-reader channels:
the parser task (tokenizer + tree builder + script execution), the
style+layout task (cascade, flow construction, parallel traversals, dirty-bit
incremental relayout), and the display task (display list, raster, dumps,
output files).  The DOM and flow trees are owned by exactly one task at a
time and handed over whole inside messages; a per-object ownership tag is
asserted in debug mode.  Geometry reads from outside the layout task go
through a synchronous request/reply message pair, never shared state.
"""

from __future__ import annotations

import math
import os
import statistics
import threading
from dataclasses import dataclass, field
from time import perf_counter

from .display import build_display_list, display_list_json, paint, write_ppm
from .dom import ELEMENT, DomTree, TreeBuilder, dump_tree
from .errors import BadPath, EngineError, IoError
from .flow import Flow, build_flow_subtree, build_flow_tree, dump_flow_tree, flow_index
from .layout import (
    VisitCounter,
    assign_height_at,
    assign_width_at,
    clear_flags,
    compute_intrinsics_at,
    content_width,
    dump_layout,
    layout,
    place_at,
)
from .scheduler import (
    CLOSED,
    DEFAULT_CUTOFF,
    TOP_DOWN,
    SmallBuffer,
    channel_create,
    execute_traversal,
)
from .script import AppendChild, RemoveNode, SetAttribute, Write, parse_commands, resolve_path
from .style import cascade, compute_styles, dump_styles, parse_stylesheet
from .tokenizer import FINISHED, NEED_MORE_INPUT, TokenizerMachine, scan_prefetch
from .tokens import format_token

DUMP_KINDS = ("tokens", "dom", "style", "flow", "layout")


@dataclass
class EngineOptions:
    workers: int = 0                 # 0: use the machine's logical core count
    parallel_cutoff: int = DEFAULT_CUTOFF
    viewport: float = 800.0
    out_path: str | None = None
    raster_path: str | None = None
    dump: str | None = None          # one of DUMP_KINDS
    chunk_size: int = 4096
    debug_ownership: bool = True

    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)


# -- pipeline messages ---------------------------------------------------------

@dataclass
class TokensReady:
    batch: list


@dataclass
class DomReady:
    tree: DomTree
    deferred_commands: list
    prefetch_urls: list
    diagnostics: list


@dataclass
class StylesReady:
    pass


@dataclass
class LayoutDone:
    pass


@dataclass
class DisplayRequest:
    tree: DomTree
    styles: dict
    flow_root: Flow | None
    tag: str


@dataclass
class DisplayDone:
    tree: DomTree
    flow_root: Flow | None


@dataclass
class GeometryQuery:
    path: tuple
    reply: object            # Sender for the one-shot reply


@dataclass
class Mutate:
    commands: list


@dataclass
class TaskFailed:
    stage: str
    message: str


@dataclass
class Quit:
    reason: str | None = None


@dataclass
class RenderResult:
    tag: str
    display_json: str = ""
    dump_text: str = ""
    error: str | None = None


@dataclass
class PipelineResult:
    display_json: str = ""
    dump_text: str = ""
    timings: list = field(default_factory=list)
    prefetch_urls: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    error: str | None = None


# ---------------------------------------------------------------------------
# parsing with script execution
# ---------------------------------------------------------------------------

def parse_document(html_text: str, chunk_size: int = 4096, on_token=None):
    """Tokenize and build the DOM, executing script `write` commands at their
    insertion point.  Returns (tree, deferred commands, prefetch urls,
    diagnostics)."""
    machine = TokenizerMachine()
    builder = TreeBuilder()
    deferred = []
    prefetch: list[str] = []
    seen: set[str] = set()
    diagnostics: list[str] = []

    def note_urls(urls):
        for url in urls:
            if url not in seen:
                seen.add(url)
                prefetch.append(url)

    def drain():
        while True:
            result = machine.next_token()
            if result is NEED_MORE_INPUT or result is FINISHED:
                return
            if on_token is not None:
                on_token(result)
            script_id = builder.process(result)
            if script_id is not None:
                commands, cdiags = parse_commands(builder.tree.text_content(script_id))
                diagnostics.extend(cdiags)
                for cmd in commands:
                    if isinstance(cmd, Write):
                        machine.insert_at_insertion_point(cmd.text)
                    else:
                        deferred.append(cmd)
                # parsing pauses for the script; scan ahead for resources
                note_urls(scan_prefetch(machine.pending_input()))

    note_urls(scan_prefetch(html_text))
    step = max(1, chunk_size)
    for pos in range(0, len(html_text), step):
        machine.feed(html_text[pos:pos + step])
        drain()
    machine.end_stream()
    drain()
    return builder.finish(), deferred, prefetch, diagnostics


def parse_rules(css_texts) -> list:
    rules = []
    for css in css_texts:
        parsed, _ = parse_stylesheet(css, start_order=len(rules))
        rules.extend(parsed)
    return rules


# ---------------------------------------------------------------------------
# session: styled/laid-out page state plus dirty-bit incremental relayout
# ---------------------------------------------------------------------------

class Session:
    def __init__(self, tree: DomTree, rules, viewport=800.0, workers=1,
                 cutoff=DEFAULT_CUTOFF):
        self.tree = tree
        self.rules = rules
        self.viewport = viewport
        self.workers = workers
        self.cutoff = cutoff
        self.styles: dict = {}
        self.flow_root: Flow | None = None
        self.flow_idx: dict = {}
        self.full_dirty = True

    # -- styling ----------------------------------------------------------

    def _root_element(self):
        for child in self.tree.children(self.tree.root):
            if self.tree.node(child).kind == ELEMENT:
                return child
        return None

    def compute_styles_parallel(self) -> dict:
        """Cascade every element via a top-down scheduler traversal."""
        root_el = self._root_element()
        styles: dict = {}
        if root_el is None:
            return styles
        tree = self.tree

        def children(node):
            return [tree.nodes[c] for c in node.children
                    if tree.nodes[c].kind == ELEMENT]

        def visit(node):
            parent = node.parent
            styles[node.id] = cascade(node.id, tree, self.rules,
                                      styles.get(parent))

        execute_traversal(tree.nodes[root_el], TOP_DOWN, visit,
                          self.workers, children=children, cutoff=self.cutoff)
        return styles

    def initial_layout(self, stats: VisitCounter | None = None) -> dict:
        """Full style + flow + layout; returns per-stage times in ms."""
        times = {}
        t0 = perf_counter()
        self.styles = self.compute_styles_parallel()
        times["style"] = (perf_counter() - t0) * 1000
        t0 = perf_counter()
        self.flow_root = build_flow_tree(self.tree, self.styles)
        self.flow_idx = flow_index(self.flow_root)
        times["flow"] = (perf_counter() - t0) * 1000
        t0 = perf_counter()
        layout(self.flow_root, self.viewport, self.workers, self.cutoff, stats)
        times["layout"] = (perf_counter() - t0) * 1000
        self.full_dirty = False
        return times

    # -- mutations ----------------------------------------------------------

    def apply_mutations(self, commands) -> tuple[set, list]:
        """Apply script commands to the DOM, rebuild affected flow subtrees,
        and mark dirty bits.  Returns (dirtied flow roots, diagnostics)."""
        dirtied = set()
        diagnostics = []
        for cmd in commands:
            if isinstance(cmd, Write):
                diagnostics.append("write ignored after initial load")
                continue
            if isinstance(cmd, SetAttribute):
                node = resolve_path(self.tree, cmd.path)
                self.tree.set_attribute(node, cmd.name, cmd.value)
                anchor = self._attribute_anchor(node)
            elif isinstance(cmd, AppendChild):
                parent = resolve_path(self.tree, cmd.parent_path)
                self.tree.append_child(parent, cmd.payload)
                anchor = parent
            elif isinstance(cmd, RemoveNode):
                node = resolve_path(self.tree, cmd.path)
                anchor = self.tree.node(node).parent
                self.tree.remove_node(node)
            else:
                diagnostics.append(f"unknown command object {cmd!r}")
                continue
            flow = self._rebuild_at(anchor)
            if flow is not None:
                dirtied.add(flow)
        self.styles = {k: v for k, v in self.styles.items() if k in self.tree.nodes}
        return dirtied, diagnostics

    def _attribute_anchor(self, node):
        """An attribute change rebuilds the element's own flow subtree when it
        stays a block; anything that can change the parent's anonymous
        wrapping (display flips, inline elements) rebuilds the parent."""
        if self.full_dirty or node not in self.flow_idx:
            return self.tree.node(node).parent
        parent_el = self.tree.node(node).parent
        while parent_el is not None and self.tree.node(parent_el).kind != ELEMENT:
            parent_el = self.tree.node(parent_el).parent
        sub_styles = compute_styles(self.tree, self.rules, root=node,
                                    parent_style=self.styles.get(parent_el))
        self.styles.update(sub_styles)
        if sub_styles[node].display in ("block", "list_item"):
            return node
        return self.tree.node(node).parent

    def _rebuild_at(self, anchor) -> Flow | None:
        """Rebuild the flow subtree of the nearest flow-bearing ancestor."""
        if self.full_dirty:
            return None
        cur = anchor
        while cur is not None:
            node = self.tree.node(cur)
            if node.kind == ELEMENT and cur in self.flow_idx:
                break
            cur = node.parent
        if cur is None:
            self.full_dirty = True  # nothing rendered yet, or root-level change
            return None
        parent_el = self.tree.node(cur).parent
        while parent_el is not None and self.tree.node(parent_el).kind != ELEMENT:
            parent_el = self.tree.node(parent_el).parent
        sub_styles = compute_styles(self.tree, self.rules, root=cur,
                                    parent_style=self.styles.get(parent_el))
        self.styles.update(sub_styles)
        if sub_styles[cur].display == "none":
            return self._rebuild_at(parent_el)
        new_flow = build_flow_subtree(self.tree, cur, self.styles)
        old_flow = self.flow_idx[cur]
        parent_flow = old_flow.parent
        if parent_flow is None:
            self.flow_root = new_flow
        else:
            rebuilt = SmallBuffer()
            for child in parent_flow.children:
                rebuilt.push(new_flow if child is old_flow else child)
            parent_flow.children = rebuilt
            new_flow.parent = parent_flow
        new_flow.self_dirty = True
        walker = new_flow.parent
        while walker is not None:
            walker.descendant_dirty = True
            walker = walker.parent
        self.flow_idx = flow_index(self.flow_root)
        return new_flow

    # -- incremental relayout -------------------------------------------------

    def incremental_relayout(self, stats: VisitCounter | None = None) -> None:
        """Re-run the traversals, skipping clean subtrees.  Final geometry is
        identical to a from-scratch layout; all dirty bits end up cleared."""
        if self.full_dirty:
            self.styles = self.compute_styles_parallel()
            self.flow_root = build_flow_tree(self.tree, self.styles)
            self.flow_idx = flow_index(self.flow_root)
            layout(self.flow_root, self.viewport, self.workers, self.cutoff, stats)
            self.full_dirty = False
            return
        root = self.flow_root
        if root is None:
            return

        def up_intrinsics(flow):
            changed_child = False
            for child in flow.children:
                if child.self_dirty or child.descendant_dirty or child.metrics is None:
                    changed_child |= up_intrinsics(child)
            if flow.self_dirty or changed_child or flow.metrics is None:
                if stats:
                    stats.bump("intrinsics")
                return compute_intrinsics_at(flow)
            return False

        up_intrinsics(root)

        def down_widths(flow, containing, force):
            m = flow.metrics
            need = (force or flow.self_dirty or m.used_width is None
                    or m.containing_width != containing)
            changed = False
            if need:
                if stats:
                    stats.bump("widths")
                changed = assign_width_at(flow, containing)
            subtree_changed = changed
            if need or flow.descendant_dirty:
                inner = content_width(flow)
                for child in flow.children:
                    subtree_changed |= down_widths(child, inner, changed)
            flow.metrics.subtree_width_changed = subtree_changed
            return subtree_changed

        down_widths(root, self.viewport, False)

        def up_heights(flow):
            m = flow.metrics
            changed_child = False
            for child in flow.children:
                cm = child.metrics
                if (child.self_dirty or child.descendant_dirty
                        or cm.subtree_width_changed or cm.used_height is None):
                    changed_child |= up_heights(child)
            if (flow.self_dirty or changed_child or m.width_changed
                    or m.used_height is None):
                if stats:
                    stats.bump("heights")
                return assign_height_at(flow)
            return False

        up_heights(root)

        def down_place(flow, force):
            m = flow.metrics
            moved = False
            if force or m.moved or m.x is None or flow.self_dirty:
                if stats:
                    stats.bump("place")
                moved = place_at(flow)
            if (moved or flow.self_dirty or flow.descendant_dirty
                    or m.subtree_width_changed or m.width_changed):
                for child in flow.children:
                    down_place(child, moved)
            clear_flags(flow)

        down_place(root, False)

    # -- geometry query ----------------------------------------------------

    def geometry_of(self, path: tuple):
        node = resolve_path(self.tree, path)
        flow = self.flow_idx.get(node)
        if flow is None or flow.metrics is None or not flow.metrics.complete:
            raise BadPath("/".join(str(p) for p in path))
        m = flow.metrics
        return (m.x, m.y, m.used_width, m.used_height)


# ---------------------------------------------------------------------------
# the channel-connected pipeline
# ---------------------------------------------------------------------------

class Pipeline:
    """Parser, style+layout, and display tasks over channels."""

    def __init__(self, html_text: str, css_texts: list[str], options: EngineOptions):
        self.html_text = html_text
        self.css_texts = css_texts
        self.options = options
        self._owners: dict[int, str] = {}
        to_layout_tx, self._to_layout_rx = channel_create()
        to_display_tx, self._to_display_rx = channel_create()
        results_tx, self.results_rx = channel_create()
        timing_tx, self.timing_rx = channel_create()
        self._parse_tx = to_layout_tx
        self._main_tx = to_layout_tx.clone()      # main thread's writer to layout
        self._display_to_layout_tx = to_layout_tx.clone()
        self._layout_to_display_tx = to_display_tx
        self._display_results_tx = results_tx
        self._layout_results_tx = results_tx.clone()
        self._timing_senders = [timing_tx, timing_tx.clone(), timing_tx.clone()]
        self.session: Session | None = None
        self._threads: list[threading.Thread] = []

    # ownership bookkeeping (debug): one task owns a structure at a time
    def _give(self, obj, owner):
        if self.options.debug_ownership and obj is not None:
            self._owners[id(obj)] = owner

    def _check(self, obj, owner):
        if self.options.debug_ownership and obj is not None:
            actual = self._owners.get(id(obj))
            assert actual == owner, f"{owner} touched structure owned by {actual}"

    def start(self):
        self._threads = [
            threading.Thread(target=self._parse_task, name="weft-parse", daemon=True),
            threading.Thread(target=self._layout_task, name="weft-layout", daemon=True),
            threading.Thread(target=self._display_task, name="weft-display", daemon=True),
        ]
        for t in self._threads:
            t.start()
        return self

    # -- parse task --------------------------------------------------------

    def _parse_task(self):
        tx = self._parse_tx
        timing = self._timing_senders[0]
        try:
            t0 = perf_counter()
            batch = []

            def on_token(token):
                batch.append(token)
                if len(batch) >= 512:
                    tx.send(TokensReady(batch[:]))
                    batch.clear()

            tree, deferred, prefetch, diagnostics = parse_document(
                self.html_text, self.options.chunk_size, on_token)
            if batch:
                tx.send(TokensReady(batch[:]))
            timing.send(("parse", (perf_counter() - t0) * 1000))
            self._give(tree, "layout")
            tx.send(DomReady(tree, deferred, prefetch, diagnostics))
        except Exception as err:  # noqa: BLE001
            tx.send(TaskFailed("parse", repr(err)))
        finally:
            tx.close()
            timing.close()

    # -- style+layout task ---------------------------------------------------

    def _layout_task(self):
        rx = self._to_layout_rx
        to_display = self._layout_to_display_tx
        results = self._layout_results_tx
        timing = self._timing_senders[1]
        opts = self.options
        try:
            while True:
                msg = rx.recv()
                if msg is CLOSED or isinstance(msg, Quit):
                    to_display.send(Quit())
                    return
                if isinstance(msg, (TokensReady, TaskFailed)):
                    to_display.send(msg)
                    continue
                if isinstance(msg, DomReady):
                    self._check(msg.tree, "layout")
                    rules = parse_rules(self.css_texts)
                    session = Session(msg.tree, rules, opts.viewport,
                                      opts.effective_workers(), opts.parallel_cutoff)
                    self.session = session
                    times = session.initial_layout()
                    to_display.send(StylesReady())
                    timing.send(("style", times["style"]))
                    timing.send(("flow", times["flow"]))
                    timing.send(("layout", times["layout"]))
                    if msg.deferred_commands:
                        t0 = perf_counter()
                        _, diags = session.apply_mutations(msg.deferred_commands)
                        session.incremental_relayout()
                        timing.send(("script-mutations", (perf_counter() - t0) * 1000))
                        msg.diagnostics.extend(diags)
                    to_display.send(LayoutDone())
                    self._give(msg.tree, "display")
                    self._give(session.flow_root, "display")
                    to_display.send(DisplayRequest(msg.tree, session.styles,
                                                   session.flow_root, "render"))
                    results.send(("meta", msg.prefetch_urls, msg.diagnostics))
                    continue
                if isinstance(msg, DisplayDone):
                    self._give(msg.tree, "layout")
                    self._give(msg.flow_root, "layout")
                    continue
                if isinstance(msg, Mutate):
                    session = self.session
                    self._check(session.tree, "layout")
                    t0 = perf_counter()
                    _, diags = session.apply_mutations(msg.commands)
                    session.incremental_relayout()
                    timing.send(("mutate", (perf_counter() - t0) * 1000))
                    self._give(session.tree, "display")
                    self._give(session.flow_root, "display")
                    to_display.send(DisplayRequest(session.tree, session.styles,
                                                   session.flow_root, "after"))
                    continue
                if isinstance(msg, GeometryQuery):
                    try:
                        msg.reply.send(self.session.geometry_of(msg.path))
                    except EngineError as err:
                        msg.reply.send(err)
                    msg.reply.close()
                    continue
        except Exception as err:  # noqa: BLE001
            to_display.send(TaskFailed("layout", repr(err)))
            to_display.send(Quit())
        finally:
            to_display.close()
            results.close()
            timing.close()

    # -- display task ---------------------------------------------------------

    def _display_task(self):
        rx = self._to_display_rx
        results = self._display_results_tx
        timing = self._timing_senders[2]
        opts = self.options
        token_lines: list[str] = []
        to_layout = self._display_to_layout_tx
        try:
            while True:
                msg = rx.recv()
                if msg is CLOSED or isinstance(msg, Quit):
                    return
                if isinstance(msg, TokensReady):
                    if opts.dump == "tokens":
                        token_lines.extend(format_token(t) for t in msg.batch)
                    continue
                if isinstance(msg, (StylesReady, LayoutDone)):
                    continue
                if isinstance(msg, TaskFailed):
                    results.send(RenderResult("error", error=f"{msg.stage}: {msg.message}"))
                    continue
                if isinstance(msg, DisplayRequest):
                    self._check(msg.flow_root, "display")
                    t0 = perf_counter()
                    try:
                        out = self._render_outputs(msg, token_lines)
                    except EngineError as err:
                        results.send(RenderResult(msg.tag, error=str(err)))
                        continue
                    finally:
                        self._give(msg.tree, "layout")
                        self._give(msg.flow_root, "layout")
                        to_layout.send(DisplayDone(msg.tree, msg.flow_root))
                    timing.send(("display", (perf_counter() - t0) * 1000))
                    results.send(out)
                    continue
        except Exception as err:  # noqa: BLE001
            results.send(RenderResult("error", error=f"display: {err!r}"))
        finally:
            to_layout.close()
            results.close()
            timing.close()

    def _render_outputs(self, msg: DisplayRequest, token_lines) -> RenderResult:
        opts = self.options
        items = build_display_list(msg.flow_root)
        json_text = display_list_json(items)
        dump_text = ""
        if opts.dump == "tokens":
            dump_text = "\n".join(token_lines) + "\n" if token_lines else ""
        elif opts.dump == "dom":
            dump_text = dump_tree(msg.tree)
        elif opts.dump == "style":
            dump_text = dump_styles(msg.tree, msg.styles)
        elif opts.dump == "flow":
            dump_text = dump_flow_tree(msg.flow_root)
        elif opts.dump == "layout":
            dump_text = dump_layout(msg.flow_root)
        if opts.out_path:
            _write_file(opts.out_path, json_text.encode("utf-8"))
        if opts.raster_path:
            width = max(1, math.ceil(opts.viewport))
            height = 1
            root = msg.flow_root
            if root is not None:
                m = root.metrics
                height = max(1, math.ceil(m.y + m.used_height
                                          + root.style.margin_bottom))
            _write_file(opts.raster_path, write_ppm(paint(items, width, height)))
        return RenderResult(msg.tag, json_text, dump_text)

    # -- main-thread API -------------------------------------------------------

    def wait_result(self, tag: str):
        meta = None
        result = None
        while result is None or meta is None:
            msg = self.results_rx.recv()
            if msg is CLOSED:
                return meta, RenderResult(tag, error="pipeline closed unexpectedly")
            if isinstance(msg, tuple) and msg[0] == "meta":
                meta = msg
            elif isinstance(msg, RenderResult) and msg.tag in (tag, "error"):
                result = msg
                if msg.tag == "error":
                    break
        return meta, result

    def wait_mutate_result(self):
        while True:
            msg = self.results_rx.recv()
            if msg is CLOSED:
                return RenderResult("after", error="pipeline closed unexpectedly")
            if isinstance(msg, RenderResult) and msg.tag in ("after", "error"):
                return msg

    def mutate(self, commands):
        self._main_tx.send(Mutate(commands))

    def query_geometry(self, path: tuple):
        reply_tx, reply_rx = channel_create()
        self._main_tx.send(GeometryQuery(path, reply_tx))
        answer = reply_rx.recv()
        if isinstance(answer, EngineError):
            raise answer
        return answer

    def shutdown(self):
        try:
            self._main_tx.send(Quit())
        except EngineError:
            pass
        self._main_tx.close()
        for t in self._threads:
            t.join(timeout=30)
        timings = []
        while True:
            msg = self.timing_rx.recv()
            if msg is CLOSED:
                break
            timings.append(msg)
        return timings


def _write_file(path, data: bytes):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as err:
        raise IoError(path, err) from err


def _read_text(path) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as err:
        raise IoError(path, err) from err


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def run_pipeline(html_path, css_paths, options: EngineOptions | None = None) -> PipelineResult:
    """Render one page through the task pipeline."""
    options = options or EngineOptions()
    html_text = _read_text(html_path)
    css_texts = [_read_text(p) for p in css_paths]
    pipeline = Pipeline(html_text, css_texts, options).start()
    meta, render = pipeline.wait_result("render")
    timings = pipeline.shutdown()
    result = PipelineResult(display_json=render.display_json,
                            dump_text=render.dump_text,
                            timings=timings, error=render.error)
    if meta is not None:
        result.prefetch_urls = list(meta[1])
        result.diagnostics = list(meta[2])
    return result


def run_mutate(html_path, css_paths, commands_text: str,
               options: EngineOptions | None = None,
               query_paths: list[tuple] | None = None):
    """Render, apply post-load mutation commands, incrementally relayout.

    Returns (before RenderResult, after RenderResult, diagnostics, query rows,
    timings)."""
    options = options or EngineOptions()
    if options.dump is None:
        options.dump = "layout"
    html_text = _read_text(html_path)
    css_texts = [_read_text(p) for p in css_paths]
    commands, diagnostics = parse_commands(commands_text)
    pipeline = Pipeline(html_text, css_texts, options).start()
    meta, before = pipeline.wait_result("render")
    queries = []
    after = RenderResult("after")
    if before.error is None:
        pipeline.mutate(commands)
        after = pipeline.wait_mutate_result()
        for path in query_paths or []:
            x, y, w, h = pipeline.query_geometry(path)
            queries.append(("/".join(str(p) for p in path),
                            f"{x:.2f} {y:.2f} {w:.2f} {h:.2f}"))
    if meta is not None:
        diagnostics = list(meta[2]) + diagnostics
    timings = pipeline.shutdown()
    return before, after, diagnostics, queries, timings


# ---------------------------------------------------------------------------
# benchmark harness
# ---------------------------------------------------------------------------

REFERENCE_TIMINGS = (
    # published layout-stage numbers for context; different engine, hardware,
    # and sites, so they are explicitly not targets for this implementation
    ("Reddit", 250, 100, 55),
    ("CNN", 105, 50, 35),
)


@dataclass
class BenchReport:
    page: str
    worker_counts: list
    medians: dict
    minimums: dict
    repetitions: int


def benchmark(html_path, css_paths, worker_counts, repetitions,
              viewport=800.0, cutoff=DEFAULT_CUTOFF) -> BenchReport:
    """Median/min wall time of the layout stage (style + traversals) per
    worker count, after one warm-up run."""
    if repetitions < 3:
        raise ValueError("benchmark needs at least 3 repetitions")
    html_text = _read_text(html_path)
    css_texts = [_read_text(p) for p in css_paths]
    tree, _, _, _ = parse_document(html_text)
    rules = parse_rules(css_texts)

    def one_run(workers) -> float:
        session = Session(tree, rules, viewport, workers, cutoff)
        t0 = perf_counter()
        session.initial_layout()
        return (perf_counter() - t0) * 1000

    medians = {}
    minimums = {}
    for workers in worker_counts:
        one_run(workers)  # warm-up
        times = [one_run(workers) for _ in range(repetitions)]
        medians[workers] = statistics.median(times)
        minimums[workers] = min(times)
    return BenchReport(os.path.basename(str(html_path)), list(worker_counts),
                       medians, minimums, repetitions)


def format_bench_table(report: BenchReport) -> str:
    header = ["page"]
    for w in report.worker_counts:
        header += [f"w{w}_median_ms", f"w{w}_min_ms"]
    row = [report.page]
    for w in report.worker_counts:
        row += [f"{report.medians[w]:.1f}", f"{report.minimums[w]:.1f}"]
    lines = ["\t".join(header), "\t".join(row)]
    for site, gecko, one, four in REFERENCE_TIMINGS:
        lines.append(f"# reference (non-target): {site} layout ms - "
                     f"Gecko {gecko} / 1 thread {one} / 4 threads {four}")
    return "\n".join(lines) + "\n"
