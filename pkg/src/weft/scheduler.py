"""Work-stealing parallel tree traversals, pipeline channels, small buffers.

Traversal contract: TopDown visits a node strictly before any descendant;
BottomUp strictly after all descendants; every node exactly once.  Work is
chunked so subtrees of at most `cutoff` nodes run sequentially inside one
work unit; larger nodes are individual units, and a BottomUp parent is
enqueued by whichever worker completes its last child (countdown).
"""

from __future__ import annotations

import random
import threading
from collections import deque as _pydeque

from .errors import IndexOutOfRange, PanicPropagated, SendAfterReceiverDropped

TOP_DOWN = "top_down"
BOTTOM_UP = "bottom_up"
DEFAULT_CUTOFF = 16


def _default_children(node):
    return node.children


class WorkUnit:
    """One scheduled node: either a whole small subtree or a single big node."""

    __slots__ = ("node", "traversal", "pending_children", "whole_subtree")

    def __init__(self, node, traversal, whole_subtree):
        self.node = node
        self.traversal = traversal
        self.pending_children = 0
        self.whole_subtree = whole_subtree


class Deque:
    """Per-worker work queue: the owner pushes and pops at the bottom,
    thieves steal single items from the top."""

    __slots__ = ("_items", "_lock")

    def __init__(self):
        self._items = _pydeque()
        self._lock = threading.Lock()

    def push(self, item) -> None:
        with self._lock:
            self._items.append(item)

    def pop(self):
        with self._lock:
            return self._items.pop() if self._items else None

    def steal(self):
        with self._lock:
            return self._items.popleft() if self._items else None

    def __len__(self):
        with self._lock:
            return len(self._items)


# ---------------------------------------------------------------------------
# traversal execution
# ---------------------------------------------------------------------------

def subtree_sizes(root, children) -> dict:
    """Node count of every subtree, keyed by object identity."""
    sizes = {}
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            sizes[id(node)] = 1 + sum(sizes[id(c)] for c in children(node))
        else:
            stack.append((node, True))
            for c in children(node):
                stack.append((c, False))
    return sizes


def _visit_pre_order(root, visit, children):
    stack = [root]
    while stack:
        node = stack.pop()
        visit(node)
        kids = children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append(kids[i])


def _visit_post_order(root, visit, children):
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            visit(node)
        else:
            stack.append((node, True))
            kids = children(node)
            for i in range(len(kids) - 1, -1, -1):
                stack.append((kids[i], False))


def execute_traversal(root, direction, visit, workers=1, *,
                      children=_default_children, cutoff=DEFAULT_CUTOFF):
    """Run `visit` over the whole tree in dependency order.

    Returns only after quiescence.  A failing visit aborts the traversal and
    is re-raised wrapped in PanicPropagated (first failure wins).
    """
    if root is None:
        return
    cutoff = max(1, cutoff)
    sizes = subtree_sizes(root, children)
    if workers <= 1 or sizes[id(root)] <= cutoff:
        try:
            if direction == TOP_DOWN:
                _visit_pre_order(root, visit, children)
            else:
                _visit_post_order(root, visit, children)
        except Exception as err:  # noqa: BLE001 - contract wraps any failure
            raise PanicPropagated(err) from err
        return
    _ParallelRun(direction, visit, children, cutoff, workers, sizes).run(root)


class _ParallelRun:
    def __init__(self, direction, visit, children, cutoff, workers, sizes):
        self.direction = direction
        self.visit = visit
        self.children = children
        self.cutoff = cutoff
        self.workers = workers
        self.sizes = sizes
        self.deques = [Deque() for _ in range(workers)]
        self.lock = threading.Lock()
        self.wake = threading.Condition(self.lock)
        self.remaining = 0
        self.pending: dict[int, WorkUnit] = {}  # unit of each big node (BottomUp)
        self.parent_of: dict[int, object] = {}  # unit-root -> parent big node
        self.error = None

    def run(self, root):
        self.remaining = self.sizes[id(root)]
        if self.direction == TOP_DOWN:
            self.deques[0].push(WorkUnit(root, TOP_DOWN, False))
        else:
            self._seed_bottom_up(root)
        threads = [
            threading.Thread(target=self._worker, args=(i,), daemon=True)
            for i in range(self.workers)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        if self.error is not None:
            raise PanicPropagated(self.error) from self.error

    def _seed_bottom_up(self, root):
        # Big nodes wait on a countdown; maximal small subtrees seed the run.
        seeds = []
        stack = [root]
        while stack:
            node = stack.pop()
            if self.sizes[id(node)] <= self.cutoff:
                seeds.append(WorkUnit(node, BOTTOM_UP, True))
                continue
            unit = WorkUnit(node, BOTTOM_UP, False)
            kids = self.children(node)
            unit.pending_children = len(kids)
            self.pending[id(node)] = unit
            for child in kids:
                self.parent_of[id(child)] = node
                stack.append(child)
        for i, unit in enumerate(seeds):
            self.deques[i % self.workers].push(unit)

    def _worker(self, index):
        rng = random.Random(0x9E3779B9 ^ index)
        my = self.deques[index]
        spin_rounds = 2 * self.workers
        while True:
            # remaining only ever falls to 0 and error is set once, so a
            # plain read is a safe exit hint; waiters recheck under the lock
            if self.remaining == 0 or self.error is not None:
                with self.wake:
                    self.wake.notify_all()
                return
            unit = my.pop()
            if unit is None:
                unit = self._steal(index, rng, spin_rounds)
            if unit is None:
                with self.wake:
                    if self.remaining and self.error is None:
                        self.wake.wait(0.001)
                continue
            try:
                self._run_unit(index, unit)
            except Exception as err:  # noqa: BLE001
                with self.lock:
                    if self.error is None:
                        self.error = err
                    self.wake.notify_all()
                return

    def _steal(self, index, rng, spin_rounds):
        others = [i for i in range(self.workers) if i != index]
        for _ in range(spin_rounds):
            rng.shuffle(others)
            for victim in others:
                unit = self.deques[victim].steal()
                if unit is not None:
                    return unit
        return None

    def _run_unit(self, index, unit):
        node = unit.node
        if unit.whole_subtree:
            count = self.sizes[id(node)]
            if self.direction == TOP_DOWN:
                _visit_pre_order(node, self.visit, self.children)
            else:
                _visit_post_order(node, self.visit, self.children)
        else:
            count = 1
            self.visit(node)
            if self.direction == TOP_DOWN:
                my = self.deques[index]
                for child in self.children(node):
                    small = self.sizes[id(child)] <= self.cutoff
                    my.push(WorkUnit(child, TOP_DOWN, small))
                with self.wake:
                    self.wake.notify_all()
        self._completed(index, node, count)

    def _completed(self, index, node, count):
        with self.lock:
            self.remaining -= count
            if self.remaining == 0:
                self.wake.notify_all()
                return
            ready = None
            if self.direction == BOTTOM_UP:
                parent = self.parent_of.get(id(node))
                if parent is not None:
                    parent_unit = self.pending[id(parent)]
                    parent_unit.pending_children -= 1
                    if parent_unit.pending_children == 0:
                        ready = parent_unit
        if ready is not None:
            # the last-completing child enqueues its parent
            self.deques[index].push(ready)
            with self.wake:
                self.wake.notify_all()


# ---------------------------------------------------------------------------
# channels: multiple cloneable senders, one receiver
# ---------------------------------------------------------------------------

class _Closed:
    def __repr__(self):
        return "CLOSED"


CLOSED = _Closed()


class _ChannelState:
    __slots__ = ("items", "lock", "ready", "senders", "receiver_alive")

    def __init__(self):
        self.items = _pydeque()
        self.lock = threading.Lock()
        self.ready = threading.Condition(self.lock)
        self.senders = 0
        self.receiver_alive = True


class Sender:
    """Cloneable writing end.  send() never blocks (unbounded queue)."""

    __slots__ = ("_state", "_open")

    def __init__(self, state):
        self._state = state
        self._open = True
        with state.lock:
            state.senders += 1

    def clone(self) -> "Sender":
        return Sender(self._state)

    def send(self, message) -> None:
        state = self._state
        with state.lock:
            if not state.receiver_alive:
                raise SendAfterReceiverDropped("receiver is gone")
            state.items.append(message)
            state.ready.notify()

    def close(self) -> None:
        if not self._open:
            return
        self._open = False
        state = self._state
        with state.lock:
            state.senders -= 1
            if state.senders == 0:
                state.ready.notify_all()


class Receiver:
    """Unique reading end; recv() blocks until a message or all senders close."""

    __slots__ = ("_state",)

    def __init__(self, state):
        self._state = state

    def recv(self):
        state = self._state
        with state.lock:
            while not state.items and state.senders > 0:
                state.ready.wait()
            if state.items:
                return state.items.popleft()
            return CLOSED

    def close(self) -> None:
        with self._state.lock:
            self._state.receiver_alive = False

    def __iter__(self):
        while True:
            msg = self.recv()
            if msg is CLOSED:
                return
            yield msg


def channel_create() -> tuple[Sender, Receiver]:
    state = _ChannelState()
    return Sender(state), Receiver(state)


# ---------------------------------------------------------------------------
# small buffer: inline capacity 4, spilling to growable storage
# ---------------------------------------------------------------------------

class SmallBuffer:
    """Sequence with four inline slots; the fifth push copies them out to
    growable storage.  Observable behaviour matches a plain list."""

    INLINE_CAPACITY = 4

    __slots__ = ("_inline", "_length", "_spilled")

    def __init__(self, items=()):
        self._inline = [None, None, None, None]
        self._length = 0
        self._spilled = None
        for item in items:
            self.push(item)

    def is_inline(self) -> bool:
        return self._spilled is None

    def push(self, item) -> None:
        if self._spilled is not None:
            self._spilled.append(item)
            self._length += 1
            return
        if self._length == self.INLINE_CAPACITY:
            self._spilled = self._inline[:self._length]
            self._spilled.append(item)
            self._length += 1
            return
        self._inline[self._length] = item
        self._length += 1

    def get(self, index: int):
        if not 0 <= index < self._length:
            raise IndexOutOfRange(f"index {index} out of range 0..{self._length - 1}")
        if self._spilled is not None:
            return self._spilled[index]
        return self._inline[index]

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, index: int):
        return self.get(index)

    def __iter__(self):
        storage = self._spilled if self._spilled is not None else self._inline
        for i in range(self._length):
            yield storage[i]

    def __bool__(self) -> bool:
        return self._length > 0

    def __repr__(self):
        return f"SmallBuffer({list(self)!r})"
