"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


# -- tokenizer input stream --------------------------------------------------

class FedAfterEnd(EngineError):
    """feed() called after the input stream was ended."""


class InsertAfterEnd(EngineError):
    """Insertion-point write after the input stream was ended."""


class DoubleEnd(EngineError):
    """end_stream() called twice."""


# -- DOM ----------------------------------------------------------------------

class NoSuchNode(EngineError):
    def __init__(self, node_id):
        super().__init__(f"no node with id {node_id}")
        self.node_id = node_id


class NotAnElement(EngineError):
    pass


class InvalidParent(EngineError):
    pass


class CannotRemoveRoot(EngineError):
    pass


# -- style / flow --------------------------------------------------------------

class MissingStyle(EngineError):
    def __init__(self, node_id):
        super().__init__(f"no computed style for reachable element {node_id}")
        self.node_id = node_id


# -- scheduler ------------------------------------------------------------------

class PanicPropagated(EngineError):
    """A visit action failed inside a parallel traversal; wraps the first failure."""

    def __init__(self, cause):
        super().__init__(f"traversal visit failed: {cause!r}")
        self.cause = cause


class SendAfterReceiverDropped(EngineError):
    """send() on a channel whose receiver is gone."""


class IndexOutOfRange(EngineError, IndexError):
    pass


# -- display / engine ------------------------------------------------------------

class LayoutIncomplete(EngineError):
    """Display-list build reached a flow whose geometry was never filled."""


class BadPath(EngineError):
    def __init__(self, path):
        super().__init__(f"node selector path {path!r} resolves to nothing")
        self.path = path


class IoError(EngineError):
    def __init__(self, path, cause):
        super().__init__(f"{path}: {cause}")
        self.path = path
        self.cause = cause
