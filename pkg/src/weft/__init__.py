"""weft: a small parallel web layout engine.

Pipeline: incremental HTML tokenizing with script-driven reinjection,
recovery tree building, CSS cascade, flow construction, work-stealing
parallel layout traversals, display-list emission, and a software painter,
all orchestrated as channel-connected tasks with dirty-bit incremental
relayout.
"""

from .dom import DomTree, TreeBuilder, build, serialize
from .engine import (
    EngineOptions,
    PipelineResult,
    Session,
    benchmark,
    parse_document,
    run_mutate,
    run_pipeline,
)
from .errors import EngineError
from .tokenizer import TokenizerMachine, scan_prefetch, tokenize

__version__ = "0.1.0"

__all__ = [
    "DomTree", "TreeBuilder", "build", "serialize",
    "EngineOptions", "PipelineResult", "Session",
    "benchmark", "parse_document", "run_mutate", "run_pipeline",
    "EngineError", "TokenizerMachine", "scan_prefetch", "tokenize",
    "__version__",
]
