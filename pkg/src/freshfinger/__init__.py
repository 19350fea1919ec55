"""Fresh-finger dictionary, bound oracle and comparison-counting harness."""

from .baselines import SplayTree, StaticBST
from .finger_tree import FingerTree, SearchResult
from .hierarchy import AccessRecord, EvictionPolicy, FreshFingerDict, LevelConfig
from .oracle import History, IncrementalOracle, ff_log, theorem2_bound
from .sequences import SequenceSpec, generate

__all__ = [
    "AccessRecord",
    "EvictionPolicy",
    "FingerTree",
    "FreshFingerDict",
    "History",
    "IncrementalOracle",
    "LevelConfig",
    "SearchResult",
    "SequenceSpec",
    "SplayTree",
    "StaticBST",
    "ff_log",
    "generate",
    "theorem2_bound",
]

__version__ = "0.1.0"
