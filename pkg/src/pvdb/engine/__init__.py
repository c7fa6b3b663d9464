"""Query evaluation: built-ins, interpreter, optimizer and fingerprint runs."""

from .builtins import class_of, get_last_snapshot, get_revision, navigate
from .evaluator import Evaluator, evaluate
from .fingerprint import FingerprintResult, compile_query, origin_list, run_fingerprint, select
from .optimizer import optimize
from .reference import ReferenceInterpreter, reference_select
from .values import Collection

__all__ = [
    "Collection",
    "Evaluator",
    "FingerprintResult",
    "ReferenceInterpreter",
    "class_of",
    "compile_query",
    "evaluate",
    "get_last_snapshot",
    "get_revision",
    "navigate",
    "optimize",
    "origin_list",
    "reference_select",
    "run_fingerprint",
    "select",
]
