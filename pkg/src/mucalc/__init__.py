"""Modal mu-calculus toolkit: parsing, model checking, modal automata,
fragment translations and decision procedures for semantic properties."""

from .syntax import parse, to_string, to_nnf, negate, well_name, guard, prepare
from .models import KripkeModel, eval_naive, model_from_json, model_to_json

__all__ = [
    "parse", "to_string", "to_nnf", "negate", "well_name", "guard", "prepare",
    "KripkeModel", "eval_naive", "model_from_json", "model_to_json",
]
