"""Hyper-terms, data-systems and lazy equational programs.

The typical flow: parse a session file, validate its data-systems, evaluate
program-terms lazily and check them against types under explicit budgets.
"""
from .errors import CotypeError
from .terms import (
    Call, Con, Constructor, FunctionId, HyperTermSource, Known, LiteralSource, Node, OutOfRange,
    StreamSource, Unexplored, Unknown, Var, Vocabulary, lasso_word, make, prefix, render_prefix,
    semantic_destruct, semantic_discriminate,
)
from .datasystem import (
    Bundle, ConstructorStatement, DataSystem, Polarity, Rank, ValidatedSystem, classify_rank,
    validate,
)
from .program import Program, ProgramEquation, check_wellformed, standard_equations
from .evaluator import EvalConfig, as_source, eval_at, eval_head, finite_eval, locally_equal
from .typecheck import (
    Budget, Derived, Refuted, VerifiedToHeight, check_coinductive, check_inductive,
    check_program_type, check_type, td_node, typed_eq,
)
from .syntax import parse_program, parse_session, parse_term
from . import arith

__version__ = "0.1.0"
