"""Safe nested recursion on notation: terms, checker, evaluator and transforms."""

from .bounds import (
    BoundCertificate,
    Box,
    check_length_bound,
    check_pred_decrease,
    check_time_bound,
    derive_length_certificate,
    derive_time_certificate,
)
from .checker import CheckReport, check_term, is_pred, validate_prec_function
from .evaluator import EvalLimits, EvalOutcome, Evaluator, LimitExceeded, eval_term, trace, value_of
from .polynomial import Polynomial
from .syntax import parse_document, parse_term, print_document, print_term
from .terms import (
    Comp,
    Cond,
    PrecFunction,
    Pred,
    Proj,
    Signature,
    Snrn,
    SnrnCase,
    Srn,
    Succ,
    Term,
    TermError,
    Zero,
    select,
    select_all,
    sum_measure,
    type_of,
    type_word,
)
from .tm import TMSpec, compile_tm, decode_output, simulate_tm
from .transforms import (
    LengthPolyPair,
    SimultaneousDef,
    corollary_lift,
    oracle_iterate,
    oracle_simultaneous_eval,
    simultaneous_to_single,
)

__version__ = "0.1.0"
