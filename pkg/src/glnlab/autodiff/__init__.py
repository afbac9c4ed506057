from .fd import GradCheckReport, derivative_fd, grad_check, grad_fd
from .jets import MAX_ORDER, Jet, leading_value
from .ops import apply_arith, apply_unary
from .tape import EvalError, Node, Tape, grad

__all__ = [
    "EvalError", "GradCheckReport", "Jet", "MAX_ORDER", "Node", "Tape",
    "apply_arith", "apply_unary", "derivative_fd", "grad", "grad_check",
    "grad_fd", "leading_value",
]
