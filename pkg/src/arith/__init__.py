from src.arith.bigreal import context_for, relative_difference, to_decimal_string
from src.arith.precision import DoublingResult, Evaluation, PrecisionPolicy, with_precision_doubling
from src.arith.weights import WeightSystem, quantum_integer, weight_system

__all__ = [
    "context_for",
    "relative_difference",
    "to_decimal_string",
    "DoublingResult",
    "Evaluation",
    "PrecisionPolicy",
    "with_precision_doubling",
    "WeightSystem",
    "quantum_integer",
    "weight_system",
]
