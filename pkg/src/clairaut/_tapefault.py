"""Fault signalling shared by the compiled and pure-Python tape kernels."""

# opcodes
CONST, VAR, NEG, ADD, SUB, MUL, DIV, POW, SQRT, SIN, COS, LN, EXP = range(13)

# fault reasons
SQRT_NEGATIVE = 1
LN_NONPOSITIVE = 2
DIV_ZERO = 3
NEG_BASE_FRACTIONAL = 4
ZERO_NEG_POWER = 5
NONFINITE = 6
DERIV_UNDEFINED = 7
BAD_BRACKET = 8
NO_CONVERGENCE = 9

REASONS = {
    SQRT_NEGATIVE: "sqrt of negative value",
    LN_NONPOSITIVE: "ln of non-positive value",
    DIV_ZERO: "division by zero",
    NEG_BASE_FRACTIONAL: "negative base with non-integer exponent",
    ZERO_NEG_POWER: "zero raised to a negative power",
    NONFINITE: "non-finite result (overflow)",
    DERIV_UNDEFINED: "derivative undefined (infinite slope)",
}


class TapeFault(ArithmeticError):
    """Raised by a kernel; ``pc`` is the failing instruction, -1 for solver faults."""

    def __init__(self, pc, reason):
        super().__init__(pc, reason)
        self.pc = pc
        self.reason = reason
