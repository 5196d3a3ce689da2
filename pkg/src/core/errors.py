class BovdynError(Exception):
    """Base class for every error raised by the package."""


class ExpressionError(BovdynError, ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class NonIntegerExponentError(ExpressionSyntaxError):
    pass


class UnknownFunctionError(ExpressionSyntaxError):
    def __init__(self, name, offset):
        super().__init__(f"Unknown function '{name}'", offset)
        self.name = name


class UnboundParameterError(ExpressionError, KeyError):
    def __init__(self, name):
        super().__init__(f"Parameter '{name}' has no binding")
        self.name = name

    def __str__(self):
        return self.args[0]


class ComplexParameterError(ExpressionError):
    """A real-line routine met a parameter or constant with nonzero imaginary part."""


class NumericError(BovdynError, ArithmeticError):
    pass


class IntervalDivisionError(NumericError, ZeroDivisionError):
    def __init__(self, subexpression):
        super().__init__(f"Interval divisor contains 0 in '{subexpression}'")
        self.subexpression = subexpression


class IntervalOverflowError(NumericError, OverflowError):
    pass


class ConvergenceError(NumericError):
    def __init__(self, message, best_iterate):
        super().__init__(f"{message} (best iterate {best_iterate!r})")
        self.best_iterate = best_iterate


class BundleError(BovdynError):
    pass


class BundleSchemaError(BundleError, ValueError):
    pass


class UsageError(BovdynError, ValueError):
    """An argument outside the range an operation accepts."""
