class QuboLinError(Exception):
    """Base class for every error raised by the library."""


class DimensionError(QuboLinError, ValueError):
    pass


class PreconditionError(QuboLinError, ValueError):
    pass


class ConfigError(QuboLinError, ValueError):
    pass


class SingularMatrixError(QuboLinError, ArithmeticError):
    pass


class SingularGeometryError(QuboLinError, ArithmeticError):
    """The H-metric degenerated during orthogonalization (A effectively rank-deficient)."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class DecompositionError(QuboLinError, ArithmeticError):
    def __init__(self, message: str, block_index: int):
        super().__init__(f"block {block_index}: {message}")
        self.block_index = block_index


class SolverError(QuboLinError, RuntimeError):
    def __init__(self, message: str, block_index: int | None = None):
        if block_index is not None:
            message = f"block {block_index}: {message}"
        super().__init__(message)
        self.block_index = block_index
