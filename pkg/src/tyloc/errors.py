"""Exception hierarchy shared by every pipeline stage."""


class TylocError(Exception):
    """Base class for all errors raised by tyloc."""


class ParseError(TylocError):
    """Source text does not match the grammar."""

    def __init__(self, message: str, line: int, col: int):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line};{col}: {message}")


class UnboundVariable(TylocError):
    def __init__(self, name: str, range=None):
        self.name = name
        self.range = range
        where = f"{range}: " if range is not None else ""
        super().__init__(f"{where}unbound variable '{name}'")


class PreludeError(TylocError):
    pass


# -- IR ---------------------------------------------------------------------

class IrError(TylocError):
    pass


class IrSyntaxError(IrError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"{line};{col}: {message}" if line else message)


class DanglingLocIndex(IrError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"location index {index} is not declared")


class UnknownScheme(IrError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown scheme '{name}'")


class ArityMismatch(IrError):
    def __init__(self, name: str, expected: int, got: int):
        self.name = name
        super().__init__(f"scheme '{name}' takes {expected} arguments, got {got}")


class MalformedLocations(IrError):
    pass


# -- solver -----------------------------------------------------------------

class SolverError(TylocError):
    pass


class SolverNotFound(SolverError):
    pass


class SolverTimeout(SolverError):
    pass


class SolverCrash(SolverError):
    def __init__(self, message: str, returncode: int | None = None):
        self.returncode = returncode
        super().__init__(message)


class HardConflict(SolverError):
    """The hard locations alone are already inconsistent."""


class UnparseableOutput(SolverError):
    pass


# -- oracle / eval ----------------------------------------------------------

class TooLarge(TylocError):
    pass


class NoErrorSource(TylocError):
    pass


class EmptyInput(TylocError):
    pass
