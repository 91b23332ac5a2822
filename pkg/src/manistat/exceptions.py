"""Error hierarchy for manistat.

Every error carries a short machine-readable `code` and the process exit
code the command-line front end returns for it. Errors tied to a single
observation also carry its 1-based `index`.
"""

from typing import Optional


class ManistatError(Exception):
    code: str = "error"
    exit_code: int = 1

    def __init__(
        self,
        message: str,
        *,
        code: Optional[str] = None,
        index: Optional[int] = None,
    ):
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code
        self.index = index

    def one_line(self) -> str:
        reason = " ".join(self.message.split())
        return f"error={self.code} exit={self.exit_code} reason={reason}"


class InvalidInputError(ManistatError):
    code = "invalid_input"
    exit_code = 2


class PreconditionError(InvalidInputError):
    code = "precondition"


class BlockIndexError(InvalidInputError, IndexError):
    code = "block_index"


class DegenerateDataError(ManistatError, ArithmeticError):
    code = "degenerate"
    exit_code = 3


class DomainError(ManistatError, ArithmeticError):
    code = "injectivity"
    exit_code = 4


class SimulationError(ManistatError, RuntimeError):
    code = "simulation"
    exit_code = 5
