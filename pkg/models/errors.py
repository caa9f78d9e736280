# models/errors.py
"""
Error hierarchy shared by all riskgraph services.

Concrete errors also derive from ValueError/KeyError so callers that only
know the builtin types keep working.
"""
from typing import Optional


class RiskGraphError(Exception):
    """Base class for every error raised by riskgraph."""


# ============================================================================
# REGISTER
# ============================================================================

class RegisterError(RiskGraphError, ValueError):
    """Register file could not be turned into a valid RiskRegister."""

    def __init__(
        self,
        message: str,
        code: str = "SyntaxError",
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.message = message
        self.code = code
        self.field = field
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
            if self.column is not None:
                where.append(f"column {self.column}")
        if self.field:
            where.append(self.field)
        prefix = f"{', '.join(where)}: " if where else ""
        return f"{prefix}{self.message} [{self.code}]"


class InvalidRiskError(RiskGraphError, ValueError):
    """A risk failed validation where a valid one was required."""


class MissingMitigationError(RiskGraphError, ValueError):
    """Residual impact requested for a risk without a mitigation plan."""


# ============================================================================
# GRAPH / MATRIX
# ============================================================================

class GraphError(RiskGraphError, ValueError):
    """Factor graph invariant violated."""


class DuplicateFactorError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class UnknownFactorError(RiskGraphError, KeyError):
    """Factor id not present in the graph."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown factor"


class GraphDefinitionError(GraphError):
    """Graph-definition file is malformed."""


class MatrixShapeError(RiskGraphError, ValueError):
    """Relation matrix is not square or does not match its factor order."""


class MatrixParseError(RiskGraphError, ValueError):
    """Rendered matrix text could not be parsed back."""


class OrderMismatchError(RiskGraphError, ValueError):
    """Two artifacts disagree on factor order."""


# ============================================================================
# EXPORT / PREDICTION
# ============================================================================

class ReportMismatchError(RiskGraphError, ValueError):
    """Assessments do not correspond 1:1 to register risks."""


class CsvParseError(RiskGraphError, ValueError):
    pass


class SimulationError(RiskGraphError, ValueError):
    pass
